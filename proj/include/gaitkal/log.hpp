#pragma once

#include <cstdlib>
#include <iostream>
#include <string_view>

namespace gaitkal::log {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

// Verbosity comes from the GAITKAL_LOG environment variable
// ("error" | "warn" | "info" | "debug", default "warn").
inline Level threshold() {
  static const Level lvl = [] {
    const char* env = std::getenv("GAITKAL_LOG");
    if (!env) return Level::warn;
    std::string_view s(env);
    if (s == "error") return Level::error;
    if (s == "warn") return Level::warn;
    if (s == "info") return Level::info;
    if (s == "debug") return Level::debug;
    return Level::warn;
  }();
  return lvl;
}

inline void emit(Level lvl, std::string_view tag, std::string_view msg) {
  if (static_cast<int>(lvl) <= static_cast<int>(threshold()))
    std::cerr << "[" << tag << "] " << msg << "\n";
}

inline void error(std::string_view msg) { emit(Level::error, "error", msg); }
inline void warn(std::string_view msg) { emit(Level::warn, "warn", msg); }
inline void info(std::string_view msg) { emit(Level::info, "info", msg); }
inline void debug(std::string_view msg) { emit(Level::debug, "debug", msg); }

}  // namespace gaitkal::log
