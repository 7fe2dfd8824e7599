#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <system_error>

namespace gaitkal {

// Shortest decimal form that parses back to the identical double. Used by
// every CSV writer so that write/parse round trips are bit exact and output
// files are byte-reproducible across runs.
inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// Parses a full token as a double; returns false on trailing garbage or an
// empty/invalid field. Accepts "inf"/"nan" spellings (flagged later by
// stream validation, not by the parser).
inline bool parse_double(std::string_view tok, double& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace gaitkal
