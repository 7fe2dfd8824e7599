#include "gaitkal/strapdown.hpp"

#include <stdexcept>

namespace gaitkal {

Eigen::VectorXd integrate_trapezoid(const Eigen::Ref<const Eigen::VectorXd>& t,
                                    const Eigen::Ref<const Eigen::VectorXd>& f,
                                    double f0) {
  const Eigen::Index n = t.size();
  if (n < 2 || f.size() != n)
    throw std::invalid_argument(
        "integrate_trapezoid: need equal-length sequences of >= 2 samples");

  Eigen::VectorXd out(n);
  out[0] = f0;
  for (Eigen::Index i = 1; i < n; ++i) {
    if (t[i] <= t[i - 1])
      throw std::invalid_argument(
          "integrate_trapezoid: timestamps must be strictly increasing");
    out[i] = trapezoid_step(out[i - 1], t[i - 1], t[i], f[i - 1], f[i]);
  }
  return out;
}

KinematicTrace propagate(std::span<const NavSample> nav, double v0,
                         double p0) {
  const Eigen::Index n = static_cast<Eigen::Index>(nav.size());
  if (n < 2)
    throw std::invalid_argument("propagate: need at least 2 samples");

  KinematicTrace trace;
  trace.t.resize(n);
  trace.a.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    trace.t[i] = nav[static_cast<size_t>(i)].t;
    trace.a[i] = walking_component(nav[static_cast<size_t>(i)]);
  }
  trace.v = integrate_trapezoid(trace.t, trace.a, v0);
  trace.p = integrate_trapezoid(trace.t, trace.v, p0);
  return trace;
}

}  // namespace gaitkal
