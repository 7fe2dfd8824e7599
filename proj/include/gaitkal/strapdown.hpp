#pragma once

#include <Eigen/Core>

#include <span>

#include "gaitkal/orientation.hpp"

namespace gaitkal {

// Full per-sample kinematic history along the walking direction. Traces are
// kept whole (not streamed) so correction passes can rewrite v/p mid-walk.
struct KinematicTrace {
  Eigen::VectorXd t;  // s
  Eigen::VectorXd a;  // m/s^2, walking-direction acceleration
  Eigen::VectorXd v;  // m/s
  Eigen::VectorXd p;  // m
};

// One trapezoid step. Every integrator in the library funnels through this
// so that a zero-correction filter pass reproduces plain propagation bit for
// bit.
inline double trapezoid_step(double prev, double t0, double t1, double f0,
                             double f1) {
  return prev + (t1 - t0) * (f0 + f1) / 2.0;
}

// Cumulative trapezoid integral of f over t, starting at f0.
// out[0] = f0, out[i] = out[i-1] + (t[i]-t[i-1]) * (f[i]+f[i-1]) / 2.
// Requires t and f of equal length >= 2 with strictly increasing t.
Eigen::VectorXd integrate_trapezoid(const Eigen::Ref<const Eigen::VectorXd>& t,
                                    const Eigen::Ref<const Eigen::VectorXd>& f,
                                    double f0);

// Uncorrected strapdown pass: velocity from acceleration, then position from
// velocity, both trapezoidal, walking-direction component only.
KinematicTrace propagate(std::span<const NavSample> nav, double v0, double p0);

}  // namespace gaitkal
