#pragma once

#include <cstddef>
#include <functional>

namespace evchar {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t intervals = 0;
};

struct QuadratureOptions {
  double abs_tol = 1e-10;
  std::size_t max_intervals = std::size_t{1} << 20;
};

/// Globally adaptive interval halving: the subinterval with the largest error
/// estimate is bisected until the summed estimate is <= `abs_tol`. Each panel
/// is a 7-point Gauss-Legendre rule, with the error estimated by comparing the
/// panel to its two halves. Endpoints are never evaluated, so integrable
/// endpoint singularities converge. Throws QuadratureFailure past
/// `max_intervals` or when an interval can no longer be split.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           QuadratureOptions opts = {});

}  // namespace evchar
