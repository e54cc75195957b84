#include "evchar/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include <fmt/core.h>

#include "evchar/error.hpp"

namespace evchar {
namespace {

constexpr std::array<double, 7> kNodes = {
    -0.9491079123427585, -0.7415311855993945, -0.4058451513773972, 0.0,
    0.4058451513773972,  0.7415311855993945,  0.9491079123427585};
constexpr std::array<double, 7> kWeights = {
    0.1294849661688697, 0.2797053914892766, 0.3818300505051189, 0.4179591836734694,
    0.3818300505051189, 0.2797053914892766, 0.1294849661688697};

double panel(const std::function<double(double)>& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double s = 0.0;
  for (std::size_t i = 0; i < kNodes.size(); ++i) s += kWeights[i] * f(mid + half * kNodes[i]);
  return s * half;
}

struct Piece {
  double a, b;
  double value;  // left + right halves
  double left, right;
  double error;
  bool operator<(const Piece& o) const { return error < o.error; }
};

Piece refine(const std::function<double(double)>& f, double a, double b, double whole) {
  const double m = 0.5 * (a + b);
  const double left = panel(f, a, m);
  const double right = panel(f, m, b);
  if (!std::isfinite(left) || !std::isfinite(right))
    throw Error(ErrorCode::QuadratureFailure, fmt::format("non-finite integrand on [{}, {}]", a, b));
  return {a, b, left + right, left, right, std::abs(left + right - whole)};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           QuadratureOptions opts) {
  QuadratureResult res;
  if (a == b) return res;
  std::priority_queue<Piece> heap;
  heap.push(refine(f, a, b, panel(f, a, b)));
  double total_error = heap.top().error;
  std::size_t intervals = 1;
  while (total_error > opts.abs_tol) {
    if (++intervals > opts.max_intervals)
      throw Error(ErrorCode::QuadratureFailure,
                  fmt::format("more than {} subintervals on [{}, {}]", opts.max_intervals, a, b));
    const Piece worst = heap.top();
    heap.pop();
    const double m = 0.5 * (worst.a + worst.b);
    if (!(worst.a < m && m < worst.b))
      throw Error(ErrorCode::QuadratureFailure,
                  fmt::format("interval near {} cannot be subdivided further", worst.a));
    Piece lo = refine(f, worst.a, m, worst.left);
    Piece hi = refine(f, m, worst.b, worst.right);
    total_error += lo.error + hi.error - worst.error;
    heap.push(lo);
    heap.push(hi);
  }
  // Sum in a fixed order so the result does not depend on heap layout.
  std::vector<Piece> pieces;
  pieces.reserve(heap.size());
  while (!heap.empty()) {
    pieces.push_back(heap.top());
    heap.pop();
  }
  std::sort(pieces.begin(), pieces.end(), [](const Piece& x, const Piece& y) { return x.a < y.a; });
  for (const auto& p : pieces) {
    res.value += p.value;
    res.error_estimate += p.error;
  }
  res.intervals = intervals;
  return res;
}

}  // namespace evchar
