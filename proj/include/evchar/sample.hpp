#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace evchar {

enum class SourceScale { raw_positive, already_log };

/// Ascending log-scale observations y_1 <= ... <= y_n, n >= 3.
///
/// Order statistics are addressed 1-based to keep index arithmetic such as
/// y_{n-k} readable at call sites. `spacing(i)` is the i-th upper spacing
/// y_{n-i+1} - y_{n-i}, defined for 1 <= i <= n-1.
class SortedLogSample {
 public:
  static SortedLogSample from_observations(std::span<const double> data, SourceScale scale);
  // Values already on the log scale; `provenance` records where they came from.
  static SortedLogSample from_log_values(std::vector<double> values, SourceScale provenance);

  std::size_t size() const noexcept { return values_.size(); }
  SourceScale source_scale() const noexcept { return scale_; }
  std::span<const double> values() const noexcept { return values_; }

  double order_stat(std::size_t j) const;  // y_j, 1 <= j <= n
  double upper(std::size_t i) const;       // y_{n-i}, 0 <= i <= n-1
  double spacing(std::size_t i) const;     // y_{n-i+1} - y_{n-i}
  double max() const noexcept { return values_.back(); }

 private:
  SortedLogSample(std::vector<double> values, SourceScale scale)
      : values_(std::move(values)), scale_(scale) {}

  std::vector<double> values_;
  SourceScale scale_;
};

struct IndexPair {
  std::size_t k = 0;
  std::size_t l = 0;
};

/// Exponents of the intermediate sequences k = floor(n^alpha), l = floor(n^beta).
class IndexSchedule {
 public:
  /// Validates 1/2 < beta < alpha < 1, 0 < delta < 1/2, delta + beta > 1.
  /// When `v` is absent it is derived from 2v = min(1 - alpha, delta + beta - 1).
  static IndexSchedule make(double alpha, double beta, double delta,
                            std::optional<double> v = std::nullopt);

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  double delta() const noexcept { return delta_; }
  double v() const noexcept { return v_; }

  static double derived_v(double alpha, double beta, double delta) noexcept;

 private:
  IndexSchedule(double alpha, double beta, double delta, double v)
      : alpha_(alpha), beta_(beta), delta_(delta), v_(v) {}

  double alpha_;
  double beta_;
  double delta_;
  double v_;
};

// floor(n^exponent) clamped to [1, n-1], robust to pow() landing just below an
// exact integer.
std::size_t floor_power(std::size_t n, double exponent);

// Both throw DegenerateSchedule when l >= k at this n.
std::size_t derive_k(const IndexSchedule& schedule, std::size_t n);
std::size_t derive_l(const IndexSchedule& schedule, std::size_t n);
IndexPair derive_indices(const IndexSchedule& schedule, std::size_t n);

enum class IntegralOrder { single, double_ };

struct TailIntegralValue {
  double value = 0.0;
  double lower = 0.0;  // y_{n-k}
  double upper = 0.0;  // y_{n-l+1}
  IntegralOrder order = IntegralOrder::single;
};

// Checks 1 <= l <= k < n, throwing IndexOutOfRange otherwise.
void check_indices(const SortedLogSample& sample, std::size_t k, std::size_t l);

/// n * integral of (1 - G_n) over [y_{n-k}, y_{n-l+1}], i.e.
/// sum_{i=l}^{k} i * spacing(i).
TailIntegralValue tail_integral_single(const SortedLogSample& sample, std::size_t k, std::size_t l);

/// n * double integral of (1 - G_n(t)) over x <= y <= t <= z, i.e.
/// sum_{i=l}^{k} sum_{j=l}^{i} j (1 - [i==j]/2) spacing(i) spacing(j).
/// Evaluated in O(k) with a running inner sum.
TailIntegralValue tail_integral_double(const SortedLogSample& sample, std::size_t k, std::size_t l);

}  // namespace evchar
