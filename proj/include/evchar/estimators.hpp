#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evchar/sample.hpp"

namespace evchar {

// T_n(2,k,l) = k^{-1} sum_{i=l}^{k} i * spacing(i). At l = 1 this is the
// classic Hill estimator on the log scale.
double hill(const SortedLogSample& sample, std::size_t k, std::size_t l);

// A_n(1,k,l): the double tail integral divided by k.
double a_stat(const SortedLogSample& sample, std::size_t k, std::size_t l);

// Second empirical moment of the top-k excesses over y_{n-k}.
double dekkers_moment(const SortedLogSample& sample, std::size_t k);

// hill / sqrt(a_stat); throws DegenerateSample when a_stat is zero.
double ratio_stat(const SortedLogSample& sample, std::size_t k, std::size_t l);

// (y_n - y_{n-k}) / log k, k >= 2.
double dehaan_resnick(const SortedLogSample& sample, std::size_t k);

// k^{-tau} sum_{i=1}^{k} i^tau * spacing(i); tau = 1 gives hill(k, 1).
double diop_lo(const SortedLogSample& sample, std::size_t k, double tau);

struct IdentitySides {
  double lhs = 0.0;  // sum_{i=1}^{k} (x_{n-i+1} - x_{n-k})^2
  double rhs = 0.0;  // 2 sum_i sum_{j<=i} j (1 - [i==j]/2) D_i D_j
  double gap() const;
};

// Both sides of the spacing identity for an arbitrary (unsorted is fine)
// real sequence. Requires 1 <= k < values.size().
IdentitySides spacings_identity_sides(std::span<const double> values, std::size_t k);
double spacings_identity_gap(std::span<const double> values, std::size_t k);

enum class VectorCondition {
  DegenerateSample,  // A_n(1,k,l) = 0, t1 undefined
  ZeroSpread,        // z_n = x_n, t6..t8 undefined
  ZeroEndpointGap,   // y0 = x_n, t9 undefined
};

std::string to_string(VectorCondition c);

/// The nine-component statistic vector plus the indices it was built from.
///
/// Components that are undefined on this sample are left empty and the
/// cause is listed in `conditions`; nothing is replaced by an infinity.
struct EcsfextVector {
  std::optional<double> t1;
  double t2 = 0.0;
  double t3 = 0.0;
  double t4 = 0.0;
  double t5 = 0.0;
  std::optional<double> t6;
  std::optional<double> t7;
  std::optional<double> t8;
  std::optional<double> t8_half;  // t8 with exponent beta/2 in place of v
  std::optional<double> t9;

  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t l = 0;
  double v = 0.0;
  double beta = 0.0;
  double a_n = 0.0;  // A_n(1,k,l) behind t1
  double x_n = 0.0;  // y_{n-k}
  double z_n = 0.0;  // y_{n-l}
  std::optional<double> y0_used;
  std::vector<VectorCondition> conditions;

  bool complete() const { return conditions.empty(); }
  bool has(VectorCondition c) const;
  // Throws the typed error behind the first recorded condition, if any.
  void require_complete() const;
};

// Uses explicit indices; `beta` only feeds t8_half.
EcsfextVector ecsfext_vector(const SortedLogSample& sample, IndexPair idx, double v, double beta,
                             std::optional<double> y0 = std::nullopt);

EcsfextVector ecsfext_vector(const SortedLogSample& sample, const IndexSchedule& schedule,
                             std::optional<double> y0 = std::nullopt);

}  // namespace evchar
