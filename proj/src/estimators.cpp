#include "evchar/estimators.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "evchar/error.hpp"

namespace evchar {

double hill(const SortedLogSample& sample, std::size_t k, std::size_t l) {
  return tail_integral_single(sample, k, l).value / static_cast<double>(k);
}

double a_stat(const SortedLogSample& sample, std::size_t k, std::size_t l) {
  return tail_integral_double(sample, k, l).value / static_cast<double>(k);
}

double dekkers_moment(const SortedLogSample& sample, std::size_t k) {
  check_indices(sample, k, 1);
  const double base = sample.upper(k);
  double sum = 0.0;
  for (std::size_t j = 1; j <= k; ++j) {
    const double e = sample.upper(j - 1) - base;
    sum += e * e;
  }
  return sum / static_cast<double>(k);
}

double ratio_stat(const SortedLogSample& sample, std::size_t k, std::size_t l) {
  const double a = a_stat(sample, k, l);
  if (!(a > 0.0))
    throw Error(ErrorCode::DegenerateSample, fmt::format("A_n(1,{},{}) = 0: no spread in range", k, l));
  return hill(sample, k, l) / std::sqrt(a);
}

double dehaan_resnick(const SortedLogSample& sample, std::size_t k) {
  if (k < 2) throw Error(ErrorCode::KTooSmall, fmt::format("need k >= 2 so that log k > 0 (k={})", k));
  check_indices(sample, k, 1);
  return (sample.max() - sample.upper(k)) / std::log(static_cast<double>(k));
}

double diop_lo(const SortedLogSample& sample, std::size_t k, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw Error(ErrorCode::InvalidParameter, fmt::format("tau must be positive (tau={})", tau));
  check_indices(sample, k, 1);
  double sum = 0.0;
  for (std::size_t i = 1; i <= k; ++i) sum += std::pow(static_cast<double>(i), tau) * sample.spacing(i);
  return sum / std::pow(static_cast<double>(k), tau);
}

double IdentitySides::gap() const { return std::abs(lhs - rhs); }

IdentitySides spacings_identity_sides(std::span<const double> values, std::size_t k) {
  const std::size_t n = values.size();
  if (!(1 <= k && k < n))
    throw Error(ErrorCode::IndexOutOfRange, fmt::format("need 1 <= k < length (k={}, length={})", k, n));
  // x_{n-i} in 1-based notation is values[n-1-i].
  auto x = [&](std::size_t i) { return values[n - 1 - i]; };
  IdentitySides s;
  const double base = x(k);
  double inner = 0.0;
  for (std::size_t i = 1; i <= k; ++i) {
    const double e = x(i - 1) - base;
    s.lhs += e * e;
    const double d = x(i - 1) - x(i);
    const double w = static_cast<double>(i) * d;
    s.rhs += d * (inner + 0.5 * w);
    inner += w;
  }
  s.rhs *= 2.0;
  return s;
}

double spacings_identity_gap(std::span<const double> values, std::size_t k) {
  return spacings_identity_sides(values, k).gap();
}

std::string to_string(VectorCondition c) {
  switch (c) {
    case VectorCondition::DegenerateSample: return "DegenerateSample";
    case VectorCondition::ZeroSpread: return "ZeroSpread";
    case VectorCondition::ZeroEndpointGap: return "ZeroEndpointGap";
  }
  return "Unknown";
}

bool EcsfextVector::has(VectorCondition c) const {
  return std::find(conditions.begin(), conditions.end(), c) != conditions.end();
}

void EcsfextVector::require_complete() const {
  if (conditions.empty()) return;
  switch (conditions.front()) {
    case VectorCondition::DegenerateSample:
      throw Error(ErrorCode::DegenerateSample, "A_n(1,k,l) = 0, T1 undefined");
    case VectorCondition::ZeroSpread:
      throw Error(ErrorCode::ZeroSpread, "z_n = x_n, T6..T8 undefined");
    case VectorCondition::ZeroEndpointGap:
      throw Error(ErrorCode::ZeroSpread, "y0 = x_n, T9 undefined");
  }
}

EcsfextVector ecsfext_vector(const SortedLogSample& sample, IndexPair idx, double v, double beta,
                             std::optional<double> y0) {
  const std::size_t k = idx.k;
  const std::size_t l = idx.l;
  check_indices(sample, k, l);
  const std::size_t n = sample.size();
  if (y0 && *y0 < sample.max())
    throw Error(ErrorCode::EndpointBelowMaximum,
                fmt::format("y0 = {} is below the sample maximum {}", *y0, sample.max()));

  EcsfextVector out;
  out.n = n;
  out.k = k;
  out.l = l;
  out.v = v;
  out.beta = beta;
  out.y0_used = y0;
  out.x_n = sample.upper(k);
  out.z_n = sample.upper(l);
  const double spread = out.z_n - out.x_n;
  const double nd = static_cast<double>(n);

  out.t2 = hill(sample, k, l);
  out.a_n = a_stat(sample, k, l);
  if (out.a_n > 0.0)
    out.t1 = out.t2 / std::sqrt(out.a_n);
  else
    out.conditions.push_back(VectorCondition::DegenerateSample);

  // t2 = 0 forces every spacing in [l, k] to vanish, hence spread = 0 too.
  out.t3 = out.t2 > 0.0 ? std::pow(nd, -v) * spread / out.t2 : 0.0;
  out.t4 = sample.max();
  out.t5 = hill(sample, l, 1);

  if (spread > 0.0) {
    out.t6 = out.t5 / spread;
    out.t7 = a_stat(sample, l, 1) / (spread * spread);
    out.t8 = std::pow(nd, -v) / spread;
    out.t8_half = std::pow(nd, -0.5 * beta) / spread;
  } else {
    out.conditions.push_back(VectorCondition::ZeroSpread);
  }

  if (y0) {
    const double denom = *y0 - out.x_n;
    if (denom > 0.0)
      out.t9 = (*y0 - out.z_n) / denom;
    else
      out.conditions.push_back(VectorCondition::ZeroEndpointGap);
  }
  return out;
}

EcsfextVector ecsfext_vector(const SortedLogSample& sample, const IndexSchedule& schedule,
                             std::optional<double> y0) {
  return ecsfext_vector(sample, derive_indices(schedule, sample.size()), schedule.v(), schedule.beta(), y0);
}

}  // namespace evchar
