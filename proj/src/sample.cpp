#include "evchar/sample.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <fmt/core.h>

#include "evchar/error.hpp"

namespace evchar {

SortedLogSample SortedLogSample::from_observations(std::span<const double> data, SourceScale scale) {
  if (data.empty()) throw Error(ErrorCode::EmptyInput, "no observations");
  std::vector<double> values;
  values.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double x = data[i];
    if (!std::isfinite(x))
      throw Error(ErrorCode::NonFiniteInput, fmt::format("observation {} is not finite", i + 1));
    if (scale == SourceScale::raw_positive) {
      if (x <= 0.0)
        throw Error(ErrorCode::NonPositiveObservation,
                    fmt::format("observation {} = {} is not positive", i + 1, x));
      values.push_back(std::log(x));
    } else {
      values.push_back(x);
    }
  }
  if (values.size() < 3)
    throw Error(ErrorCode::SampleTooSmall,
                fmt::format("need at least 3 observations, got {}", values.size()));
  std::sort(values.begin(), values.end());
  return SortedLogSample(std::move(values), scale);
}

SortedLogSample SortedLogSample::from_log_values(std::vector<double> values, SourceScale provenance) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "no observations");
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!std::isfinite(values[i]))
      throw Error(ErrorCode::NonFiniteInput, fmt::format("value {} is not finite", i + 1));
  if (values.size() < 3)
    throw Error(ErrorCode::SampleTooSmall,
                fmt::format("need at least 3 observations, got {}", values.size()));
  std::sort(values.begin(), values.end());
  return SortedLogSample(std::move(values), provenance);
}

double SortedLogSample::order_stat(std::size_t j) const {
  if (j < 1 || j > values_.size())
    throw Error(ErrorCode::IndexOutOfRange, fmt::format("order statistic {} of {}", j, values_.size()));
  return values_[j - 1];
}

double SortedLogSample::upper(std::size_t i) const {
  if (i >= values_.size())
    throw Error(ErrorCode::IndexOutOfRange, fmt::format("upper index {} of {}", i, values_.size()));
  return values_[values_.size() - 1 - i];
}

double SortedLogSample::spacing(std::size_t i) const {
  const std::size_t n = values_.size();
  if (i < 1 || i >= n) throw Error(ErrorCode::IndexOutOfRange, fmt::format("spacing {} of {}", i, n));
  return values_[n - i] - values_[n - i - 1];
}

IndexSchedule IndexSchedule::make(double alpha, double beta, double delta, std::optional<double> v) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidSchedule, msg); };
  if (!(0.5 < beta && beta < alpha && alpha < 1.0))
    fail(fmt::format("need 1/2 < beta < alpha < 1 (alpha={}, beta={})", alpha, beta));
  if (!(0.0 < delta && delta < 0.5)) fail(fmt::format("need 0 < delta < 1/2 (delta={})", delta));
  if (!(delta + beta - 1.0 > 0.0))
    fail(fmt::format("need delta + beta > 1 (delta={}, beta={})", delta, beta));
  const double vv = v ? *v : derived_v(alpha, beta, delta);
  if (!(vv > 0.0) || !std::isfinite(vv)) fail(fmt::format("need v > 0 (v={})", vv));
  return IndexSchedule(alpha, beta, delta, vv);
}

double IndexSchedule::derived_v(double alpha, double beta, double delta) noexcept {
  return 0.5 * std::min(1.0 - alpha, delta + beta - 1.0);
}

std::size_t floor_power(std::size_t n, double exponent) {
  const double p = std::pow(static_cast<double>(n), exponent);
  double f = std::floor(p);
  // pow(10000, 0.75) may come back as 999.9999999999999
  const double nearest = std::round(p);
  if (nearest > f && nearest - p < 1e-9 * std::max(1.0, p)) f = nearest;
  const double hi = static_cast<double>(n > 1 ? n - 1 : 1);
  return static_cast<std::size_t>(std::clamp(f, 1.0, hi));
}

IndexPair derive_indices(const IndexSchedule& schedule, std::size_t n) {
  if (n < 3) throw Error(ErrorCode::SampleTooSmall, fmt::format("n = {} < 3", n));
  const IndexPair idx{floor_power(n, schedule.alpha()), floor_power(n, schedule.beta())};
  if (idx.l >= idx.k)
    throw Error(ErrorCode::DegenerateSchedule,
                fmt::format("l = {} >= k = {} at n = {}", idx.l, idx.k, n));
  return idx;
}

std::size_t derive_k(const IndexSchedule& schedule, std::size_t n) { return derive_indices(schedule, n).k; }

std::size_t derive_l(const IndexSchedule& schedule, std::size_t n) { return derive_indices(schedule, n).l; }

void check_indices(const SortedLogSample& sample, std::size_t k, std::size_t l) {
  if (!(1 <= l && l <= k && k < sample.size()))
    throw Error(ErrorCode::IndexOutOfRange,
                fmt::format("need 1 <= l <= k < n (k={}, l={}, n={})", k, l, sample.size()));
}

TailIntegralValue tail_integral_single(const SortedLogSample& sample, std::size_t k, std::size_t l) {
  check_indices(sample, k, l);
  double sum = 0.0;
  for (std::size_t i = l; i <= k; ++i) sum += static_cast<double>(i) * sample.spacing(i);
  return {sum, sample.upper(k), sample.upper(l - 1), IntegralOrder::single};
}

TailIntegralValue tail_integral_double(const SortedLogSample& sample, std::size_t k, std::size_t l) {
  check_indices(sample, k, l);
  double sum = 0.0;
  double inner = 0.0;  // sum_{j=l}^{i-1} j * spacing(j)
  for (std::size_t i = l; i <= k; ++i) {
    const double d = sample.spacing(i);
    const double w = static_cast<double>(i) * d;
    sum += d * (inner + 0.5 * w);
    inner += w;
  }
  return {sum, sample.upper(k), sample.upper(l - 1), IntegralOrder::double_};
}

}  // namespace evchar
