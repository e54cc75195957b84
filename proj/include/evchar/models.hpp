#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evchar/sample.hpp"

namespace evchar {

enum class Domain { Gumbel, Frechet, Weibull, None };

std::string_view to_string(Domain d) noexcept;

using ModelParams = std::map<std::string, double>;

struct ClosedFormMoments {
  std::function<double(double)> r;
  std::function<double(double)> w;
};

/// An analytic distribution with everything the Monte Carlo oracles need.
///
/// `cdf`, `survival`, `upper_quantile` and `endpoint` live on the model's
/// native scale: the raw variable X for ordinary models, or Y = log X when
/// `log_scale` is set (the model then describes G(y) = F(e^y) directly).
/// `upper_quantile(u)` is the generalized inverse evaluated at 1 - u, which
/// stays accurate for the tiny u that produce the extremes.
/// `true_domain` and `true_gamma` always refer to the raw F.
struct QuantileModel {
  std::string name;
  ModelParams params;
  std::function<double(double)> cdf;
  std::function<double(double)> survival;
  std::function<double(double)> upper_quantile;
  std::function<double(double)> log_upper_quantile;  // log-scale observation for draw u
  Domain true_domain = Domain::None;
  std::optional<double> true_gamma;
  std::optional<double> endpoint;
  bool log_scale = false;
  // Native-scale moments of order p are finite iff p < this index.
  std::optional<double> moment_index;
  std::optional<ClosedFormMoments> closed_form;

  double quantile(double u) const { return upper_quantile(1.0 - u); }
  std::optional<double> log_endpoint() const;
  std::string label() const;
};

/// Catalog: gev(gamma[, loc]), gumbel([loc]), frechet(gamma),
/// weibull_law(beta[, loc]), pareto_log(gamma), exponential([rate]), uniform,
/// bounded_power(gamma[, y0]), lognormal([mu, sigma]), mason_counterexample.
QuantileModel builtin_model(std::string_view name, const ModelParams& params = {});

std::vector<std::string> builtin_model_names();

/// The first n draws in generation order on the model's native scale
/// (raw X, or Y for log-scale models).
std::vector<double> draw(const QuantileModel& model, std::size_t n, std::uint64_t seed);

/// Deterministic inverse-transform sample: u_i = counter_uniform(seed, i)
/// for i = 0..n-1, mapped through the model's upper quantile, logged for
/// raw-scale models, then sorted.
SortedLogSample sample(const QuantileModel& model, std::size_t n, std::uint64_t seed);

enum class MomentMethod { automatic, closed_form, quadrature };

/// (1 - F(x))^{-1} * integral_x^{y0} (1 - F(t)) dt on the model's native scale.
double r_moment(const QuantileModel& model, double x, MomentMethod method = MomentMethod::automatic);

/// (1 - F(x))^{-1} * double integral over x <= y <= t <= y0 of (1 - F(t)).
double w_moment(const QuantileModel& model, double x, MomentMethod method = MomentMethod::automatic);

/// Limit of W / R^2: 1 for Gumbel and Frechet, (gamma+1)/(gamma+2) for Weibull.
double ratio_limit(Domain domain, std::optional<double> gamma = std::nullopt);

/// K^{-1/2}, the limit of the ratio statistic t1.
double c_limit(Domain domain, std::optional<double> gamma = std::nullopt);

struct MomentOracle {
  std::function<double(double)> r;
  std::function<double(double)> w;
  double ratio_limit = 1.0;
  MomentMethod method = MomentMethod::quadrature;
};

MomentOracle moment_oracle(const QuantileModel& model);

}  // namespace evchar
