#include "evchar/models.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include <boost/math/special_functions/erf.hpp>
#include <fmt/core.h>

#include "evchar/error.hpp"
#include "evchar/quadrature.hpp"
#include "evchar/rng.hpp"

namespace evchar {

std::string_view to_string(Domain d) noexcept {
  switch (d) {
    case Domain::Gumbel: return "Gumbel";
    case Domain::Frechet: return "Frechet";
    case Domain::Weibull: return "Weibull";
    case Domain::None: return "None";
  }
  return "None";
}

std::optional<double> QuantileModel::log_endpoint() const {
  if (!endpoint) return std::nullopt;
  if (log_scale) return endpoint;
  if (*endpoint <= 0.0) return std::nullopt;
  return std::log(*endpoint);
}

std::string QuantileModel::label() const {
  std::string out = name;
  if (params.empty()) return out;
  out += "(";
  bool first = true;
  for (const auto& [key, value] : params) {
    if (!first) out += ",";
    out += fmt::format("{}={}", key, value);
    first = false;
  }
  return out + ")";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMasonMaxKnot = 62;

class ParamReader {
 public:
  ParamReader(std::string_view model, const ModelParams& params) : model_(model), params_(params) {}

  double get(const std::string& key, std::optional<double> fallback = std::nullopt) {
    used_.insert(key);
    auto it = params_.find(key);
    if (it != params_.end()) {
      if (!std::isfinite(it->second))
        throw Error(ErrorCode::InvalidParameter, fmt::format("{}: {} must be finite", model_, key));
      return it->second;
    }
    if (!fallback)
      throw Error(ErrorCode::InvalidParameter, fmt::format("{}: missing parameter '{}'", model_, key));
    return *fallback;
  }

  double positive(const std::string& key, std::optional<double> fallback = std::nullopt) {
    const double v = get(key, fallback);
    if (!(v > 0.0))
      throw Error(ErrorCode::InvalidParameter, fmt::format("{}: {} must be > 0 (got {})", model_, key, v));
    return v;
  }

  // Rejects keys the model does not understand.
  void finish() const {
    for (const auto& [key, value] : params_)
      if (!used_.count(key))
        throw Error(ErrorCode::InvalidParameter, fmt::format("{}: unknown parameter '{}'", model_, key));
  }

 private:
  std::string_view model_;
  const ModelParams& params_;
  std::set<std::string> used_;
};

// -log(1 - u), accurate for small u.
double neg_log1m(double u) { return -std::log1p(-u); }

void default_log_quantile(QuantileModel& m) {
  if (m.log_upper_quantile) return;
  if (m.log_scale) {
    m.log_upper_quantile = m.upper_quantile;
  } else {
    auto q = m.upper_quantile;
    m.log_upper_quantile = [q](double u) {
      const double x = q(u);
      return x > 0.0 ? std::log(x) : std::numeric_limits<double>::quiet_NaN();
    };
  }
}

QuantileModel make_exponential(ParamReader& p) {
  const double rate = p.positive("rate", 1.0);
  QuantileModel m;
  m.survival = [rate](double x) { return x <= 0.0 ? 1.0 : std::exp(-rate * x); };
  m.cdf = [rate](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); };
  m.upper_quantile = [rate](double u) { return -std::log(u) / rate; };
  m.log_upper_quantile = [rate](double u) { return std::log(-std::log(u)) - std::log(rate); };
  m.true_domain = Domain::Gumbel;
  m.closed_form = ClosedFormMoments{[rate](double) { return 1.0 / rate; },
                                    [rate](double) { return 1.0 / (rate * rate); }};
  return m;
}

QuantileModel make_bounded_power(double gamma, double y0) {
  QuantileModel m;
  m.survival = [gamma, y0](double x) {
    if (x <= 0.0) return 1.0;
    if (x >= y0) return 0.0;
    return std::pow((y0 - x) / y0, gamma);
  };
  m.cdf = [s = m.survival](double x) { return 1.0 - s(x); };
  m.upper_quantile = [gamma, y0](double u) { return y0 * (1.0 - std::pow(u, 1.0 / gamma)); };
  m.log_upper_quantile = [gamma, y0](double u) {
    return std::log(y0) + std::log1p(-std::pow(u, 1.0 / gamma));
  };
  m.true_domain = Domain::Weibull;
  m.true_gamma = gamma;
  m.endpoint = y0;
  m.closed_form = ClosedFormMoments{
      [gamma, y0](double x) { return (y0 - x) / (gamma + 1.0); },
      [gamma, y0](double x) { return (y0 - x) * (y0 - x) / ((gamma + 1.0) * (gamma + 2.0)); }};
  return m;
}

QuantileModel make_uniform() {
  QuantileModel m = make_bounded_power(1.0, 1.0);
  m.survival = [](double x) { return x <= 0.0 ? 1.0 : (x >= 1.0 ? 0.0 : 1.0 - x); };
  m.cdf = [](double x) { return x <= 0.0 ? 0.0 : (x >= 1.0 ? 1.0 : x); };
  m.upper_quantile = [](double u) { return 1.0 - u; };
  m.log_upper_quantile = [](double u) { return std::log1p(-u); };
  return m;
}

QuantileModel make_frechet(ParamReader& p) {
  const double gamma = p.positive("gamma");
  QuantileModel m;
  m.cdf = [gamma](double x) { return x <= 0.0 ? 0.0 : std::exp(-std::pow(x, -gamma)); };
  m.survival = [gamma](double x) { return x <= 0.0 ? 1.0 : -std::expm1(-std::pow(x, -gamma)); };
  m.upper_quantile = [gamma](double u) { return std::pow(neg_log1m(u), -1.0 / gamma); };
  m.log_upper_quantile = [gamma](double u) { return -std::log(neg_log1m(u)) / gamma; };
  m.true_domain = Domain::Frechet;
  m.true_gamma = gamma;
  m.moment_index = gamma;
  return m;
}

QuantileModel make_gev(ParamReader& p) {
  const double xi = p.get("gamma");
  const double loc = p.get("loc", 0.0);
  QuantileModel m;
  if (xi == 0.0) {
    m.cdf = [loc](double x) { return std::exp(-std::exp(-(x - loc))); };
    m.survival = [loc](double x) { return -std::expm1(-std::exp(-(x - loc))); };
    m.upper_quantile = [loc](double u) { return loc - std::log(neg_log1m(u)); };
    m.true_domain = Domain::Gumbel;
    return m;
  }
  // (1 + xi t)^{-1/xi} through log1p so that small |xi| approaches exp(-t).
  auto tail_power = [xi, loc](double x) {
    const double t = 1.0 + xi * (x - loc);
    if (t <= 0.0) return xi > 0.0 ? kInf : 0.0;
    return std::exp(-std::log1p(xi * (x - loc)) / xi);
  };
  m.cdf = [tail_power](double x) { return std::exp(-tail_power(x)); };
  m.survival = [tail_power](double x) { return -std::expm1(-tail_power(x)); };
  m.upper_quantile = [xi, loc](double u) {
    return loc + std::expm1(-xi * std::log(neg_log1m(u))) / xi;
  };
  if (xi > 0.0) {
    m.true_domain = Domain::Frechet;
    m.true_gamma = 1.0 / xi;
    m.moment_index = 1.0 / xi;
  } else {
    m.true_domain = Domain::Weibull;
    m.true_gamma = -1.0 / xi;
    m.endpoint = loc - 1.0 / xi;
  }
  return m;
}

QuantileModel make_gumbel(ParamReader& p) {
  const double loc = p.get("loc", 0.0);
  QuantileModel m;
  m.cdf = [loc](double x) { return std::exp(-std::exp(-(x - loc))); };
  m.survival = [loc](double x) { return -std::expm1(-std::exp(-(x - loc))); };
  m.upper_quantile = [loc](double u) { return loc - std::log(neg_log1m(u)); };
  m.true_domain = Domain::Gumbel;
  return m;
}

QuantileModel make_weibull_law(ParamReader& p) {
  const double beta = p.positive("beta");
  const double loc = p.get("loc", 0.0);
  QuantileModel m;
  m.cdf = [beta, loc](double x) { return x >= loc ? 1.0 : std::exp(-std::pow(loc - x, beta)); };
  m.survival = [beta, loc](double x) { return x >= loc ? 0.0 : -std::expm1(-std::pow(loc - x, beta)); };
  m.upper_quantile = [beta, loc](double u) { return loc - std::pow(neg_log1m(u), 1.0 / beta); };
  m.true_domain = Domain::Weibull;
  m.true_gamma = beta;
  m.endpoint = loc;
  return m;
}

QuantileModel make_pareto_log(ParamReader& p) {
  const double gamma = p.positive("gamma");
  QuantileModel m;
  m.log_scale = true;
  m.survival = [gamma](double y) { return y <= 0.0 ? 1.0 : std::exp(-gamma * y); };
  m.cdf = [gamma](double y) { return y <= 0.0 ? 0.0 : -std::expm1(-gamma * y); };
  m.upper_quantile = [gamma](double u) { return -std::log(u) / gamma; };
  m.true_domain = Domain::Frechet;
  m.true_gamma = gamma;
  m.closed_form = ClosedFormMoments{[gamma](double) { return 1.0 / gamma; },
                                    [gamma](double) { return 1.0 / (gamma * gamma); }};
  return m;
}

QuantileModel make_lognormal(ParamReader& p) {
  const double mu = p.get("mu", 0.0);
  const double sigma = p.positive("sigma", 1.0);
  QuantileModel m;
  auto z = [mu, sigma](double x) { return (std::log(x) - mu) / (sigma * std::numbers::sqrt2); };
  m.cdf = [z](double x) { return x <= 0.0 ? 0.0 : 0.5 * std::erfc(-z(x)); };
  m.survival = [z](double x) { return x <= 0.0 ? 1.0 : 0.5 * std::erfc(z(x)); };
  // Normal upper quantile: mu + sigma * sqrt(2) * erfc^{-1}(2u).
  m.log_upper_quantile = [mu, sigma](double u) {
    return mu + sigma * std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
  };
  m.upper_quantile = [lq = m.log_upper_quantile](double u) { return std::exp(lq(u)); };
  m.true_domain = Domain::Gumbel;
  return m;
}

double mason_upper_quantile(double u) {
  if (u >= 1.0) return 0.0;
  // Knot index m with 2^{-m-1} < u <= 2^{-m}.
  int exp2 = 0;
  const double frac = std::frexp(u, &exp2);  // u = frac * 2^exp2, frac in [0.5, 1)
  int m = frac == 0.5 ? 1 - exp2 : -exp2;
  if (m > kMasonMaxKnot) {
    m = kMasonMaxKnot;
    u = std::ldexp(1.0, -m - 1);
  }
  return m + (std::ldexp(1.0, -m) - u) * std::ldexp(1.0, m + 1);
}

double mason_survival(double y) {
  if (y <= 0.0) return 1.0;
  const double m = std::floor(y);
  return std::ldexp(1.0 - 0.5 * (y - m), -static_cast<int>(m));
}

QuantileModel make_mason() {
  QuantileModel m;
  m.log_scale = true;
  m.survival = mason_survival;
  m.cdf = [](double y) { return 1.0 - mason_survival(y); };
  m.upper_quantile = mason_upper_quantile;
  m.true_domain = Domain::None;
  return m;
}

}  // namespace

QuantileModel builtin_model(std::string_view name, const ModelParams& params) {
  ParamReader p(name, params);
  QuantileModel m;
  if (name == "exponential") {
    m = make_exponential(p);
  } else if (name == "uniform") {
    m = make_uniform();
  } else if (name == "bounded_power") {
    const double gamma = p.positive("gamma");
    m = make_bounded_power(gamma, p.positive("y0", 1.0));
  } else if (name == "frechet") {
    m = make_frechet(p);
  } else if (name == "gev") {
    m = make_gev(p);
  } else if (name == "gumbel") {
    m = make_gumbel(p);
  } else if (name == "weibull_law") {
    m = make_weibull_law(p);
  } else if (name == "pareto_log") {
    m = make_pareto_log(p);
  } else if (name == "lognormal") {
    m = make_lognormal(p);
  } else if (name == "mason_counterexample") {
    m = make_mason();
  } else {
    throw Error(ErrorCode::UnknownModel, fmt::format("no built-in model named '{}'", name));
  }
  p.finish();
  m.name = std::string(name);
  m.params = params;
  default_log_quantile(m);
  return m;
}

std::vector<std::string> builtin_model_names() {
  return {"gev",         "gumbel",    "frechet",   "weibull_law",
          "pareto_log",  "exponential", "uniform", "bounded_power",
          "lognormal",   "mason_counterexample"};
}

std::vector<double> draw(const QuantileModel& model, std::size_t n, std::uint64_t seed) {
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = model.upper_quantile(counter_uniform(seed, i));
  return xs;
}

SortedLogSample sample(const QuantileModel& model, std::size_t n, std::uint64_t seed) {
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = counter_uniform(seed, i);
    const double y = model.log_upper_quantile(u);
    if (!std::isfinite(y)) {
      if (!model.log_scale)
        throw Error(ErrorCode::NonPositiveObservation,
                    fmt::format("{} produced non-positive draw {} (u={}); shift it with 'loc'",
                                model.label(), model.upper_quantile(u), u));
      throw Error(ErrorCode::NonFiniteInput, fmt::format("{} produced a non-finite draw", model.label()));
    }
    ys[i] = y;
  }
  return SortedLogSample::from_log_values(std::move(ys),
                                          model.log_scale ? SourceScale::already_log : SourceScale::raw_positive);
}

namespace {

double checked_tail(const QuantileModel& model, double x) {
  if (model.endpoint && x >= *model.endpoint)
    throw Error(ErrorCode::BeyondEndpoint,
                fmt::format("x = {} is not below the endpoint {} of {}", x, *model.endpoint, model.label()));
  const double tail = model.survival(x);
  if (!(tail > 0.0))
    throw Error(ErrorCode::VanishingTail, fmt::format("1 - F({}) = 0 for {}", x, model.label()));
  return tail;
}

bool use_closed_form(const QuantileModel& model, MomentMethod method) {
  if (method == MomentMethod::closed_form && !model.closed_form)
    throw Error(ErrorCode::InvalidParameter, fmt::format("{} has no closed-form moments", model.label()));
  return model.closed_form && method != MomentMethod::quadrature;
}

void require_moment(const QuantileModel& model, double order) {
  if (model.moment_index && *model.moment_index <= order)
    throw Error(ErrorCode::QuadratureFailure,
                fmt::format("moment of order {} diverges for {}", order, model.label()));
}

// integral_0^p (Q(1-u) - x)^power du; the t = Q(1-u) substitution turns the
// tail integral over [x, y0) into a finite u-range.
// Mean of (Q(1-u) - x)^power over u in (0, p), integrated as u = p s so the
// integrand stays O(R^power) however small the tail probability p is.
double excess_mean(const QuantileModel& model, double x, double p, int power) {
  auto f = [&](double s) {
    const double e = std::max(0.0, model.upper_quantile(p * s) - x);
    return power == 1 ? e : e * e;
  };
  const double coarse = integrate(f, 0.0, 1.0).value;
  if (!(coarse > 0.0)) return coarse;
  return integrate(f, 0.0, 1.0, {1e-11 * coarse, QuadratureOptions{}.max_intervals}).value;
}

}  // namespace

double r_moment(const QuantileModel& model, double x, MomentMethod method) {
  const double tail = checked_tail(model, x);
  if (use_closed_form(model, method)) return model.closed_form->r(x);
  require_moment(model, 1.0);
  return excess_mean(model, x, tail, 1);
}

double w_moment(const QuantileModel& model, double x, MomentMethod method) {
  const double tail = checked_tail(model, x);
  if (use_closed_form(model, method)) return model.closed_form->w(x);
  require_moment(model, 2.0);
  return 0.5 * excess_mean(model, x, tail, 2);
}

double ratio_limit(Domain domain, std::optional<double> gamma) {
  switch (domain) {
    case Domain::Gumbel:
    case Domain::Frechet: return 1.0;
    case Domain::Weibull:
      if (!gamma || !(*gamma > 0.0))
        throw Error(ErrorCode::InvalidParameter, "Weibull ratio limit needs gamma > 0");
      if (std::isinf(*gamma)) return 1.0;
      return (*gamma + 1.0) / (*gamma + 2.0);
    case Domain::None: break;
  }
  throw Error(ErrorCode::InvalidParameter, "no ratio limit outside the extremal domains");
}

double c_limit(Domain domain, std::optional<double> gamma) {
  return 1.0 / std::sqrt(ratio_limit(domain, gamma));
}

MomentOracle moment_oracle(const QuantileModel& model) {
  MomentOracle o;
  o.method = model.closed_form ? MomentMethod::closed_form : MomentMethod::quadrature;
  o.r = [model](double x) { return r_moment(model, x); };
  o.w = [model](double x) { return w_moment(model, x); };
  o.ratio_limit = model.true_domain == Domain::None ? std::numeric_limits<double>::quiet_NaN()
                                                    : ratio_limit(model.true_domain, model.true_gamma);
  return o;
}

}  // namespace evchar
