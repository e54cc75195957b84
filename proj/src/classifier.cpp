#include "evchar/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/core.h>

#include "evchar/error.hpp"
#include "evchar/rng.hpp"

namespace evchar {

void Tolerances::validate() const {
  if (!(eps_c > 0.0 && eps_zero > 0.0 && eps_small > 0.0))
    throw Error(ErrorCode::InvalidTolerances, "all tolerances must be strictly positive");
  if (!(eps_c < std::numbers::sqrt2 - 1.0))
    throw Error(ErrorCode::InvalidTolerances,
                fmt::format("eps_c = {} must be below sqrt(2) - 1 so the bands stay disjoint", eps_c));
  if (stability_window < 1) throw Error(ErrorCode::InvalidTolerances, "stability window must be >= 1");
}

std::string_view to_string(Label l) noexcept {
  switch (l) {
    case Label::Gumbel: return "Gumbel";
    case Label::Frechet: return "Frechet";
    case Label::Weibull: return "Weibull";
    case Label::Unclassified: return "Unclassified";
  }
  return "Unclassified";
}

std::string_view to_string(Clause c) noexcept {
  switch (c) {
    case Clause::none: return "none";
    case Clause::frechet: return "frechet";
    case Clause::gumbel_infinite: return "gumbel-infinite-endpoint";
    case Clause::gumbel_finite: return "gumbel-finite-endpoint";
    case Clause::weibull: return "weibull";
  }
  return "none";
}

std::string DomainVerdict::record(int precision) const {
  std::string out = fmt::format("label={}", to_string(label));
  out += gamma_hat ? fmt::format(" gamma_hat={:.{}g}", *gamma_hat, precision) : " gamma_hat=NA";
  out += fmt::format(" clause={} eps_c={} eps_zero={} eps_small={} window={}", to_string(clause),
                     tolerances.eps_c, tolerances.eps_zero, tolerances.eps_small, tolerances.stability_window);
  if (!evidence.empty()) out += fmt::format(" n={}", evidence.back().n);
  return out;
}

double gamma_from_c(double c) {
  if (!(c > 1.0 && c < std::numbers::sqrt2))
    throw Error(ErrorCode::OutOfBand, fmt::format("c = {} is outside (1, sqrt(2))", c));
  const double c2 = c * c;
  return (2.0 - c2) / (c2 - 1.0);
}

double c_from_gamma(double gamma) {
  if (!(gamma > 0.0)) throw Error(ErrorCode::InvalidParameter, fmt::format("gamma = {} must be > 0", gamma));
  return std::sqrt((gamma + 2.0) / (gamma + 1.0));
}

namespace {

struct Checks {
  std::vector<std::string> failures;
  void require(bool ok, std::string what) {
    if (!ok) failures.push_back(std::move(what));
  }
  bool passed() const { return failures.empty(); }
  std::string joined() const {
    std::string out;
    for (const auto& f : failures) out += (out.empty() ? "" : ", ") + f;
    return out;
  }
};

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt::format("{:.6g}", *v) : "undefined"; }

// Empty when stable, else a description of the first drifting component.
std::string drift(std::span<const EcsfextVector> window, const Tolerances& tol) {
  auto check = [&](const char* name, auto get, double eps) -> std::string {
    for (std::size_t i = 0; i < window.size(); ++i)
      for (std::size_t j = i + 1; j < window.size(); ++j) {
        const std::optional<double> a = get(window[i]);
        const std::optional<double> b = get(window[j]);
        if (!a || !b) return fmt::format("{} undefined at some n", name);
        const double scale = std::max({1.0, std::abs(*a), std::abs(*b)});
        if (std::abs(*a - *b) > 2.0 * eps * scale)
          return fmt::format("{} drifts from {:.6g} (n={}) to {:.6g} (n={})", name, *a, window[i].n, *b,
                             window[j].n);
      }
    return {};
  };
  if (auto s = check("t1", [](const EcsfextVector& v) { return v.t1; }, tol.eps_c); !s.empty()) return s;
  if (auto s = check("t2", [](const EcsfextVector& v) { return std::optional<double>(v.t2); }, tol.eps_zero);
      !s.empty())
    return s;
  return check("t5", [](const EcsfextVector& v) { return std::optional<double>(v.t5); }, tol.eps_zero);
}

}  // namespace

DomainVerdict classify(std::span<const EcsfextVector> vectors, const Tolerances& tol) {
  tol.validate();
  if (vectors.size() < tol.stability_window)
    throw Error(ErrorCode::InsufficientData, fmt::format("{} vectors, stability window needs {}", vectors.size(),
                                                         tol.stability_window));
  DomainVerdict verdict;
  verdict.tolerances = tol;
  const auto window = vectors.last(tol.stability_window);
  verdict.evidence.assign(window.begin(), window.end());
  const EcsfextVector& v = window.back();

  if (!v.t1) {
    verdict.reason = "t1 undefined (A_n = 0, degenerate sample)";
    return verdict;
  }
  const double t1 = *v.t1;
  const double sqrt2 = std::numbers::sqrt2;

  Checks frechet;
  frechet.require(std::abs(t1 - 1.0) <= tol.eps_c, fmt::format("|t1-1|={:.6g} > eps_c", std::abs(t1 - 1.0)));
  frechet.require(v.t2 > tol.eps_zero, fmt::format("t2={:.6g} <= eps_zero", v.t2));
  frechet.require(std::abs(v.t2 - v.t5) <= tol.eps_zero * std::max(1.0, v.t2),
                  fmt::format("|t2-t5|={:.6g} > eps_zero*max(1,t2)", std::abs(v.t2 - v.t5)));

  Checks gumbel;
  gumbel.require(std::abs(t1 - 1.0) <= tol.eps_c, fmt::format("|t1-1|={:.6g} > eps_c", std::abs(t1 - 1.0)));
  gumbel.require(v.t2 <= tol.eps_zero, fmt::format("t2={:.6g} > eps_zero", v.t2));
  gumbel.require(v.t5 <= tol.eps_zero, fmt::format("t5={:.6g} > eps_zero", v.t5));
  gumbel.require(v.t8_half && *v.t8_half <= tol.eps_small,
                 fmt::format("t8(beta/2)={} > eps_small", fmt_opt(v.t8_half)));

  Checks weibull;
  weibull.require(v.t9.has_value(), "no endpoint y0 supplied, t9 unavailable");
  weibull.require(t1 > 1.0 + tol.eps_c && t1 < sqrt2 - tol.eps_c,
                  fmt::format("t1={:.6g} outside (1+eps_c, sqrt2-eps_c)", t1));
  weibull.require(v.t2 <= tol.eps_zero, fmt::format("t2={:.6g} > eps_zero", v.t2));
  weibull.require(v.t5 <= tol.eps_zero, fmt::format("t5={:.6g} > eps_zero", v.t5));
  if (v.t9) weibull.require(*v.t9 <= tol.eps_small, fmt::format("t9={:.6g} > eps_small", *v.t9));

  if (frechet.passed()) {
    verdict.label = Label::Frechet;
    verdict.clause = Clause::frechet;
    verdict.gamma_hat = 1.0 / v.t2;
  } else if (gumbel.passed()) {
    verdict.label = Label::Gumbel;
    verdict.clause = v.y0_used ? Clause::gumbel_finite : Clause::gumbel_infinite;
  } else if (weibull.passed()) {
    verdict.label = Label::Weibull;
    verdict.clause = Clause::weibull;
    verdict.gamma_hat = gamma_from_c(t1);
  } else {
    verdict.reason = fmt::format("frechet: {}; gumbel: {}; weibull: {}", frechet.joined(), gumbel.joined(),
                                 weibull.joined());
    return verdict;
  }

  if (const std::string unstable = drift(window, tol); !unstable.empty()) {
    verdict.reason = fmt::format("{} clause matched at n={} but values are unstable: {}",
                                 to_string(verdict.clause), v.n, unstable);
    verdict.label = Label::Unclassified;
    verdict.clause = Clause::none;
    verdict.gamma_hat.reset();
  }
  return verdict;
}

LimitVector theoretical_limit(Domain domain, std::optional<double> gamma, std::optional<double> log_endpoint) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  LimitVector lim;
  const double y0 = log_endpoint.value_or(inf);
  switch (domain) {
    case Domain::Gumbel:
      lim = {1.0, 0.0, 0.0, y0, 0.0, 0.0, 0.0, 0.0, std::nullopt};
      break;
    case Domain::Frechet: {
      if (!gamma || !(*gamma > 0.0)) throw Error(ErrorCode::InvalidParameter, "Frechet limit needs gamma > 0");
      const double d = 1.0 / *gamma;
      lim = {1.0, d, 0.0, inf, d, 0.0, 0.0, 0.0, std::nullopt};
      break;
    }
    case Domain::Weibull:
      lim = {c_limit(domain, gamma), 0.0, 0.0, y0, 0.0, 0.0, 0.0, std::nullopt, 0.0};
      break;
    case Domain::None: break;
  }
  return lim;
}

std::vector<DiagnosticRow> convergence_diagnostic(const QuantileModel& model, const IndexSchedule& schedule,
                                                  std::span<const std::size_t> n_grid, std::uint64_t seed,
                                                  std::optional<double> y0) {
  for (std::size_t i = 1; i < n_grid.size(); ++i)
    if (n_grid[i] <= n_grid[i - 1]) throw Error(ErrorCode::InvalidParameter, "n grid must be increasing");
  const std::optional<double> endpoint = y0 ? y0 : model.log_endpoint();
  const LimitVector limit = theoretical_limit(model.true_domain, model.true_gamma, model.log_endpoint());
  std::vector<DiagnosticRow> rows;
  rows.reserve(n_grid.size());
  for (const std::size_t n : n_grid) {
    DiagnosticRow row;
    row.n = n;
    row.seed = trial_seed(seed, 0, n);
    row.observed = ecsfext_vector(sample(model, n, row.seed), schedule, endpoint);
    row.limit = limit;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace evchar
