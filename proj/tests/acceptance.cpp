// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <algorithm>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "evchar/classifier.hpp"
#include "evchar/estimators.hpp"
#include "evchar/harness.hpp"
#include "evchar/models.hpp"
#include "evchar/rng.hpp"
#include "evchar/sample.hpp"
#include "oracles.hpp"

using namespace evchar;

namespace {

constexpr std::uint64_t kSeed = 42;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. Spacing identity on 1000 random vectors, n <= 200, every k.
Outcome identity_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::size_t checks = 0;
  for (std::uint64_t t = 0; t < 1000; ++t) {
    const std::uint64_t seed = trial_seed(kSeed, t, 1);
    const std::size_t n = 2 + counter_draw(seed, 1u << 20) % 199;
    const double scale = std::pow(10.0, 6.0 * counter_uniform(seed, (1u << 20) + 1) - 3.0);
    const auto x = oracle::random_vector(seed, n, scale);
    for (std::size_t k = 1; k < n; ++k) {
      const IdentitySides s = spacings_identity_sides(x, k);
      worst = std::max(worst, s.gap() / std::max(1.0, s.lhs));
      ++checks;
    }
  }
  const double secs = seconds_since(t0);
  const bool ok = worst <= 1e-9 && secs < 5.0;
  return {ok, fmt::format("max_rel_gap={:.3g} (tol 1e-9) checks={} runtime={:.2f}s (limit 5s)", worst, checks, secs)};
}

// 2. dekkers = 2 a_stat(k, 1) and hill(k, 1) = mean excess over y_{n-k}.
Outcome normalization_coupling() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_dekkers = 0.0;
  double worst_hill = 0.0;
  for (std::uint64_t t = 0; t < 1000; ++t) {
    const std::uint64_t seed = trial_seed(kSeed, t, 2);
    const std::size_t n = 3 + counter_draw(seed, 1u << 20) % 998;
    auto v = oracle::random_vector(seed, n, 10.0);
    const auto s = SortedLogSample::from_log_values(v, SourceScale::already_log);
    const std::size_t k = 1 + counter_draw(seed, (1u << 20) + 1) % (n - 1);
    const double d = dekkers_moment(s, k);
    const double a2 = 2.0 * a_stat(s, k, 1);
    worst_dekkers = std::max(worst_dekkers, std::abs(d - a2) / std::max(std::abs(d), 1e-300));
    std::sort(v.begin(), v.end(), std::greater<>());
    double excess = 0.0;
    for (std::size_t i = 0; i < k; ++i) excess += v[i] - v[k];
    excess /= static_cast<double>(k);
    const double h = hill(s, k, 1);
    worst_hill = std::max(worst_hill, std::abs(h - excess) / std::max(std::abs(excess), 1e-300));
  }
  const double secs = seconds_since(t0);
  const bool ok = worst_dekkers <= 1e-9 && worst_hill <= 1e-9 && secs < 5.0;
  return {ok, fmt::format("dekkers_vs_2a max_rel={:.3g} hill_vs_mean_excess max_rel={:.3g} (tol 1e-9) runtime={:.2f}s "
                          "(limit 5s)",
                          worst_dekkers, worst_hill, secs)};
}

// 3. Discrete tail integrals against piecewise-exact integration.
Outcome oracle_equivalence() {
  double worst_single = 0.0;
  double worst_double = 0.0;
  for (std::uint64_t t = 0; t < 200; ++t) {
    const std::uint64_t seed = trial_seed(kSeed, t, 3);
    const std::size_t n = 3 + counter_draw(seed, 1u << 20) % 498;
    const auto v = oracle::random_vector(seed, n, 4.0);
    const auto s = SortedLogSample::from_log_values(v, SourceScale::already_log);
    const std::size_t k = 1 + counter_draw(seed, (1u << 20) + 1) % (n - 1);
    const std::size_t l = 1 + counter_draw(seed, (1u << 20) + 2) % k;
    const auto ref = oracle::empirical_tail(v, s.upper(k), s.upper(l - 1));
    const double a = tail_integral_single(s, k, l).value;
    const double b = tail_integral_double(s, k, l).value;
    if (ref.single > 0) worst_single = std::max(worst_single, std::abs(a - ref.single) / ref.single);
    if (ref.double_ > 0) worst_double = std::max(worst_double, std::abs(b - ref.double_) / ref.double_);
  }
  const bool ok = worst_single <= 1e-12 && worst_double <= 1e-12;
  return {ok, fmt::format("single max_rel={:.3g} double max_rel={:.3g} (tol 1e-12) samples=200", worst_single,
                          worst_double)};
}

ExperimentSpec spec_for(const std::string& model, ModelParams params, std::vector<std::string> stats,
                        std::size_t n, std::size_t reps) {
  ExperimentSpec spec;
  spec.model = model;
  spec.params = std::move(params);
  spec.n_grid = {n};
  spec.replications = reps;
  spec.base_seed = kSeed;
  for (const auto& s : stats) spec.statistics.push_back(StatisticRequest::parse(s));
  return spec;
}

std::size_t column(const ExperimentSpec& spec, const std::string& name) {
  const auto cols = spec.value_columns();
  return static_cast<std::size_t>(std::find(cols.begin(), cols.end(), name) - cols.begin());
}

// 4. Hill estimator converges to 1/gamma on Frechet-domain laws.
Outcome hill_limit() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  for (double gamma : {0.5, 1.0, 2.0}) {
    const auto spec = spec_for("frechet", {{"gamma", gamma}}, {"hill"}, 100000, 100);
    const auto results = run_experiment(spec, 0);
    const double target = 1.0 / gamma;
    const auto agg = summarize(results, column(spec, "hill"), target, 0.1 * target);
    const double frac = agg.at(0).success_fraction.value_or(0.0);
    ok = ok && frac >= 0.95;
    detail += fmt::format("gamma={} mean={:.4f} target={:.4f} within10%={:.2f}; ", gamma, agg[0].mean, target, frac);
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 60.0;
  return {ok, detail + fmt::format("(need >=0.95) runtime={:.1f}s (limit 60s)", secs)};
}

// Share of trials in which every listed check holds.
struct VectorCheck {
  std::string column;
  std::function<bool(double)> holds;
  std::string text;
};

std::pair<double, std::string> joint_fraction(const ExperimentSpec& spec, const std::vector<TrialResult>& results,
                                              const std::vector<VectorCheck>& checks) {
  std::size_t good = 0;
  std::vector<std::size_t> per(checks.size(), 0);
  for (const auto& r : results) {
    bool all = r.ok();
    for (std::size_t c = 0; c < checks.size(); ++c) {
      const auto& v = r.values.at(column(spec, checks[c].column));
      const bool h = r.ok() && v && checks[c].holds(*v);
      per[c] += h;
      all = all && h;
    }
    good += all;
  }
  const double n = static_cast<double>(results.size());
  std::string detail;
  for (std::size_t c = 0; c < checks.size(); ++c) {
    const auto agg = summarize(results, column(spec, checks[c].column));
    detail += fmt::format("{} mean={:.4f} ok={:.2f}, ", checks[c].text, agg.at(0).mean, per[c] / n);
  }
  return {good / n, detail};
}

// 5. Limit vectors for the three domains at n = 1e5.
Outcome limit_vectors() {
  const auto t0 = std::chrono::steady_clock::now();
  auto near = [](double target, double tol) { return [=](double x) { return std::abs(x - target) <= tol; }; };
  auto at_most = [](double tol) { return [=](double x) { return x <= tol; }; };
  bool ok = true;
  std::string detail;

  {
    const auto spec = spec_for("exponential", {}, {"ecsfext"}, 100000, 50);
    const auto r = run_experiment(spec, 0);
    const auto [frac, d] = joint_fraction(spec, r,
                                          {{"t1", near(1.0, 0.1), "t1~1"},
                                           {"t2", at_most(0.1), "t2<=.1"},
                                           {"t5", at_most(0.1), "t5<=.1"},
                                           {"t6", at_most(0.1), "t6<=.1"},
                                           {"t7", at_most(0.1), "t7<=.1"},
                                           {"t8", at_most(0.1), "t8<=.1"}});
    ok = ok && frac >= 0.9;
    detail += fmt::format("exponential joint={:.2f} [{}]; ", frac, d);
  }
  {
    const auto spec = spec_for("frechet", {{"gamma", 0.5}}, {"ecsfext"}, 100000, 50);
    const auto r = run_experiment(spec, 0);
    const auto [frac, d] =
        joint_fraction(spec, r, {{"t2", near(2.0, 0.15), "t2~2"}, {"t5", near(2.0, 0.15), "t5~2"}});
    ok = ok && frac >= 0.9;
    detail += fmt::format("frechet(0.5) joint={:.2f} [{}]; ", frac, d);
  }
  {
    auto spec = spec_for("uniform", {}, {"ecsfext"}, 100000, 50);
    spec.y0 = 0.0;
    const auto r = run_experiment(spec, 0);
    const auto [frac, d] =
        joint_fraction(spec, r, {{"t1", near(std::sqrt(1.5), 0.1), "t1~sqrt1.5"}, {"t9", at_most(0.1), "t9<=.1"}});
    ok = ok && frac >= 0.9;
    detail += fmt::format("uniform(y0=0) joint={:.2f} [{}]; ", frac, d);
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 120.0;
  return {ok, detail + fmt::format("(need >=0.90 each) runtime={:.1f}s (limit 120s)", secs)};
}

// 6. Classifier labels at n = 1e5 with default tolerances and schedule.
Outcome classification() {
  const auto sched = IndexSchedule::make(0.75, 0.6, 0.49);
  const Tolerances tol;
  constexpr std::size_t kRuns = 50;
  constexpr std::size_t kN = 100000;
  const std::vector<std::size_t> grid{kN / 4, kN / 2, kN};

  struct Case {
    std::string model;
    ModelParams params;
    Label want;
    std::optional<double> gamma;
    double gamma_tol;
    std::optional<double> y0;
  };
  const std::vector<Case> cases = {
      {"exponential", {}, Label::Gumbel, std::nullopt, 0.0, std::nullopt},
      {"lognormal", {}, Label::Gumbel, std::nullopt, 0.0, std::nullopt},
      {"frechet", {{"gamma", 0.5}}, Label::Frechet, 0.5, 0.2 * 0.5, std::nullopt},
      {"frechet", {{"gamma", 1.0}}, Label::Frechet, 1.0, 0.2 * 1.0, std::nullopt},
      {"frechet", {{"gamma", 2.0}}, Label::Frechet, 2.0, 0.2 * 2.0, std::nullopt},
      {"uniform", {}, Label::Weibull, 1.0, 0.3, 0.0},
  };
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    const auto model = builtin_model(c.model, c.params);
    std::size_t good = 0;
    std::map<std::string, std::size_t> labels;
    for (std::size_t run = 0; run < kRuns; ++run) {
      std::vector<EcsfextVector> vs;
      for (std::size_t n : grid) vs.push_back(ecsfext_vector(sample(model, n, trial_seed(kSeed, run, n)), sched, c.y0));
      const DomainVerdict v = classify(vs, tol);
      ++labels[std::string(to_string(v.label))];
      bool hit = v.label == c.want;
      if (hit && c.gamma) hit = v.gamma_hat && std::abs(*v.gamma_hat - *c.gamma) <= c.gamma_tol;
      good += hit;
    }
    const double frac = static_cast<double>(good) / kRuns;
    ok = ok && frac >= 0.9;
    std::string hist;
    for (const auto& [label, count] : labels) hist += fmt::format("{}:{} ", label, count);
    detail += fmt::format("{} -> {} correct={:.2f} ({}); ", model.label(), to_string(c.want), frac, hist);
  }
  return {ok, detail + "(need >=0.90 each)"};
}

// 7. C_n on the counterexample converges while Hill keeps moving.
Outcome counterexample() {
  const auto model = builtin_model("mason_counterexample");
  const double target = 1.0 / std::numbers::ln2;
  std::vector<double> hills;
  double c_n = 0.0;
  for (std::size_t n : {10000u, 100000u, 1000000u}) {
    const auto s = sample(model, n, trial_seed(kSeed, 0, n));
    const std::size_t k = floor_power(n, 0.75);
    hills.push_back(hill(s, k, 1));
    c_n = dehaan_resnick(s, k);
  }
  const auto [lo, hi] = std::minmax_element(hills.begin(), hills.end());
  const double ratio = *hi / *lo;
  const bool c_ok = std::abs(c_n - target) <= 0.05;
  const bool h_ok = ratio > 1.1;
  return {c_ok && h_ok,
          fmt::format("C_n(1e6)={:.4f} target={:.6f} |diff|={:.4f} (tol 0.05) {}; hill(1e4,1e5,1e6)=({:.4f}, {:.4f}, "
                      "{:.4f}) max/min={:.4f} (need >1.1) {}",
                      c_n, target, std::abs(c_n - target), c_ok ? "ok" : "miss", hills[0], hills[1], hills[2], ratio,
                      h_ok ? "ok" : "miss")};
}

// 8. Moment oracles against closed forms.
Outcome moment_oracles() {
  const auto u = builtin_model("uniform");
  const auto e = builtin_model("exponential");
  double worst_closed = 0.0;
  double worst_quad = 0.0;
  double worst_exp = 0.0;
  for (double x : {0.0, 0.1, 0.5, 0.9, 0.999}) {
    const double r = r_moment(u, x, MomentMethod::closed_form);
    const double w = w_moment(u, x, MomentMethod::closed_form);
    worst_closed = std::max(worst_closed, std::abs(w / (r * r) - 2.0 / 3.0));
    worst_quad = std::max({worst_quad, std::abs(r_moment(u, x, MomentMethod::quadrature) / r - 1.0),
                           std::abs(w_moment(u, x, MomentMethod::quadrature) / w - 1.0)});
  }
  for (double x : {0.0, 1.0, 5.0, 20.0}) {
    const double r = r_moment(e, x);
    const double w = w_moment(e, x);
    worst_exp = std::max({worst_exp, std::abs(r - 1.0), std::abs(w / (r * r) - 1.0),
                          std::abs(r_moment(e, x, MomentMethod::quadrature) - 1.0),
                          std::abs(w_moment(e, x, MomentMethod::quadrature) / (r * r) - 1.0)});
  }
  const bool ok = worst_closed <= 1e-15 && worst_quad <= 1e-8 && worst_exp <= 1e-8;
  return {ok, fmt::format("uniform |w/r^2-2/3|={:.3g} quadrature max_rel={:.3g} (tol 1e-8) exponential "
                          "max|r-1|,|w/r^2-1|={:.3g}",
                          worst_closed, worst_quad, worst_exp)};
}

// 9. Byte-identical persisted output across re-runs and thread counts.
Outcome determinism() {
  auto spec = spec_for("frechet", {{"gamma", 1.0}}, {"ecsfext", "hill", "dekkers", "dehaan_resnick", "diop_lo(2)"},
                       1000, 8);
  spec.n_grid = {500, 2000, 10000};
  auto render = [&](unsigned threads) {
    const auto r = run_experiment(spec, threads);
    std::ostringstream csv, jsonl;
    write_csv(csv, spec, r);
    write_jsonl(jsonl, spec, r);
    return std::pair{csv.str(), jsonl.str()};
  };
  const auto serial = render(1);
  const auto again = render(1);
  const auto parallel = render(4);
  const auto all_cores = render(0);
  const bool ok = serial == again && serial == parallel && serial == all_cores;
  return {ok, fmt::format("csv {} bytes, jsonl {} bytes, identical across 2 serial runs and 4-thread/all-core runs: {}",
                          serial.first.size(), serial.second.size(), ok ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"identity suite", identity_suite},
      {"normalization coupling", normalization_coupling},
      {"tail-integral oracle equivalence", oracle_equivalence},
      {"Hill limit on Frechet laws", hill_limit},
      {"limit vectors by domain", limit_vectors},
      {"classification", classification},
      {"counterexample", counterexample},
      {"moment oracles", moment_oracles},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %zu %s: %s | %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
