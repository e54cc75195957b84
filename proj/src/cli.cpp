#include "evchar/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <json.hpp>

#include "evchar/classifier.hpp"
#include "evchar/error.hpp"
#include "evchar/estimators.hpp"
#include "evchar/harness.hpp"
#include "evchar/io.hpp"
#include "evchar/models.hpp"
#include "evchar/rng.hpp"
#include "evchar/sample.hpp"

namespace evchar::cli {
namespace {

using json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::IoError:
    case ErrorCode::ParseError:
    case ErrorCode::EmptyInput:
    case ErrorCode::NonFiniteInput:
    case ErrorCode::NonPositiveObservation:
    case ErrorCode::SampleTooSmall:
    case ErrorCode::SpecMismatch: return kIoOrParse;
    case ErrorCode::ZeroSpread:
    case ErrorCode::DegenerateSample: return kCheckFailed;
    default: return kUsage;
  }
}

struct Printer {
  int precision = 10;

  std::string operator()(double x) const {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return fmt::format("{:.{}g}", x, precision);
  }
  std::string operator()(const std::optional<double>& x, const char* missing = "NA") const {
    return x ? (*this)(*x) : std::string(missing);
  }
  // Same digits as the human output, so both renderings agree.
  json j(double x) const {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return std::stod((*this)(x));
  }
  json j(const std::optional<double>& x) const { return x ? j(*x) : json(nullptr); }
};

struct ScheduleFlags {
  double alpha = 0.75;
  double beta = 0.6;
  double delta = 0.49;
  std::optional<double> v;

  void add_to(CLI::App* sub) {
    sub->add_option("--alpha", alpha, "k = floor(n^alpha)");
    sub->add_option("--beta", beta, "l = floor(n^beta)");
    sub->add_option("--delta", delta, "auxiliary exponent, 0 < delta < 1/2, delta + beta > 1");
    sub->add_option("--v", v, "exponent of T8 (default: 2v = min(1 - alpha, delta + beta - 1))");
  }
  IndexSchedule make() const { return IndexSchedule::make(alpha, beta, delta, v); }
};

struct ModelFlags {
  std::string name;
  std::vector<std::string> params;
  std::optional<double> gamma;

  void add_to(CLI::App* sub, bool positional) {
    if (positional)
      sub->add_option("model,--model", name, "built-in model name");
    else
      sub->add_option("--model", name, "built-in model name");
    sub->add_option("--gamma", gamma, "shorthand for --param gamma=<value>");
    sub->add_option("--param", params, "model parameter key=value (repeatable)");
  }

  QuantileModel make() const {
    ModelParams p;
    for (const auto& kv : params) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw UsageError(fmt::format("--param expects key=value, got '{}'", kv));
      const std::string key = kv.substr(0, eq);
      const std::string val = kv.substr(eq + 1);
      std::size_t used = 0;
      double x = 0.0;
      try {
        x = std::stod(val, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != val.size()) throw UsageError(fmt::format("--param {}: '{}' is not a number", key, val));
      p[key] = x;
    }
    if (gamma) p["gamma"] = *gamma;
    return builtin_model(name, p);
  }
};

struct OutputFlags {
  bool as_json = false;
  int precision = 10;
  bool full_precision = false;

  void add_to(CLI::App* sub) {
    sub->add_flag("--json", as_json, "machine-readable JSON output");
    sub->add_option("--precision", precision, "significant digits in printed numbers")->check(CLI::Range(1, 17));
    sub->add_flag("--full-precision", full_precision, "print 17 significant digits");
  }
  Printer printer() const { return Printer{full_precision ? 17 : precision}; }
};

// Effective configuration of the chosen subcommand: flags, then config file,
// then defaults, as seen after parsing.
std::vector<std::pair<std::string, std::string>> effective_config(const CLI::App* sub) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name.empty()) continue;
    std::string value;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      for (std::size_t i = 0; i < res.size(); ++i) value += (i ? "," : "") + res[i];
      if (opt->get_expected_min() == 0) value = "true";
    } else {
      value = opt->get_default_str();
      if (value.empty()) value = opt->get_expected_min() == 0 ? "false" : "NA";
    }
    out.emplace_back(name, value);
  }
  return out;
}

void echo_config(std::ostream& os, const CLI::App* sub) {
  os << "# config";
  for (const auto& [k, v] : effective_config(sub)) os << ' ' << k << '=' << v;
  os << '\n';
}

json config_json(const CLI::App* sub) {
  json j = json::object();
  for (const auto& [k, v] : effective_config(sub)) j[k] = v;
  return j;
}

// Extracts --config from the arguments (or EVCHAR_CONFIG) and appends every
// key=value whose flag was not given explicitly.
std::vector<std::string> apply_config(std::vector<std::string> args, CLI::App& app) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a path");
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (!path) {
    if (const char* env = std::getenv("EVCHAR_CONFIG"); env && *env) path = env;
  }
  if (!path) return args;

  CLI::App* sub = nullptr;
  for (const auto& a : args) {
    if (a.empty() || a[0] == '-') continue;
    sub = app.get_subcommand_no_throw(a);
    break;
  }
  if (!sub) return args;

  std::ifstream in(*path);
  if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot open config '{}'", *path));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::ParseError, fmt::format("{}:{}: expected key=value", *path, line_no));
    auto strip = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    const std::string flag = "--" + key;
    const CLI::Option* opt = sub->get_option_no_throw(flag);
    if (!opt) throw UsageError(fmt::format("{}:{}: unknown key '{}' for '{}'", *path, line_no, key, sub->get_name()));
    const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
    if (given) continue;
    if (opt->get_expected_min() == 0) {
      if (value == "true" || value == "1") args.push_back(flag);
    } else {
      args.push_back(flag);
      args.push_back(value);
    }
  }
  return args;
}

std::vector<std::size_t> doubling_grid(std::size_t n, std::size_t points) {
  std::vector<std::size_t> grid;
  for (std::size_t i = 0; i < points; ++i) grid.push_back(n >> (points - 1 - i));
  return grid;
}

// ---------------------------------------------------------------- gen

struct GenCmd {
  ModelFlags model;
  std::size_t n = 0;
  std::uint64_t seed = 42;
  std::string out = "-";

  int run(const CLI::App* sub, std::ostream& out_stream, std::ostream& err) const {
    const QuantileModel m = model.make();
    const std::vector<double> xs = draw(m, n, seed);
    echo_config(err, sub);
    err << fmt::format("# model={} scale={} seed={}\n", m.label(), m.log_scale ? "log" : "raw", seed);
    std::ofstream file;
    std::ostream* os = &out_stream;
    if (out != "-") {
      file.open(out);
      if (!file) throw Error(ErrorCode::IoError, fmt::format("cannot open '{}' for writing", out));
      os = &file;
    }
    for (double x : xs) *os << fmt::format("{:.17g}\n", x);
    if (!*os) throw Error(ErrorCode::IoError, fmt::format("failed writing '{}'", out));
    return kSuccess;
  }
};

// ---------------------------------------------------------------- estimate

struct EstimateCmd {
  std::string input;
  std::string scale = "raw";
  ScheduleFlags schedule;
  std::optional<std::size_t> k;
  std::optional<std::size_t> l;
  std::optional<double> y0;
  OutputFlags output;

  int run(const CLI::App* sub, std::ostream& os, std::ostream& err) const {
    const IndexSchedule sched = schedule.make();
    const std::vector<double> obs = read_observations_file(input);
    const SortedLogSample s = SortedLogSample::from_observations(
        obs, scale == "log" ? SourceScale::already_log : SourceScale::raw_positive);
    IndexPair idx;
    if (k || l) {
      const IndexPair derived = [&] {
        try {
          return derive_indices(sched, s.size());
        } catch (const Error&) {
          return IndexPair{};
        }
      }();
      idx.k = k.value_or(derived.k);
      idx.l = l.value_or(derived.l);
      if (idx.k == 0 || idx.l == 0) throw UsageError("give both --k and --l when the schedule degenerates");
    } else {
      idx = derive_indices(sched, s.size());
    }
    const EcsfextVector v = ecsfext_vector(s, idx, sched.v(), sched.beta(), y0);
    const Printer p = output.printer();

    if (output.as_json) {
      json j;
      j["config"] = config_json(sub);
      j["n"] = v.n;
      j["k"] = v.k;
      j["l"] = v.l;
      j["v"] = p.j(v.v);
      j["x_n"] = p.j(v.x_n);
      j["z_n"] = p.j(v.z_n);
      j["y0"] = p.j(v.y0_used);
      j["T1"] = p.j(v.t1);
      j["T2"] = p.j(v.t2);
      j["T3"] = p.j(v.t3);
      j["T4"] = p.j(v.t4);
      j["T5"] = p.j(v.t5);
      j["T6"] = p.j(v.t6);
      j["T7"] = p.j(v.t7);
      j["T8"] = p.j(v.t8);
      j["T8_half"] = p.j(v.t8_half);
      j["T9"] = p.j(v.t9);
      json conds = json::array();
      for (auto c : v.conditions) conds.push_back(to_string(c));
      j["conditions"] = conds;
      os << j.dump() << '\n';
    } else {
      os << "# evchar estimate\n";
      echo_config(os, sub);
      os << fmt::format("n={} k={} l={} v={} x_n={} z_n={} y0={}\n", v.n, v.k, v.l, p(v.v), p(v.x_n), p(v.z_n),
                        p(v.y0_used));
      os << "T1=" << p(v.t1, "undefined") << '\n';
      os << "T2=" << p(v.t2) << '\n';
      os << "T3=" << p(v.t3) << '\n';
      os << "T4=" << p(v.t4) << '\n';
      os << "T5=" << p(v.t5) << '\n';
      os << "T6=" << p(v.t6, "undefined") << '\n';
      os << "T7=" << p(v.t7, "undefined") << '\n';
      os << "T8=" << p(v.t8, "undefined") << '\n';
      os << "T8_half=" << p(v.t8_half, "undefined") << '\n';
      os << "T9=" << (v.y0_used ? p(v.t9, "undefined") : std::string("absent")) << '\n';
      std::string conds;
      for (auto c : v.conditions) conds += (conds.empty() ? "" : ",") + to_string(c);
      os << "conditions=" << (conds.empty() ? "none" : conds) << '\n';
    }
    if (!v.complete()) {
      for (auto c : v.conditions) {
        if (c == VectorCondition::ZeroSpread)
          err << "ZeroSpread: z_n = x_n, T6, T7 and T8 are undefined\n";
        else if (c == VectorCondition::DegenerateSample)
          err << "DegenerateSample: A_n = 0, T1 is undefined\n";
        else
          err << "ZeroEndpointGap: y0 = x_n, T9 is undefined\n";
      }
      return kCheckFailed;
    }
    return kSuccess;
  }
};

// ---------------------------------------------------------------- classify

struct ClassifyCmd {
  std::string input;
  std::string scale = "raw";
  ModelFlags model;
  std::optional<std::size_t> n;
  std::vector<std::size_t> n_grid;
  std::uint64_t seed = 42;
  ScheduleFlags schedule;
  Tolerances tol;
  std::optional<double> y0;
  OutputFlags output;

  std::vector<EcsfextVector> vectors() const {
    const IndexSchedule sched = schedule.make();
    std::vector<EcsfextVector> out;
    if (!input.empty() && !model.name.empty()) throw UsageError("give either --input or --model, not both");
    if (!input.empty()) {
      const std::vector<double> obs = read_observations_file(input);
      std::vector<std::size_t> grid = n_grid.empty() ? doubling_grid(obs.size(), tol.stability_window) : n_grid;
      for (std::size_t m : grid) {
        if (m > obs.size()) throw UsageError(fmt::format("grid size {} exceeds the {} observations", m, obs.size()));
        const SortedLogSample s = SortedLogSample::from_observations(
            std::span<const double>(obs.data(), m),
            scale == "log" ? SourceScale::already_log : SourceScale::raw_positive);
        out.push_back(ecsfext_vector(s, sched, y0));
      }
      return out;
    }
    if (model.name.empty()) throw UsageError("give --input or --model");
    const QuantileModel m = model.make();
    std::vector<std::size_t> grid = n_grid;
    if (grid.empty()) {
      if (!n) throw UsageError("--model needs --n or --n-grid");
      grid = doubling_grid(*n, tol.stability_window);
    }
    for (std::size_t size : grid) out.push_back(ecsfext_vector(sample(m, size, trial_seed(seed, 0, size)), sched, y0));
    return out;
  }

  int run(const CLI::App* sub, std::ostream& os, std::ostream&) const {
    const std::vector<EcsfextVector> vs = vectors();
    const DomainVerdict verdict = classify(vs, tol);
    const Printer p = output.printer();
    if (output.as_json) {
      json j;
      j["config"] = config_json(sub);
      j["label"] = to_string(verdict.label);
      j["gamma_hat"] = p.j(verdict.gamma_hat);
      j["clause"] = to_string(verdict.clause);
      j["reason"] = verdict.reason;
      json ev = json::array();
      for (const auto& v : verdict.evidence)
        ev.push_back({{"n", v.n},          {"k", v.k},           {"l", v.l},          {"T1", p.j(v.t1)},
                      {"T2", p.j(v.t2)},   {"T5", p.j(v.t5)},    {"T8_half", p.j(v.t8_half)},
                      {"T9", p.j(v.t9)}});
      j["evidence"] = ev;
      os << j.dump() << '\n';
    } else {
      os << "# evchar classify\n";
      echo_config(os, sub);
      os << verdict.record(p.precision) << '\n';
      for (const auto& v : verdict.evidence)
        os << fmt::format("evidence n={} k={} l={} T1={} T2={} T5={} T8_half={} T9={}\n", v.n, v.k, v.l,
                          p(v.t1, "undefined"), p(v.t2), p(v.t5), p(v.t8_half, "undefined"), p(v.t9, "absent"));
      if (!verdict.reason.empty()) os << "reason=" << verdict.reason << '\n';
    }
    return verdict.label == Label::Unclassified ? kUnclassified : kSuccess;
  }
};

// ---------------------------------------------------------------- convergence

struct ConvergenceCmd {
  ModelFlags model;
  ScheduleFlags schedule;
  std::vector<std::size_t> n_grid;
  std::size_t replications = 1;
  std::uint64_t seed = 42;
  std::vector<std::string> stats{"ecsfext"};
  std::optional<double> y0;
  std::string csv;
  std::string jsonl;
  unsigned threads = 1;
  bool timing = false;
  OutputFlags output;

  int run(const CLI::App* sub, std::ostream& os, std::ostream&) const {
    const QuantileModel m = model.make();
    ExperimentSpec spec;
    spec.model = m.name;
    spec.params = m.params;
    spec.alpha = schedule.alpha;
    spec.beta = schedule.beta;
    spec.delta = schedule.delta;
    spec.v = schedule.v;
    spec.n_grid = n_grid;
    spec.replications = replications;
    spec.base_seed = seed;
    for (const auto& s : stats) spec.statistics.push_back(StatisticRequest::parse(s));
    spec.y0 = y0 ? y0 : m.log_endpoint();
    if (n_grid.empty()) throw UsageError("--n-grid is required");

    const std::vector<TrialResult> results = run_experiment(spec, threads);
    const LimitVector limits = theoretical_limit(m.true_domain, m.true_gamma, m.log_endpoint());
    WriteOptions opts;
    opts.include_timing = timing;
    opts.limits = &limits;
    if (!csv.empty()) append_results(csv, ResultFormat::csv, spec, results, opts);
    if (!jsonl.empty()) append_results(jsonl, ResultFormat::jsonl, spec, results, opts);
    if (csv.empty() && jsonl.empty()) {
      write_csv(os, spec, results, opts);
      return kSuccess;
    }

    const Printer p = output.printer();
    os << "# evchar convergence\n";
    echo_config(os, sub);
    const auto cols = spec.value_columns();
    const std::map<std::string, std::optional<double>> limit_of = {
        {"t1", limits.t1}, {"t2", limits.t2}, {"t3", limits.t3}, {"t4", limits.t4}, {"t5", limits.t5},
        {"t6", limits.t6}, {"t7", limits.t7}, {"t8", limits.t8}, {"t9", limits.t9}};
    for (std::size_t c = 0; c < cols.size(); ++c) {
      for (const Aggregate& a : summarize(results, c)) {
        const auto it = limit_of.find(cols[c]);
        const std::optional<double> lim = it == limit_of.end() ? std::nullopt : it->second;
        os << fmt::format("{} n={} mean={} sd={} min={} max={} defined={} limit={}\n", cols[c], a.n, p(a.mean),
                          p(a.sd), p(a.min), p(a.max), a.count, p(lim));
      }
    }
    return kSuccess;
  }
};

// ---------------------------------------------------------------- identity-check

struct IdentityCmd {
  std::size_t trials = 1000;
  std::size_t max_n = 200;
  std::uint64_t seed = 42;
  std::vector<double> values;
  std::optional<std::size_t> k;
  OutputFlags output;

  static constexpr double kTolerance = 1e-9;

  int run(const CLI::App* sub, std::ostream& os, std::ostream&) const {
    const Printer p = output.printer();
    if (!values.empty()) {
      std::vector<std::size_t> ks;
      if (k)
        ks.push_back(*k);
      else
        for (std::size_t i = 1; i < values.size(); ++i) ks.push_back(i);
      double worst = 0.0;
      for (std::size_t kk : ks) {
        const IdentitySides s = spacings_identity_sides(values, kk);
        const double rel = s.gap() / std::max(1.0, s.lhs);
        worst = std::max(worst, rel);
        os << fmt::format("k={} lhs={} rhs={} gap={}\n", kk, p(s.lhs), p(s.rhs), p(s.gap()));
      }
      os << (worst <= kTolerance ? "PASS" : "FAIL") << " max_rel_gap=" << p(worst) << '\n';
      return worst <= kTolerance ? kSuccess : kCheckFailed;
    }
    if (trials < 1) throw UsageError("--trials must be >= 1");
    if (max_n < 2) throw UsageError("--max-n must be >= 2");
    double worst = 0.0;
    std::size_t checks = 0;
    for (std::size_t t = 0; t < trials; ++t) {
      const std::uint64_t s = trial_seed(seed, t, 0);
      const std::size_t n = 2 + static_cast<std::size_t>(counter_draw(s, 0) % (max_n - 1));
      const double scale = std::pow(10.0, 6.0 * counter_uniform(s, 1) - 3.0);
      std::vector<double> xs(n);
      for (std::size_t i = 0; i < n; ++i) xs[i] = scale * (2.0 * counter_uniform(s, i + 2) - 1.0);
      for (std::size_t kk = 1; kk < n; ++kk) {
        const IdentitySides sides = spacings_identity_sides(xs, kk);
        worst = std::max(worst, sides.gap() / std::max(1.0, sides.lhs));
        ++checks;
      }
    }
    const bool pass = worst <= kTolerance;
    if (output.as_json) {
      json j;
      j["config"] = config_json(sub);
      j["pass"] = pass;
      j["trials"] = trials;
      j["checks"] = checks;
      j["max_rel_gap"] = p.j(worst);
      j["tolerance"] = kTolerance;
      os << j.dump() << '\n';
    } else {
      os << "# evchar identity-check\n";
      echo_config(os, sub);
      os << fmt::format("{} trials={} checks={} max_rel_gap={} tolerance={}\n", pass ? "PASS" : "FAIL", trials,
                        checks, p(worst), kTolerance);
    }
    return pass ? kSuccess : kCheckFailed;
  }
};

// ---------------------------------------------------------------- counterexample

struct CounterexampleCmd {
  std::size_t n = 1000000;
  std::size_t min_n = 10000;
  double alpha = 0.75;
  std::uint64_t seed = 42;
  std::string out;
  OutputFlags output;

  int run(const CLI::App* sub, std::ostream& os, std::ostream&) const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");
    if (min_n < 10 || min_n > n) throw UsageError("need 10 <= --min-n <= --n");
    std::vector<std::size_t> grid;
    for (std::size_t m = min_n; m < n; m *= 10) grid.push_back(m);
    grid.push_back(n);

    const QuantileModel model = builtin_model("mason_counterexample");
    const double target = 1.0 / std::numbers::ln2;
    const Printer p = output.printer();

    struct Row {
      std::size_t n, k, k_eval;
      double c_n, hill;
    };
    std::vector<Row> rows;
    std::vector<double> hill_main;
    double c_last = 0.0;
    for (std::size_t m : grid) {
      const SortedLogSample s = sample(model, m, trial_seed(seed, 0, m));
      const std::size_t k = floor_power(m, alpha);
      for (std::size_t kk : {k / 4, k / 2, k}) {
        if (kk < 2) continue;
        rows.push_back({m, k, kk, dehaan_resnick(s, kk), hill(s, kk, 1)});
      }
      hill_main.push_back(rows.back().hill);
      c_last = rows.back().c_n;
    }
    const auto [lo, hi] = std::minmax_element(hill_main.begin(), hill_main.end());
    const double ratio = *hi / *lo;

    if (!out.empty()) {
      std::ofstream f(out);
      if (!f) throw Error(ErrorCode::IoError, fmt::format("cannot open '{}' for writing", out));
      f << fmt::format("# model=mason_counterexample alpha={} seed={}\n", alpha, seed);
      f << "n,k_main,k,c_n,hill\n";
      for (const auto& r : rows)
        f << fmt::format("{},{},{},{:.17g},{:.17g}\n", r.n, r.k, r.k_eval, r.c_n, r.hill);
    }
    if (output.as_json) {
      json j;
      j["config"] = config_json(sub);
      json table = json::array();
      for (const auto& r : rows)
        table.push_back({{"n", r.n}, {"k", r.k_eval}, {"C_n", p.j(r.c_n)}, {"hill", p.j(r.hill)}});
      j["table"] = table;
      j["C_n"] = p.j(c_last);
      j["target"] = p.j(target);
      j["hill_max_min_ratio"] = p.j(ratio);
      os << j.dump() << '\n';
    } else {
      os << "# evchar counterexample\n";
      echo_config(os, sub);
      os << "n k C_n hill\n";
      for (const auto& r : rows) os << fmt::format("{} {} {} {}\n", r.n, r.k_eval, p(r.c_n), p(r.hill));
      os << fmt::format("C_n={} at n={} target=1/log(2)={} abs_diff={}\n", p(c_last), grid.back(), p(target),
                        p(std::abs(c_last - target)));
      os << fmt::format("hill_max_min_ratio={} across n at k=floor(n^alpha)\n", p(ratio));
    }
    return kSuccess;
  }
};

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Empirical characterization of extreme-value domains of attraction", "evchar"};
  app.require_subcommand(1, 1);
  app.option_defaults()->always_capture_default();
  app.add_option("--config", "key=value file; explicit flags win (default from EVCHAR_CONFIG)");

  GenCmd gen;
  auto* gen_cmd = app.add_subcommand("gen", "draw a sample from a built-in model, one value per line");
  gen.model.add_to(gen_cmd, true);
  gen_cmd->add_option("--n", gen.n, "sample size")->required();
  gen_cmd->add_option("--seed", gen.seed, "64-bit seed");
  gen_cmd->add_option("--out", gen.out, "output path, '-' for stdout");

  EstimateCmd est;
  auto* est_cmd = app.add_subcommand("estimate", "compute the nine-statistic vector T1..T9 of a sample");
  est_cmd->add_option("input,--input", est.input, "observation file")->required();
  est_cmd->add_option("--scale", est.scale, "raw (positive, logged) or log")->check(CLI::IsMember({"raw", "log"}));
  est.schedule.add_to(est_cmd);
  est_cmd->add_option("--k", est.k, "explicit k (overrides alpha)");
  est_cmd->add_option("--l", est.l, "explicit l (overrides beta)");
  est_cmd->add_option("--y0", est.y0, "log-scale right endpoint for T9");
  est.output.add_to(est_cmd);

  ClassifyCmd cls;
  auto* cls_cmd = app.add_subcommand("classify", "decide the domain of attraction");
  cls_cmd->add_option("--input", cls.input, "observation file (prefix sub-samples form the n grid)");
  cls_cmd->add_option("--scale", cls.scale, "raw or log")->check(CLI::IsMember({"raw", "log"}));
  cls.model.add_to(cls_cmd, false);
  cls_cmd->add_option("--n", cls.n, "largest sample size for --model");
  cls_cmd->add_option("--n-grid", cls.n_grid, "explicit increasing sample sizes");
  cls_cmd->add_option("--seed", cls.seed, "64-bit seed");
  cls.schedule.add_to(cls_cmd);
  cls_cmd->add_option("--eps-c", cls.tol.eps_c, "band around c = 1");
  cls_cmd->add_option("--eps-zero", cls.tol.eps_zero, "threshold for t2, t5 -> 0");
  cls_cmd->add_option("--eps-small", cls.tol.eps_small, "threshold for t8(beta/2), t9");
  cls_cmd->add_option("--window", cls.tol.stability_window, "grid points that must agree");
  cls_cmd->add_option("--y0", cls.y0, "log-scale right endpoint (enables the Weibull clause)");
  cls.output.add_to(cls_cmd);

  ConvergenceCmd conv;
  auto* conv_cmd = app.add_subcommand("convergence", "replicated Monte Carlo study with limit columns");
  conv.model.add_to(conv_cmd, false);
  conv.schedule.add_to(conv_cmd);
  conv_cmd->add_option("--n-grid", conv.n_grid, "strictly increasing sample sizes");
  conv_cmd->add_option("--replications", conv.replications, "replications per n");
  conv_cmd->add_option("--seed", conv.seed, "base seed");
  conv_cmd->add_option("--stats", conv.stats, "ecsfext hill a_stat dekkers dehaan_resnick diop_lo(tau)");
  conv_cmd->add_option("--y0", conv.y0, "log-scale endpoint for t9 (default: the model's)");
  conv_cmd->add_option("--csv", conv.csv, "append CSV results here");
  conv_cmd->add_option("--jsonl", conv.jsonl, "append JSON-lines results here");
  conv_cmd->add_option("--threads", conv.threads, "worker threads, 0 = all cores");
  conv_cmd->add_flag("--timing", conv.timing, "add wall_seconds (output no longer reproducible)");
  conv.output.add_to(conv_cmd);

  IdentityCmd ident;
  auto* id_cmd = app.add_subcommand("identity-check", "check the spacing identity on random vectors");
  id_cmd->add_option("--trials", ident.trials, "number of random vectors");
  id_cmd->add_option("--max-n", ident.max_n, "largest vector length");
  id_cmd->add_option("--seed", ident.seed, "64-bit seed");
  id_cmd->add_option("--values", ident.values, "check this vector instead")->delimiter(',');
  id_cmd->add_option("--k", ident.k, "single k for --values");
  ident.output.add_to(id_cmd);

  CounterexampleCmd cex;
  auto* cex_cmd = app.add_subcommand("counterexample", "C_n versus Hill on the non-Frechet counterexample");
  cex_cmd->add_option("--n", cex.n, "largest sample size");
  cex_cmd->add_option("--min-n", cex.min_n, "smallest sample size (grid grows by 10x)");
  cex_cmd->add_option("--alpha", cex.alpha, "k = floor(n^alpha)");
  cex_cmd->add_option("--seed", cex.seed, "64-bit seed");
  cex_cmd->add_option("--out", cex.out, "write the table as CSV");
  cex.output.add_to(cex_cmd);

  try {
    std::vector<std::string> args = apply_config(raw_args, app);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return exit_code_for(e.code());
  }

  try {
    if (*gen_cmd) return gen.run(gen_cmd, out, err);
    if (*est_cmd) return est.run(est_cmd, out, err);
    if (*cls_cmd) return cls.run(cls_cmd, out, err);
    if (*conv_cmd) return conv.run(conv_cmd, out, err);
    if (*id_cmd) return ident.run(id_cmd, out, err);
    if (*cex_cmd) return cex.run(cex_cmd, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return exit_code_for(e.code());
  }
  return kUsage;
}

}  // namespace evchar::cli
