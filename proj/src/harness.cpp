#include "evchar/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iterator>
#include <mutex>
#include <sstream>
#include <thread>

#include <fmt/core.h>
#include <json.hpp>

#include "evchar/estimators.hpp"
#include "evchar/rng.hpp"

namespace evchar {

std::string StatisticRequest::name() const {
  switch (kind) {
    case StatKind::ecsfext: return "ecsfext";
    case StatKind::hill: return "hill";
    case StatKind::a_stat: return "a_stat";
    case StatKind::dekkers: return "dekkers";
    case StatKind::dehaan_resnick: return "dehaan_resnick";
    case StatKind::diop_lo: return fmt::format("diop_lo({})", tau);
  }
  return "unknown";
}

StatisticRequest StatisticRequest::parse(const std::string& text) {
  if (text == "ecsfext") return {StatKind::ecsfext};
  if (text == "hill") return {StatKind::hill};
  if (text == "a_stat") return {StatKind::a_stat};
  if (text == "dekkers") return {StatKind::dekkers};
  if (text == "dehaan_resnick") return {StatKind::dehaan_resnick};
  if (text.rfind("diop_lo(", 0) == 0 && text.back() == ')') {
    const std::string inner = text.substr(8, text.size() - 9);
    double tau = 0.0;
    std::size_t used = 0;
    try {
      tau = std::stod(inner, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != inner.size() || !(tau > 0.0))
      throw Error(ErrorCode::InvalidParameter, fmt::format("bad diop_lo tau in '{}'", text));
    return {StatKind::diop_lo, tau};
  }
  throw Error(ErrorCode::InvalidParameter, fmt::format("unknown statistic '{}'", text));
}

IndexSchedule ExperimentSpec::schedule() const { return IndexSchedule::make(alpha, beta, delta, v); }

void ExperimentSpec::validate() const {
  builtin_model(model, params);
  schedule();
  if (replications < 1) throw Error(ErrorCode::InvalidExperiment, "replications must be >= 1");
  if (n_grid.empty()) throw Error(ErrorCode::InvalidExperiment, "n grid is empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 3) throw Error(ErrorCode::InvalidExperiment, "every n must be >= 3");
    if (i > 0 && n_grid[i] <= n_grid[i - 1])
      throw Error(ErrorCode::InvalidExperiment, "n grid must be strictly increasing");
  }
  if (statistics.empty()) throw Error(ErrorCode::InvalidExperiment, "no statistics requested");
}

std::vector<std::string> ExperimentSpec::value_columns() const {
  std::vector<std::string> cols;
  for (const auto& s : statistics) {
    if (s.kind == StatKind::ecsfext) {
      for (const char* c : {"t1", "t2", "t3", "t4", "t5", "t6", "t7", "t8", "t8_half", "t9"}) cols.emplace_back(c);
    } else {
      cols.push_back(s.name());
    }
  }
  return cols;
}

namespace {

std::string num(double x) { return fmt::format("{:.17g}", x); }

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

}  // namespace

std::vector<std::string> ExperimentSpec::header_entries() const {
  const IndexSchedule s = schedule();
  std::vector<std::string> grid, stats;
  for (auto n : n_grid) grid.push_back(std::to_string(n));
  for (const auto& st : statistics) stats.push_back(st.name());
  QuantileModel m = builtin_model(model, params);
  return {
      "format=evchar-results-1",
      "model=" + m.label(),
      fmt::format("alpha={}", num(s.alpha())),
      fmt::format("beta={}", num(s.beta())),
      fmt::format("delta={}", num(s.delta())),
      fmt::format("v={}", num(s.v())),
      "n_grid=" + join(grid, " "),
      fmt::format("replications={}", replications),
      fmt::format("base_seed={}", base_seed),
      "statistics=" + join(stats, " "),
      "y0=" + (y0 ? num(*y0) : std::string("NA")),
      "seed_rule=trial_seed(base_seed,replication,n)",
  };
}

namespace {

void fill_values(TrialResult& row, const ExperimentSpec& spec, const IndexSchedule& schedule,
                 const SortedLogSample& sample) {
  const IndexPair idx = derive_indices(schedule, sample.size());
  row.k = idx.k;
  row.l = idx.l;
  for (const auto& s : spec.statistics) {
    switch (s.kind) {
      case StatKind::ecsfext: {
        const EcsfextVector v = ecsfext_vector(sample, idx, schedule.v(), schedule.beta(), spec.y0);
        for (const std::optional<double>& x :
             {v.t1, std::optional<double>(v.t2), std::optional<double>(v.t3), std::optional<double>(v.t4),
              std::optional<double>(v.t5), v.t6, v.t7, v.t8, v.t8_half, v.t9})
          row.values.push_back(x);
        break;
      }
      case StatKind::hill: row.values.emplace_back(hill(sample, idx.k, 1)); break;
      case StatKind::a_stat: row.values.emplace_back(a_stat(sample, idx.k, 1)); break;
      case StatKind::dekkers: row.values.emplace_back(dekkers_moment(sample, idx.k)); break;
      case StatKind::dehaan_resnick: row.values.emplace_back(dehaan_resnick(sample, idx.k)); break;
      case StatKind::diop_lo: row.values.emplace_back(diop_lo(sample, idx.k, s.tau)); break;
    }
  }
}

TrialResult run_trial(const ExperimentSpec& spec, const QuantileModel& model, const IndexSchedule& schedule,
                      std::size_t n, std::size_t replication) {
  TrialResult row;
  row.n = n;
  row.replication = replication;
  row.seed = trial_seed(spec.base_seed, replication, n);
  const auto start = std::chrono::steady_clock::now();
  try {
    fill_values(row, spec, schedule, sample(model, n, row.seed));
  } catch (const Error& e) {
    row.values.clear();
    row.failure = e.code();
    row.message = e.what();
  }
  row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

}  // namespace

std::vector<TrialResult> run_experiment(const ExperimentSpec& spec, unsigned threads) {
  spec.validate();
  const QuantileModel model = builtin_model(spec.model, spec.params);
  const IndexSchedule schedule = spec.schedule();
  const std::size_t total = spec.n_grid.size() * spec.replications;
  std::vector<TrialResult> results(total);

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));
  std::atomic<std::size_t> next{0};
  std::exception_ptr fatal;
  std::mutex fatal_mutex;
  auto worker = [&] {
    for (std::size_t t = next++; t < total; t = next++) {
      try {
        results[t] = run_trial(spec, model, schedule, spec.n_grid[t / spec.replications], t % spec.replications);
      } catch (...) {
        std::lock_guard lock(fatal_mutex);
        if (!fatal) fatal = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (fatal) std::rethrow_exception(fatal);
  return results;
}

std::vector<Aggregate> summarize(const std::vector<TrialResult>& results, std::size_t column,
                                 std::optional<double> target, double tolerance) {
  if (results.empty()) throw Error(ErrorCode::EmptyResults, "nothing to summarize");
  std::vector<std::size_t> ns;
  for (const auto& r : results) ns.push_back(r.n);
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());

  std::vector<Aggregate> out;
  for (const std::size_t n : ns) {
    Aggregate agg;
    agg.n = n;
    std::vector<double> values;
    for (const auto& r : results) {
      if (r.n != n) continue;
      if (r.ok() && column < r.values.size() && r.values[column])
        values.push_back(*r.values[column]);
      else
        ++agg.failures;
    }
    std::sort(values.begin(), values.end());
    double mean = 0.0, m2 = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double x = values[i];
      const double d = x - mean;
      mean += d / static_cast<double>(i + 1);
      m2 += d * (x - mean);
      if (target && std::abs(x - *target) <= tolerance) ++hits;
    }
    agg.count = values.size();
    if (!values.empty()) {
      agg.mean = mean;
      agg.sd = values.size() > 1 ? std::sqrt(m2 / static_cast<double>(values.size() - 1)) : 0.0;
      agg.min = values.front();
      agg.max = values.back();
      if (target) agg.success_fraction = static_cast<double>(hits) / static_cast<double>(values.size());
    } else if (target) {
      agg.success_fraction = 0.0;
    }
    out.push_back(agg);
  }
  return out;
}

namespace {

std::vector<std::optional<double>> limit_values(const LimitVector& l) {
  return {l.t1, l.t2, l.t3, l.t4, l.t5, l.t6, l.t7, l.t8, l.t9};
}

const char* const kLimitColumns[] = {"limit_t1", "limit_t2", "limit_t3", "limit_t4", "limit_t5",
                                     "limit_t6", "limit_t7", "limit_t8", "limit_t9"};

std::string status_of(const TrialResult& r) {
  return r.ok() ? std::string("ok") : std::string(to_string(*r.failure));
}

void write_csv_header(std::ostream& out, const ExperimentSpec& spec, const WriteOptions& opts) {
  for (const auto& e : spec.header_entries()) out << "# " << e << '\n';
  std::vector<std::string> cols = {"n", "replication", "seed", "k", "l", "status"};
  for (auto& c : spec.value_columns()) cols.push_back(c);
  if (opts.limits)
    for (const char* c : kLimitColumns) cols.emplace_back(c);
  if (opts.include_timing) cols.emplace_back("wall_seconds");
  out << join(cols, ",") << '\n';
}

void write_csv_rows(std::ostream& out, const ExperimentSpec& spec, const std::vector<TrialResult>& results,
                    const WriteOptions& opts) {
  const std::size_t width = spec.value_columns().size();
  for (const auto& r : results) {
    std::vector<std::string> cells = {std::to_string(r.n), std::to_string(r.replication), std::to_string(r.seed),
                                      std::to_string(r.k), std::to_string(r.l), status_of(r)};
    for (std::size_t c = 0; c < width; ++c)
      cells.push_back(c < r.values.size() && r.values[c] ? num(*r.values[c]) : std::string());
    if (opts.limits)
      for (const auto& x : limit_values(*opts.limits)) cells.push_back(x ? num(*x) : std::string());
    if (opts.include_timing) cells.push_back(num(r.wall_seconds));
    out << join(cells, ",") << '\n';
  }
}

nlohmann::ordered_json opt_json(const std::optional<double>& x) {
  // JSON has no infinity; infinite limits are spelled as strings.
  if (!x) return nullptr;
  if (std::isinf(*x)) return *x > 0 ? "inf" : "-inf";
  return *x;
}

void write_jsonl_header(std::ostream& out, const ExperimentSpec& spec, const WriteOptions& opts) {
  nlohmann::ordered_json head;
  head["record"] = "spec";
  for (const auto& e : spec.header_entries()) {
    const auto eq = e.find('=');
    head[e.substr(0, eq)] = e.substr(eq + 1);
  }
  head["columns"] = spec.value_columns();
  if (opts.limits) {
    nlohmann::ordered_json lim;
    const auto vals = limit_values(*opts.limits);
    for (std::size_t i = 0; i < vals.size(); ++i) lim[std::string("t") + std::to_string(i + 1)] = opt_json(vals[i]);
    head["limits"] = lim;
  }
  out << head.dump() << '\n';
}

void write_jsonl_rows(std::ostream& out, const ExperimentSpec& spec, const std::vector<TrialResult>& results,
                      const WriteOptions& opts) {
  const auto cols = spec.value_columns();
  for (const auto& r : results) {
    nlohmann::ordered_json row;
    row["record"] = "trial";
    row["n"] = r.n;
    row["replication"] = r.replication;
    row["seed"] = r.seed;
    row["k"] = r.k;
    row["l"] = r.l;
    row["status"] = status_of(r);
    if (!r.ok()) row["message"] = r.message;
    nlohmann::ordered_json values = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < cols.size(); ++c)
      values[cols[c]] = c < r.values.size() ? opt_json(r.values[c]) : nlohmann::ordered_json(nullptr);
    row["values"] = values;
    if (opts.include_timing) row["wall_seconds"] = r.wall_seconds;
    out << row.dump() << '\n';
  }
}

}  // namespace

void write_csv(std::ostream& out, const ExperimentSpec& spec, const std::vector<TrialResult>& results,
               const WriteOptions& opts) {
  write_csv_header(out, spec, opts);
  write_csv_rows(out, spec, results, opts);
}

void write_jsonl(std::ostream& out, const ExperimentSpec& spec, const std::vector<TrialResult>& results,
                 const WriteOptions& opts) {
  write_jsonl_header(out, spec, opts);
  write_jsonl_rows(out, spec, results, opts);
}

void append_results(const std::string& path, ResultFormat format, const ExperimentSpec& spec,
                    const std::vector<TrialResult>& results, const WriteOptions& opts) {
  std::ostringstream header;
  if (format == ResultFormat::csv)
    write_csv_header(header, spec, opts);
  else
    write_jsonl_header(header, spec, opts);
  const std::string expected = header.str();

  std::string existing;
  {
    std::ifstream in(path, std::ios::binary);
    if (in) existing.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorCode::IoError, fmt::format("cannot open '{}' for appending", path));
  if (existing.empty()) {
    out << expected;
  } else if (existing.compare(0, expected.size(), expected) != 0) {
    throw Error(ErrorCode::SpecMismatch, fmt::format("'{}' holds results of a different experiment", path));
  }
  if (format == ResultFormat::csv)
    write_csv_rows(out, spec, results, opts);
  else
    write_jsonl_rows(out, spec, results, opts);
  if (!out) throw Error(ErrorCode::IoError, fmt::format("failed writing '{}'", path));
}

}  // namespace evchar
