#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "evchar/classifier.hpp"
#include "evchar/error.hpp"
#include "evchar/models.hpp"
#include "evchar/sample.hpp"

namespace evchar {

enum class StatKind { ecsfext, hill, a_stat, dekkers, dehaan_resnick, diop_lo };

struct StatisticRequest {
  StatKind kind = StatKind::hill;
  double tau = 1.0;  // diop_lo only

  std::string name() const;
  // "ecsfext", "hill", "a_stat", "dekkers", "dehaan_resnick", "diop_lo(<tau>)"
  static StatisticRequest parse(const std::string& text);
};

struct ExperimentSpec {
  std::string model;
  ModelParams params;
  double alpha = 0.75;
  double beta = 0.6;
  double delta = 0.49;
  std::optional<double> v;
  std::vector<std::size_t> n_grid;
  std::size_t replications = 1;
  std::uint64_t base_seed = 42;
  std::vector<StatisticRequest> statistics;
  std::optional<double> y0;

  IndexSchedule schedule() const;
  void validate() const;
  // Value columns in output order. ecsfext expands to t1..t9 and t8_half;
  // hill, a_stat use (k, 1); dehaan_resnick and diop_lo use k.
  std::vector<std::string> value_columns() const;
  // Self-describing header, one "key=value" per entry.
  std::vector<std::string> header_entries() const;
};

struct TrialResult {
  std::size_t n = 0;
  std::size_t replication = 0;
  std::uint64_t seed = 0;
  std::size_t k = 0;
  std::size_t l = 0;
  std::vector<std::optional<double>> values;  // aligned with value_columns()
  std::optional<ErrorCode> failure;
  std::string message;
  double wall_seconds = 0.0;

  bool ok() const { return !failure.has_value(); }
};

/// |n_grid| x replications trials ordered by (n, replication). Trial seeds
/// are trial_seed(base_seed, replication, n). Failures are recorded in the
/// row, never thrown. `threads` = 0 uses the hardware concurrency; results
/// are identical for every thread count.
std::vector<TrialResult> run_experiment(const ExperimentSpec& spec, unsigned threads = 1);

struct Aggregate {
  std::size_t n = 0;
  std::size_t count = 0;     // trials with a defined value
  std::size_t failures = 0;  // failed trials or undefined values
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation, 0 for a single value
  double min = 0.0;
  double max = 0.0;
  std::optional<double> success_fraction;  // share of defined values within target +- tol
};

/// Per-n aggregates of one value column. Values are sorted before the
/// single-pass Welford update, so the output does not depend on trial order.
std::vector<Aggregate> summarize(const std::vector<TrialResult>& results, std::size_t column,
                                 std::optional<double> target = std::nullopt, double tolerance = 0.0);

struct WriteOptions {
  bool include_timing = false;           // wall time breaks byte-identity
  const LimitVector* limits = nullptr;   // adds limit_t1..limit_t9 columns
};

/// CSV: '#'-prefixed header lines, a column line, one trial per row.
/// Numbers use 17 significant digits; undefined values are empty.
void write_csv(std::ostream& out, const ExperimentSpec& spec, const std::vector<TrialResult>& results,
               const WriteOptions& opts = {});

/// JSON lines: {"record":"spec",...} first, then one {"record":"trial",...}
/// object per trial; undefined values are null.
void write_jsonl(std::ostream& out, const ExperimentSpec& spec, const std::vector<TrialResult>& results,
                 const WriteOptions& opts = {});

enum class ResultFormat { csv, jsonl };

/// Append-only persistence. A new or empty file gets the header; an existing
/// file must carry an identical header (SpecMismatch otherwise) and only the
/// trial rows are appended.
void append_results(const std::string& path, ResultFormat format, const ExperimentSpec& spec,
                    const std::vector<TrialResult>& results, const WriteOptions& opts = {});

}  // namespace evchar
