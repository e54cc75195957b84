#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evchar/estimators.hpp"
#include "evchar/models.hpp"
#include "evchar/sample.hpp"

namespace evchar {

/// Finite-n thresholds for the limit statements.
struct Tolerances {
  double eps_c = 0.05;      // |t1 - 1| band
  double eps_zero = 0.05;   // "converges to 0" for t2, t5
  double eps_small = 0.05;  // t8 (beta/2 variant) and t9
  std::size_t stability_window = 3;

  // All positive, eps_c < sqrt(2) - 1 so the c-bands stay disjoint.
  void validate() const;
};

enum class Label { Gumbel, Frechet, Weibull, Unclassified };
std::string_view to_string(Label l) noexcept;

enum class Clause {
  none,
  frechet,          // c = 1, d = f = 1/gamma
  gumbel_infinite,  // c = 1, d = f = 0, T8(beta/2) -> 0, no endpoint
  gumbel_finite,    // same, with a finite endpoint supplied
  weibull,          // 1 < c < sqrt(2), d = f = 0, T9 -> 0
};
std::string_view to_string(Clause c) noexcept;

struct DomainVerdict {
  Label label = Label::Unclassified;
  std::optional<double> gamma_hat;
  Clause clause = Clause::none;
  std::vector<EcsfextVector> evidence;  // the window actually used, ascending n
  Tolerances tolerances;
  std::string reason;  // non-empty for Unclassified

  /// label=... gamma_hat=... clause=... eps_c=... eps_zero=... eps_small=... window=...
  std::string record(int precision = 10) const;
};

/// gamma = -2 + c^2 / (c^2 - 1) for 1 < c < sqrt(2); OutOfBand otherwise.
double gamma_from_c(double c);

/// c = sqrt((gamma + 2) / (gamma + 1)), the inverse of gamma_from_c.
double c_from_gamma(double gamma);

/// Applies the decision clauses to the last `tol.stability_window` vectors.
/// Clause conditions are checked on the largest-n vector; t1, t2 and t5 must
/// also be stable across the window: |a - b| <= 2 eps max(1, |a|, |b|) with
/// eps_c for t1 and eps_zero for t2 and t5.
DomainVerdict classify(std::span<const EcsfextVector> vectors, const Tolerances& tol = {});

/// Limit of each component as n grows; +inf where the limit is infinite and
/// empty where no limit is asserted.
struct LimitVector {
  std::optional<double> t1, t2, t3, t4, t5, t6, t7, t8, t9;
};

/// Limit vector implied by a domain, its index and (log-scale) endpoint.
LimitVector theoretical_limit(Domain domain, std::optional<double> gamma, std::optional<double> log_endpoint);

struct DiagnosticRow {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  EcsfextVector observed;
  LimitVector limit;
};

/// Samples `model` at each n in `n_grid` (seed trial_seed(seed, 0, n)) and
/// pairs the observed vector with the theoretical limit. t9 uses `y0` if
/// given, else the model's own log-scale endpoint when finite.
std::vector<DiagnosticRow> convergence_diagnostic(const QuantileModel& model, const IndexSchedule& schedule,
                                                  std::span<const std::size_t> n_grid, std::uint64_t seed,
                                                  std::optional<double> y0 = std::nullopt);

}  // namespace evchar
