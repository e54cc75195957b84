#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "evchar/error.hpp"
#include "evchar/rng.hpp"
#include "evchar/sample.hpp"
#include "oracles.hpp"

using namespace evchar;

namespace {

SortedLogSample logs(std::vector<double> v) { return SortedLogSample::from_log_values(std::move(v), SourceScale::already_log); }

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("counter-based generator matches SplitMix64 test vectors") {
  CHECK(counter_draw(0, 0) == 0xE220A8397B1DCDAFULL);
  CHECK(counter_draw(0, 1) == 0x6E789E6AA1B965F4ULL);
  CHECK(counter_draw(0, 2) == 0x06C45D188009454FULL);
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const double u = counter_uniform(123, i);
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
  CHECK(trial_seed(42, 0, 100) != trial_seed(42, 1, 100));
  CHECK(trial_seed(42, 0, 100) != trial_seed(42, 0, 1000));
}

TEST_CASE("from_observations logs raw data and sorts") {
  const double e = std::numbers::e;
  const std::vector<double> raw{e, e * e, std::pow(e, 4)};
  const auto s = SortedLogSample::from_observations(raw, SourceScale::raw_positive);
  REQUIRE(s.size() == 3);
  CHECK(s.order_stat(1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.order_stat(2) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(s.order_stat(3) == doctest::Approx(4.0).epsilon(1e-15));

  const std::vector<double> shuffled{4, 1, 2};
  const auto t = SortedLogSample::from_observations(shuffled, SourceScale::already_log);
  CHECK(t.values()[0] == 1.0);
  CHECK(t.values()[1] == 2.0);
  CHECK(t.values()[2] == 4.0);
  CHECK(t.max() == 4.0);
  CHECK(t.upper(0) == 4.0);
  CHECK(t.upper(2) == 1.0);
  CHECK(t.spacing(1) == 2.0);
  CHECK(t.spacing(2) == 1.0);
}

TEST_CASE("from_observations rejects bad input") {
  const std::vector<double> zero{0.0, 1.0, 2.0};
  CHECK(code_of([&] { SortedLogSample::from_observations(zero, SourceScale::raw_positive); }) ==
        ErrorCode::NonPositiveObservation);
  const std::vector<double> empty;
  CHECK(code_of([&] { SortedLogSample::from_observations(empty, SourceScale::raw_positive); }) ==
        ErrorCode::EmptyInput);
  const std::vector<double> nan{1.0, std::nan(""), 2.0};
  CHECK(code_of([&] { SortedLogSample::from_observations(nan, SourceScale::already_log); }) ==
        ErrorCode::NonFiniteInput);
  const std::vector<double> two{1.0, 2.0};
  CHECK(code_of([&] { SortedLogSample::from_observations(two, SourceScale::raw_positive); }) ==
        ErrorCode::SampleTooSmall);
  const std::vector<double> neg_log{-3.0, 0.0, 2.0};
  CHECK_NOTHROW(SortedLogSample::from_observations(neg_log, SourceScale::already_log));
}

TEST_CASE("index schedule") {
  const auto sched = IndexSchedule::make(0.75, 0.6, 0.49);
  CHECK(derive_k(sched, 100) == 31);
  CHECK(derive_l(sched, 100) == 15);
  CHECK(sched.v() == doctest::Approx(0.045));
  CHECK(floor_power(3, 0.9) == 2);
  CHECK(floor_power(10000, 0.75) == 1000);
  CHECK(floor_power(100000, 0.6) == 1000);
  CHECK(floor_power(1000000, 0.75) == 31622);

  const IndexPair ten = derive_indices(sched, 10);
  CHECK(ten.k == 5);
  CHECK(ten.l == 3);
  CHECK(code_of([&] { derive_indices(sched, 4); }) == ErrorCode::DegenerateSchedule);
  CHECK(code_of([&] { derive_indices(sched, 2); }) == ErrorCode::SampleTooSmall);

  CHECK(code_of([] { IndexSchedule::make(0.6, 0.75, 0.49); }) == ErrorCode::InvalidSchedule);
  CHECK(code_of([] { IndexSchedule::make(0.75, 0.6, 0.5); }) == ErrorCode::InvalidSchedule);
  CHECK(code_of([] { IndexSchedule::make(0.75, 0.6, 0.3); }) == ErrorCode::InvalidSchedule);
  CHECK(code_of([] { IndexSchedule::make(1.0, 0.6, 0.49); }) == ErrorCode::InvalidSchedule);
  CHECK(code_of([] { IndexSchedule::make(0.75, 0.6, 0.49, -1.0); }) == ErrorCode::InvalidSchedule);
  CHECK(IndexSchedule::make(0.75, 0.6, 0.49, 0.25).v() == 0.25);
}

TEST_CASE("floor_power is monotone in n and stays in range") {
  std::size_t prev = 0;
  for (std::size_t n = 2; n < 5000; ++n) {
    const std::size_t k = floor_power(n, 0.75);
    CHECK(k >= 1);
    CHECK(k <= n - 1);
    CHECK(k >= prev);
    prev = k;
  }
}

TEST_CASE("tail integrals on hand-worked samples") {
  const auto s = logs({1, 2, 4});
  const auto single = tail_integral_single(s, 2, 1);
  CHECK(single.value == 4.0);
  CHECK(single.lower == 1.0);
  CHECK(single.upper == 4.0);
  CHECK(single.order == IntegralOrder::single);
  CHECK(tail_integral_double(s, 2, 1).value == 5.0);
  CHECK(tail_integral_double(s, 2, 1).order == IntegralOrder::double_);

  std::vector<double> ramp(10);
  for (int i = 0; i < 10; ++i) ramp[i] = i;
  CHECK(tail_integral_single(logs(ramp), 4, 1).value == 10.0);

  const auto flat = logs({3, 3, 3, 3, 3});
  CHECK(tail_integral_single(flat, 3, 2).value == 0.0);
  CHECK(tail_integral_double(flat, 4, 1).value == 0.0);

  CHECK(code_of([&] { tail_integral_single(s, 3, 1); }) == ErrorCode::IndexOutOfRange);
  CHECK(code_of([&] { tail_integral_single(s, 1, 2); }) == ErrorCode::IndexOutOfRange);
  CHECK(code_of([&] { tail_integral_double(s, 2, 0); }) == ErrorCode::IndexOutOfRange);
}

TEST_CASE("tail integrals match piecewise-exact integration of the empirical tail") {
  for (std::uint64_t t = 0; t < 200; ++t) {
    const std::uint64_t seed = trial_seed(7, t, 0);
    const std::size_t n = 3 + counter_draw(seed, 1000) % 150;
    auto v = oracle::random_vector(seed, n, 5.0);
    const auto s = logs(v);
    const std::size_t k = 1 + counter_draw(seed, 1001) % (n - 1);
    const std::size_t l = 1 + counter_draw(seed, 1002) % k;
    const auto ref = oracle::empirical_tail(v, s.upper(k), s.upper(l - 1));
    CHECK(tail_integral_single(s, k, l).value == doctest::Approx(ref.single).epsilon(1e-12));
    CHECK(tail_integral_double(s, k, l).value == doctest::Approx(ref.double_).epsilon(1e-12));
  }
}

TEST_CASE("tail integrals are shift invariant and scale with the right power") {
  const auto v = oracle::random_vector(99, 60, 2.0);
  std::vector<double> moved(v);
  for (double& x : moved) x = 3.0 * x + 11.0;
  const auto a = logs(v);
  const auto b = logs(moved);
  for (std::size_t k = 1; k < 60; k += 7) {
    CHECK(tail_integral_single(b, k, 1).value == doctest::Approx(3.0 * tail_integral_single(a, k, 1).value));
    CHECK(tail_integral_double(b, k, 1).value == doctest::Approx(9.0 * tail_integral_double(a, k, 1).value));
  }
}
