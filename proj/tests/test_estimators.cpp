#include "clickstat/errors.hpp"
#include "clickstat/estimators.hpp"

#include <doctest.h>

#include <cmath>

using namespace clickstat;

namespace {

ClickSampleSet samples_of(std::vector<int> clicks, int detectors) {
  ClickSampleSet s;
  s.detectors = detectors;
  s.trials = clicks.size();
  s.clicks = std::move(clicks);
  return s;
}

ErrorCode error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("empirical frequencies count records") {
  const auto zeros = empirical_frequencies(samples_of({0, 0, 0}, 2));
  CHECK(zeros.probs(0) == 1.0);
  CHECK(zeros.probs(1) == 0.0);
  const auto mixed = empirical_frequencies(samples_of({0, 1, 1, 2}, 2));
  CHECK(mixed.probs(0) == 0.25);
  CHECK(mixed.probs(1) == 0.5);
  CHECK(mixed.probs(2) == 0.25);
  CHECK(error_of([] { empirical_frequencies(samples_of({3}, 2)); }) == ErrorCode::InvalidSample);
  CHECK(error_of([] { empirical_frequencies(samples_of({}, 2)); }) == ErrorCode::InsufficientData);
}

TEST_CASE("Q_B point estimates") {
  CHECK(std::abs(qb_estimate(samples_of({0, 1, 1, 2}, 2)).point_estimate - 1.0 / 3.0) < 1e-15);
  CHECK(qb_estimate(samples_of({1, 1, 1, 1}, 2)).point_estimate == -1.0);
  CHECK(error_of([] { qb_estimate(samples_of({0, 0, 0, 0}, 2)); }) == ErrorCode::DegenerateMean);
  CHECK(error_of([] { qb_estimate(samples_of({2, 2, 2}, 2)); }) == ErrorCode::DegenerateMean);
  CHECK(error_of([] { qb_estimate(samples_of({1}, 2)); }) == ErrorCode::InsufficientData);
  CHECK(error_of([] { qb_estimate(samples_of({1, 5}, 2)); }) == ErrorCode::InvalidSample);
  const auto report = qb_estimate(samples_of({0, 1, 1, 2}, 2));
  CHECK(report.statistic == Statistic::QB);
  CHECK(report.sample_size == 4);
  CHECK(report.bootstrap_replicates == 0);
  CHECK(std::isnan(report.ci_low));
}

TEST_CASE("Mandel Q point estimates") {
  const std::vector<int> flat{2, 2, 2};
  CHECK(mandel_q_estimate(flat).point_estimate == -1.0);
  const std::vector<int> spread{0, 1, 1, 2};
  CHECK(std::abs(mandel_q_estimate(spread).point_estimate + 1.0 / 3.0) < 1e-15);
  CHECK(error_of([] {
          const std::vector<int> zeros{0, 0, 0};
          mandel_q_estimate(zeros);
        }) == ErrorCode::DegenerateMean);
  CHECK(error_of([] {
          const std::vector<int> one{4};
          mandel_q_estimate(one);
        }) == ErrorCode::InsufficientData);
}

TEST_CASE("population-variance estimate matches Mandel Q of the empirical frequencies") {
  const auto samples = simulate(StateSpec::thermal(1.3), {6, 0.8, 0.01}, 3000, 77);
  const double population = mandel_q_point_estimate(samples.clicks, VarianceKind::Population);
  CHECK(std::abs(population - mandel_q(empirical_frequencies(samples).probs)) < 1e-12);
  const double qb_population = qb_point_estimate(samples.clicks, samples.detectors, VarianceKind::Population);
  CHECK(std::abs(qb_population - qb_parameter(empirical_frequencies(samples))) < 1e-12);
  // Unbiased and population variances differ by n/(n-1).
  const double n = static_cast<double>(samples.clicks.size());
  const double unbiased = mandel_q_point_estimate(samples.clicks);
  CHECK(std::abs((unbiased + 1.0) - (population + 1.0) * n / (n - 1.0)) < 1e-12);
}

TEST_CASE("bootstrap interval is deterministic and brackets the estimate") {
  const auto samples = simulate(StateSpec::fock(3), {4, 0.6, 0.0}, 2000, 5);
  const auto a = bootstrap_ci(samples, Statistic::QB, 500, 0.9, 123);
  const auto b = bootstrap_ci(samples, Statistic::QB, 500, 0.9, 123, 3);
  CHECK(a.low == b.low);
  CHECK(a.high == b.high);
  CHECK(a.low < a.high);
  CHECK(a.discarded == 0);
  const auto report = qb_estimate(samples, {500, 0.9, 123, 2});
  CHECK(report.ci_low <= report.point_estimate);
  CHECK(report.point_estimate <= report.ci_high);
  CHECK(report.bootstrap_replicates == 500);
  CHECK(report.ci_high < 0.0);  // sub-binomial light is resolved at this sample size

  const auto qm = bootstrap_ci(samples, Statistic::QM, 200, 0.95, 9);
  CHECK(qm.low < qm.high);
}

TEST_CASE("bootstrap input floors") {
  const auto samples = simulate(StateSpec::coherent(2.0), {4, 0.5, 0.0}, 100, 5);
  CHECK(error_of([&] { bootstrap_ci(samples, Statistic::QB, 10, 0.95, 1); }) == ErrorCode::InsufficientData);
  const auto tiny = samples_of({0, 1, 2, 1, 0}, 2);
  CHECK(error_of([&] { bootstrap_ci(tiny, Statistic::QB, 100, 0.95, 1); }) == ErrorCode::InsufficientData);
  CHECK(error_of([&] { bootstrap_ci(samples, Statistic::QB, 100, 1.5, 1); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("degenerate resamples are dropped and counted") {
  // One click in a record of twelve: many resamples contain no clicks at all.
  std::vector<int> clicks(12, 0);
  clicks[3] = 1;
  const auto rare = samples_of(clicks, 2);
  const auto ci = bootstrap_ci(rare, Statistic::QB, 400, 0.95, 17);
  CHECK(ci.discarded > 0);
  CHECK(ci.discarded < 400);
  const auto report = qb_estimate(rare, {400, 0.95, 17, 1});
  CHECK(report.discarded_resamples == ci.discarded);

  const auto silent = samples_of(std::vector<int>(20, 0), 2);
  CHECK(error_of([&] { bootstrap_ci(silent, Statistic::QB, 100, 0.95, 1); }) == ErrorCode::AllResamplesDegenerate);
}

TEST_CASE("plug-in Q_B converges for a long coherent record") {
  const auto samples = simulate(StateSpec::coherent(4.0), {8, 0.5, 0.0}, 1'000'000, 99);
  CHECK(std::abs(qb_estimate(samples).point_estimate) <= 0.02);
}
