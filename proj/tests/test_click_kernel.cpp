#include "clickstat/click_kernel.hpp"
#include "clickstat/errors.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace clickstat;

namespace {

double max_abs_diff(const Vector<double>& a, const Vector<double>& b) {
  REQUIRE(a.size() == b.size());
  return (a - b).cwiseAbs().maxCoeff();
}

double max_abs_diff(const Vector<double>& a, const std::vector<double>& b) {
  return max_abs_diff(a, Eigen::Map<const Vector<double>>(b.data(), static_cast<Eigen::Index>(b.size())));
}

ClickDistribution dist_of(std::vector<double> probs) {
  return ClickDistribution{Eigen::Map<Vector<double>>(probs.data(), static_cast<Eigen::Index>(probs.size()))};
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

const std::vector<double> kEtaGrid{0.05, 0.1, 0.25, 0.5, 0.75, 1.0};

std::vector<StateSpec> grid_states() {
  return {StateSpec::coherent(0.5), StateSpec::coherent(4.0),       StateSpec::coherent(10.0),
          StateSpec::thermal(0.5),  StateSpec::thermal(5.0),        StateSpec::fock(1),
          StateSpec::fock(5),       StateSpec::fock(20),            StateSpec::squeezed_vacuum(0.4),
          StateSpec::squeezed_vacuum(1.5),
          StateSpec::mixture({{0.6, StateSpec::fock(2)}, {0.4, StateSpec::thermal(1.0)}}),
          StateSpec::explicit_distribution({0.1, 0.2, 0.3, 0.4})};
}

}  // namespace

TEST_CASE("occupancy distribution examples") {
  const auto empty = occupancy_distribution(0, 5);
  REQUIRE(empty.size() == 1);
  CHECK(empty(0) == 1.0);

  const auto two = occupancy_distribution(2, 2);
  CHECK(max_abs_diff(two, std::vector<double>{0.0, 0.5, 0.5}) < 1e-15);

  const auto four = occupancy_distribution(4, 4);
  CHECK(max_abs_diff(four, std::vector<double>{0.0, 4 / 256.0, 84 / 256.0, 144 / 256.0, 24 / 256.0}) < 1e-15);
}

TEST_CASE("occupancy matches enumeration and Stirling numbers") {
  for (int bins = 1; bins <= 5; ++bins) {
    for (int balls = 0; balls <= 6; ++balls) {
      const auto occ = occupancy_distribution(balls, bins);
      CHECK(max_abs_diff(occ, oracle::occupancy_by_enumeration(balls, bins)) < 1e-12);  // oracle sums N^m terms
      const auto stirling = oracle::occupancy_by_stirling(balls, bins);
      for (std::size_t k = 0; k < stirling.size(); ++k) CHECK(std::abs(occ(k) - static_cast<double>(stirling[k])) < 1e-14);
    }
  }
  for (int balls : {10, 20, 30}) {
    const auto stirling = oracle::occupancy_by_stirling(balls, 12);
    const auto occ = occupancy_distribution(balls, 12);
    for (std::size_t k = 0; k < stirling.size(); ++k) CHECK(std::abs(occ(k) - static_cast<double>(stirling[k])) < 1e-13);
  }
}

TEST_CASE("occupancy stays normalized and nonnegative for large inputs") {
  for (auto [balls, bins] : {std::pair{4096, 1024}, std::pair{4096, 7}, std::pair{100, 1024}}) {
    const auto occ = occupancy_distribution(balls, bins);
    CHECK(occ.minCoeff() >= 0.0);
    CHECK(std::abs(occ.sum() - 1.0) < 1e-12);
  }
  CHECK(occupancy_distribution<long double>(3, 3).size() == 4);
}

TEST_CASE("binomial reference") {
  const auto zero = binomial_reference(5, 0.0);
  CHECK(zero.probs(0) == 1.0);
  CHECK(zero.probs.tail(5).isZero());
  CHECK(max_abs_diff(binomial_reference(2, 0.5).probs, std::vector<double>{0.25, 0.5, 0.25}) < 1e-16);
  CHECK(std::abs(qb_parameter(binomial_reference(8, 0.3))) < 1e-12);
  // Log-space coefficients above N = 60.
  const auto big = binomial_reference(200, 0.3);
  CHECK(std::abs(big.probs.sum() - 1.0) < 1e-12);
  CHECK(std::abs(click_moments(big).mean - 60.0) < 1e-9);
  CHECK(std::abs(qb_parameter(big)) < 1e-9);
  CHECK(error_of([] { binomial_reference(0, 0.5); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("click moments") {
  const auto point = click_moments(dist_of({0, 0, 0, 1, 0}));
  CHECK(point.mean == 3.0);
  CHECK(point.variance == 0.0);
  const auto thermal = click_moments(dist_of({0.5, 1.0 / 3.0, 1.0 / 6.0}));
  CHECK(std::abs(thermal.mean - 2.0 / 3.0) < 1e-15);
  CHECK(std::abs(thermal.variance - 5.0 / 9.0) < 1e-15);
  // Np and Np(1-p), evaluated in 50-digit arithmetic.
  const auto binom = click_moments(binomial_reference(8, 1.0 - std::exp(-0.25)));
  CHECK(std::abs(binom.mean - 1.7695937354287611) < 1e-13);
  CHECK(std::abs(binom.variance - 1.3781609868701716) < 1e-13);
}

TEST_CASE("qb parameter and Mandel Q on distributions") {
  CHECK(std::abs(qb_parameter(dist_of({0.5, 1.0 / 3.0, 1.0 / 6.0})) - 0.25) < 1e-14);
  CHECK(std::abs(qb_parameter(dist_of({0.5, 0.5, 0, 0, 0, 0, 0, 0, 0})) + 7.0 / 15.0) < 1e-15);
  CHECK(error_of([] { qb_parameter(dist_of({1, 0, 0})); }) == ErrorCode::DegenerateMean);
  CHECK(error_of([] { qb_parameter(dist_of({0, 0, 1})); }) == ErrorCode::DegenerateMean);

  const auto poisson = make_distribution(StateSpec::coherent(4.0));
  CHECK(std::abs(mandel_q(poisson.probs)) < 1e-12);
  CHECK(std::abs(mandel_q(make_distribution(StateSpec::thermal(1.0)).probs) - 1.0) < 1e-10);
  const auto clicks = click_distribution(StateSpec::coherent(4.0), {8, 0.5, 0.0});
  CHECK(std::abs(mandel_q(clicks.probs) + 0.22119921692859513) < 1e-12);
  CHECK(error_of([] { mandel_q(Vector<double>::Unit(3, 0)); }) == ErrorCode::DegenerateMean);
}

TEST_CASE("click distribution examples") {
  const auto methods = {ClickMethod::GeneratingFunction, ClickMethod::OccupancyDp, ClickMethod::Auto};
  for (auto method : methods) {
    CAPTURE(to_string(method));
    const auto coherent = click_distribution(StateSpec::coherent(4.0), {8, 0.5, 0.0}, method);
    CHECK(max_abs_diff(coherent.probs, binomial_reference(8, 1.0 - std::exp(-0.25)).probs) < 1e-12);
    CHECK(max_abs_diff(click_distribution(StateSpec::fock(2), {2, 1.0, 0.0}, method).probs,
                       std::vector<double>{0.0, 0.5, 0.5}) < 1e-15);
    CHECK(max_abs_diff(click_distribution(StateSpec::thermal(1.0), {2, 1.0, 0.0}, method).probs,
                       std::vector<double>{0.5, 1.0 / 3.0, 1.0 / 6.0}) < 1e-13);
    for (int n_det : {1, 3, 16}) {
      const auto vacuum = click_distribution(StateSpec::fock(0), {n_det, 0.7, 0.0}, method);
      CHECK(vacuum.probs(0) == doctest::Approx(1.0).epsilon(1e-15));
    }
  }
}

TEST_CASE("click distributions match 50-digit reference values") {
  struct Case {
    StateSpec spec;
    DetectorConfig config;
    std::vector<double> expected;
    double qb;
  };
  const std::vector<Case> cases{
      {StateSpec::thermal(1.5), {4, 0.7, 0.1},
       {0.32698538831006795, 0.34983348604748845, 0.20982296181213752, 0.089723686493057725, 0.023634477337248349},
       0.3429312566645988},
      {StateSpec::squeezed_vacuum(0.8), {4, 0.6, 0.05},
       {0.63497363768523519, 0.22532904883609687, 0.098845926472561375, 0.032829008192115529, 0.0080223788139910276},
       0.54736446335659771},
      {StateSpec::fock(3), {4, 0.9, 0.0}, {0.001, 0.1333125, 0.5923125, 0.273375, 0.0}, -0.6064985963644593},
  };
  for (const auto& c : cases) {
    for (auto method : {ClickMethod::GeneratingFunction, ClickMethod::OccupancyDp, ClickMethod::Auto}) {
      const auto dist = click_distribution(c.spec, c.config, method);
      CHECK(max_abs_diff(dist.probs, c.expected) < 1e-13);
      CHECK(std::abs(qb_parameter(dist) - c.qb) < 1e-12);
    }
  }
}

TEST_CASE("occupancy path matches per-photon enumeration with dark counts") {
  for (int photons = 0; photons <= 4; ++photons) {
    for (int n_det = 1; n_det <= 4; ++n_det) {
      for (double eta : {0.3, 1.0}) {
        for (double nu : {0.0, 0.2}) {
          const auto path_b = click_distribution_occupancy(StateSpec::fock(photons), {n_det, eta, nu});
          CHECK(max_abs_diff(path_b.probs, oracle::fock_clicks_by_enumeration(photons, n_det, eta, nu)) < 1e-14);
        }
      }
    }
  }
}

TEST_CASE("occupancy path equals thinning, occupancy and dark convolution in sequence") {
  auto occupancy = [](int m, int n) {
    const auto occ = occupancy_distribution(m, n);
    return std::vector<double>(occ.data(), occ.data() + occ.size());
  };
  for (const auto& spec : {StateSpec::thermal(1.2), StateSpec::squeezed_vacuum(0.6), StateSpec::fock(6),
                           StateSpec::coherent(3.0)}) {
    const auto pnd = make_distribution(spec);
    const std::vector<double> probs(pnd.probs.data(), pnd.probs.data() + pnd.probs.size());
    for (int n_det : {1, 3, 8}) {
      for (double nu : {0.0, 0.05}) {
        const DetectorConfig config{n_det, 0.6, nu};
        const auto literal = oracle::three_step_clicks(probs, n_det, config.eta, config.nu, occupancy);
        CHECK(max_abs_diff(click_distribution_occupancy(spec, config).probs, literal) < 1e-13);
      }
    }
  }
}

TEST_CASE("both evaluation paths agree on the test grid") {
  double worst = 0.0;
  for (const auto& spec : grid_states()) {
    for (int n_det : {1, 2, 4, 8, 16}) {
      for (double eta : kEtaGrid) {
        for (double nu : {0.0, 0.01, 0.1}) {
          const DetectorConfig config{n_det, eta, nu};
          const auto a = click_distribution_generating_function(spec, config);
          const auto b = click_distribution_occupancy(spec, config);
          worst = std::max(worst, max_abs_diff(a.probs, b.probs));
        }
      }
    }
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("auto method is normalized and nonnegative on the full grid") {
  for (const auto& spec : grid_states()) {
    for (int n_det : {1, 2, 4, 8, 16, 64}) {
      for (double eta : kEtaGrid) {
        for (double nu : {0.0, 0.01, 0.1}) {
          const auto dist = click_distribution(spec, {n_det, eta, nu});
          REQUIRE(dist.detectors() == n_det);
          CHECK(dist.probs.minCoeff() >= -1e-12);
          CHECK(std::abs(dist.probs.sum() - 1.0) <= 1e-9);
        }
      }
    }
  }
}

TEST_CASE("coherent light gives exactly binomial clicks") {
  for (double mu : {0.1, 1.0, 4.0, 9.0}) {
    for (int n_det : {1, 2, 8, 16, 64}) {
      for (double eta : {0.1, 0.5, 1.0}) {
        for (double nu : {0.0, 0.01, 0.1}) {
          const auto dist = click_distribution(StateSpec::coherent(mu), {n_det, eta, nu});
          const auto ref = binomial_reference(n_det, 1.0 - std::exp(-nu - eta * mu / n_det));
          CHECK(max_abs_diff(dist.probs, ref.probs) <= 1e-12);
        }
      }
    }
  }
}

TEST_CASE("fock clicks are supported on at most min(n, N) detectors without dark counts") {
  for (int n = 0; n <= 12; ++n) {
    for (int n_det : {1, 4, 8, 16}) {
      const auto dist = click_distribution(StateSpec::fock(n), {n_det, 0.8, 0.0});
      for (int k = std::min(n, n_det) + 1; k <= n_det; ++k) CHECK(std::abs(dist.probs(k)) <= 1e-12);
    }
  }
}

TEST_CASE("click mean is nondecreasing in efficiency") {
  for (const auto& spec : grid_states()) {
    for (int n_det : {1, 4, 16}) {
      double previous = -1.0;
      for (int i = 0; i <= 20; ++i) {
        const double mean = click_moments(click_distribution(spec, {n_det, i / 20.0, 0.01})).mean;
        CHECK(mean >= previous - 1e-12);
        previous = mean;
      }
    }
  }
}

TEST_CASE("fock states are sub-binomial against the occupancy oracle") {
  for (int n = 1; n <= 10; ++n) {
    for (int n_det : {2, 4, 8, 16}) {
      for (int step = 1; step <= 10; ++step) {
        const DetectorConfig config{n_det, step / 10.0, 0.0};
        const double qb = qb_parameter(click_distribution(StateSpec::fock(n), config));
        const double oracle_qb =
            qb_parameter(ClickDistribution{click_distribution_occupancy(StateSpec::fock(n), config).probs});
        CHECK(qb < 0.0);
        CHECK(oracle_qb < 0.0);
        CHECK(std::abs(qb - oracle_qb) < 1e-9);
      }
    }
  }
  const double expected = -0.5 * 7.0 / (8.0 - 0.5);
  CHECK(std::abs(qb_parameter(click_distribution(StateSpec::fock(1), {8, 0.5, 0.0})) - expected) < 1e-12);
}

TEST_CASE("mixtures of coherent and thermal light are never sub-binomial") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<MixtureComponent> parts;
    const int count = 1 + static_cast<int>(u(rng) * 3);
    for (int i = 0; i < count; ++i) {
      const double mu = 0.05 + 6.0 * u(rng);
      parts.push_back({1.0 / count, u(rng) < 0.5 ? StateSpec::coherent(mu) : StateSpec::thermal(mu)});
    }
    const DetectorConfig config{1 << static_cast<int>(u(rng) * 5), 0.05 + 0.95 * u(rng), u(rng) < 0.5 ? 0.0 : 0.05};
    const double qb = qb_parameter(click_distribution(StateSpec::mixture(parts), config));
    CHECK(qb >= -1e-9);
  }
}

TEST_CASE("Q_B is bounded below by -1 and vanishes for a single detector") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> probs(1 + static_cast<int>(u(rng) * 12));
    for (auto& p : probs) p = u(rng);
    double total = 0.0;
    for (double p : probs) total += p;
    for (auto& p : probs) p /= total;
    const auto spec = StateSpec::explicit_distribution(probs);
    const int n_det = 1 + static_cast<int>(u(rng) * 16);
    const DetectorConfig config{n_det, 0.05 + 0.95 * u(rng), 0.02 * u(rng)};
    const auto dist = click_distribution(spec, config);
    const double qb = qb_parameter(dist);
    CHECK(qb >= -1.0 - 1e-9);
    const auto single = click_distribution(spec, {1, config.eta, config.nu});
    CHECK(std::abs(qb_parameter(single)) < 1e-12);
  }
}

TEST_CASE("large arrays fall back to the occupancy path") {
  const DetectorConfig config{512, 0.05, 0.0};
  const auto a = click_distribution_generating_function(StateSpec::coherent(2.0), config);
  CHECK(a.error_estimate > 1e-13);
  const auto dist = click_distribution(StateSpec::coherent(2.0), config);
  CHECK(max_abs_diff(dist.probs, binomial_reference(512, 1.0 - std::exp(-0.05 * 2.0 / 512)).probs) < 1e-12);
  CHECK(error_of([&] { click_distribution(StateSpec::coherent(2.0), config, ClickMethod::GeneratingFunction); }) ==
        ErrorCode::NumericalInstability);
  const auto huge = click_distribution(StateSpec::thermal(3.0), {1024, 0.9, 0.01});
  CHECK(std::abs(huge.probs.sum() - 1.0) < 1e-9);
}

TEST_CASE("detector configuration validation") {
  CHECK(error_of([] { DetectorConfig{0, 0.5, 0.0}.validate(); }) == ErrorCode::ValidationError);
  CHECK(error_of([] { DetectorConfig{1025, 0.5, 0.0}.validate(); }) == ErrorCode::ValidationError);
  CHECK(error_of([] { DetectorConfig{4, 1.5, 0.0}.validate(); }) == ErrorCode::ValidationError);
  CHECK(error_of([] { DetectorConfig{4, 0.5, 11.0}.validate(); }) == ErrorCode::ValidationError);
  CHECK(error_of([] { click_distribution(StateSpec::fock(1), {4, -0.1, 0.0}); }) == ErrorCode::ValidationError);
}

TEST_CASE("nonclassicality report for coherent light") {
  const auto report = nonclassicality_report(StateSpec::coherent(4.0), {8, 0.5, 0.0});
  CHECK(std::abs(report.q_b) <= 1e-10);
  CHECK(std::abs(report.q_m_clicks + 0.22119921692859513) < 1e-9);
  REQUIRE(report.q_m_photons.has_value());
  CHECK(std::abs(*report.q_m_photons) < 1e-9);
  CHECK(std::abs(report.click_mean - 1.7695937354287611) < 1e-12);
  // Dark counts alone: clicks are defined, photon Q_M is not.
  const auto dark_only = nonclassicality_report(StateSpec::fock(0), {4, 1.0, 0.1});
  CHECK(!dark_only.q_m_photons.has_value());
  CHECK(std::abs(dark_only.q_b) < 1e-12);
}
