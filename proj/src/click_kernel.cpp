#include "clickstat/click_kernel.hpp"

#include "clickstat/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace clickstat {
namespace {

constexpr double kClampFloor = -1e-12;
constexpr double kNormalizationTolerance = 1e-9;
// Path A results whose estimated cancellation error exceeds this are not
// trusted by the automatic method.
constexpr double kMaxCancellationError = 1e-13;

struct Validity {
  bool ok;
  std::string reason;
};

Validity check(const Vector<double>& probs, double extra_mass_slack) {
  if (!probs.allFinite()) return {false, "non-finite entry"};
  const double lowest = probs.minCoeff();
  if (lowest < kClampFloor) return {false, "entry " + std::to_string(lowest) + " below clamp floor"};
  const double total = compensated_total(probs);
  if (std::abs(total - 1.0) > kNormalizationTolerance + extra_mass_slack)
    return {false, "normalization error " + std::to_string(total - 1.0)};
  return {true, {}};
}

ClickDistribution finish(Vector<double> probs) {
  for (Eigen::Index k = 0; k < probs.size(); ++k)
    if (probs(k) < 0.0) probs(k) = 0.0;
  return ClickDistribution{std::move(probs)};
}

}  // namespace

void DetectorConfig::validate() const {
  if (detectors < 1 || detectors > kMaxDetectors)
    throw Error(ErrorCode::ValidationError, "detectors: must lie in [1, " + std::to_string(kMaxDetectors) + "]");
  if (!(eta >= 0.0 && eta <= 1.0)) throw Error(ErrorCode::ValidationError, "eta: must lie in [0, 1]");
  if (!(nu >= 0.0 && nu <= 10.0)) throw Error(ErrorCode::ValidationError, "nu: must lie in [0, 10]");
}

const char* to_string(ClickMethod method) noexcept {
  switch (method) {
    case ClickMethod::GeneratingFunction: return "gf";
    case ClickMethod::OccupancyDp: return "dp";
    case ClickMethod::Auto: return "auto";
  }
  return "unknown";
}

namespace {

// Inclusion-exclusion over sets of silent detectors:
//   c_k = C(N,k) sum_j (-1)^j C(k,j) exp(-nu s) G(1 - eta s / N),  s = N - k + j.
template <typename Scalar>
PathResult inclusion_exclusion(const StateSpec& spec, const DetectorConfig& config, double tail_tolerance) {
  using std::exp;
  const int n_det = config.detectors;
  const Scalar eta(config.eta);
  const Scalar nu(config.nu);

  Vector<Scalar> silent(n_det + 1);
  auto x_at = [&](int s) { return std::max(Scalar(0), Scalar(1) - eta * Scalar(s) / Scalar(n_det)); };
  if (has_closed_form_generating_function(spec)) {
    for (int s = 0; s <= n_det; ++s)
      silent(s) = exp(-nu * Scalar(s)) * closed_form_generating_function<Scalar>(spec, x_at(s));
  } else {
    const auto pnd = make_distribution(spec, tail_tolerance);
    for (int s = 0; s <= n_det; ++s) {
      const Scalar x = x_at(s);
      Scalar g(0);
      for (Eigen::Index n = pnd.probs.size() - 1; n >= 0; --n) g = g * x + Scalar(pnd.probs(n));
      silent(s) = exp(-nu * Scalar(s)) * g;
    }
  }

  const double eps = static_cast<double>(std::numeric_limits<Scalar>::epsilon());
  PathResult out;
  out.probs.resize(n_det + 1);
  for (int k = 0; k <= n_det; ++k) {
    // Coefficients above n = 60 come from lgamma and carry relative error
    // proportional to their logarithm.
    const double term_rel_error =
        8.0 * eps * (k > 60 ? 1.0 + log_binomial_coefficient<double>(k, k / 2) : 1.0);
    CompensatedSum<Scalar> alternating;
    Scalar magnitude(0);
    for (int j = 0; j <= k; ++j) {
      const Scalar term = binomial_coefficient<Scalar>(k, j) * silent(n_det - k + j);
      alternating.add(j % 2 == 0 ? term : -term);
      magnitude += term;
    }
    const Scalar outer = binomial_coefficient<Scalar>(n_det, k);
    out.probs(k) = static_cast<double>(outer * alternating.value());
    out.error_estimate =
        std::max(out.error_estimate, static_cast<double>(outer * magnitude) * term_rel_error);
  }
  return out;
}

}  // namespace

PathResult click_distribution_generating_function(const StateSpec& spec, const DetectorConfig& config,
                                                  double tail_tolerance) {
  config.validate();
  spec.validate();
  return inclusion_exclusion<long double>(spec, config, tail_tolerance);
}

PathResult click_distribution_occupancy(const StateSpec& spec, const DetectorConfig& config,
                                        double tail_tolerance) {
  config.validate();
  const auto pnd = make_distribution(spec, tail_tolerance);
  const int n_det = config.detectors;
  const double n = n_det;
  const double eta = config.eta;

  // hit(k) after n photons: each photon survives with probability eta and
  // then lands uniformly, so a surviving photon reaches a fresh detector with
  // probability (N - k) / N.
  Vector<double> hit = Vector<double>::Zero(n_det + 1);
  hit(0) = 1.0;
  Vector<double> occupied = Vector<double>::Zero(n_det + 1);
  for (Eigen::Index photons = 0; photons < pnd.probs.size(); ++photons) {
    if (photons > 0) {
      const int top = std::min<int>(static_cast<int>(photons), n_det);
      for (int k = top; k >= 1; --k)
        hit(k) = hit(k) * (1.0 - eta + eta * k / n) + hit(k - 1) * (eta * (n_det - k + 1) / n);
      hit(0) *= 1.0 - eta;
    }
    occupied += pnd.probs(photons) * hit;
  }

  PathResult out;
  if (config.nu == 0.0) {
    out.probs = occupied;
    return out;
  }
  const double dark = -std::expm1(-config.nu);
  out.probs = Vector<double>::Zero(n_det + 1);
  for (int k = 0; k <= n_det; ++k) {
    if (occupied(k) == 0.0) continue;
    out.probs.segment(k, n_det - k + 1) += occupied(k) * binomial_pmf<double>(n_det - k, dark);
  }
  return out;
}

ClickDistribution click_distribution(const StateSpec& spec, const DetectorConfig& config, ClickMethod method,
                                     double tail_tolerance) {
  config.validate();
  spec.validate();
  switch (method) {
    case ClickMethod::GeneratingFunction: {
      auto a = click_distribution_generating_function(spec, config, tail_tolerance);
      const double slack = has_closed_form_generating_function(spec) ? 0.0 : tail_tolerance;
      if (auto v = check(a.probs, slack); !v.ok)
        throw Error(ErrorCode::NumericalInstability, "generating-function path: " + v.reason);
      return finish(std::move(a.probs));
    }
    case ClickMethod::OccupancyDp: {
      auto b = click_distribution_occupancy(spec, config, tail_tolerance);
      if (auto v = check(b.probs, tail_tolerance); !v.ok)
        throw Error(ErrorCode::NumericalInstability, "occupancy path: " + v.reason);
      return finish(std::move(b.probs));
    }
    case ClickMethod::Auto: break;
  }

  std::string a_reason = "no closed-form generating function";
  if (has_closed_form_generating_function(spec)) {
    auto a = click_distribution_generating_function(spec, config, tail_tolerance);
    auto v = check(a.probs, 0.0);
    if (v.ok && a.error_estimate <= kMaxCancellationError) return finish(std::move(a.probs));
    a_reason = v.ok ? "cancellation error estimate " + std::to_string(a.error_estimate) : v.reason;
  }
  auto b = click_distribution_occupancy(spec, config, tail_tolerance);
  if (auto v = check(b.probs, tail_tolerance); !v.ok)
    throw Error(ErrorCode::NumericalInstability,
                "generating-function path: " + a_reason + "; occupancy path: " + v.reason);
  return finish(std::move(b.probs));
}

ClickDistribution binomial_reference(int detectors, double p) {
  if (detectors < 1 || detectors > kMaxDetectors)
    throw Error(ErrorCode::InvalidArgument, "binomial reference needs 1 <= N <= " + std::to_string(kMaxDetectors));
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidArgument, "binomial reference needs p in [0, 1]");
  return ClickDistribution{binomial_pmf<double>(detectors, p)};
}

Moments<double> click_moments(const ClickDistribution& dist) { return distribution_moments(dist.probs); }

double qb_parameter(const ClickDistribution& dist) {
  const double n = dist.detectors();
  const auto [mean, variance] = click_moments(dist);
  if (mean < kDegenerateMeanThreshold || mean > n - kDegenerateMeanThreshold)
    throw Error(ErrorCode::DegenerateMean,
                "click mean " + std::to_string(mean) + " leaves Q_B undefined for N = " + std::to_string(dist.detectors()));
  return n * variance / (mean * (n - mean)) - 1.0;
}

double mandel_q(const Eigen::Ref<const Vector<double>>& probs) {
  const auto [mean, variance] = distribution_moments(probs);
  if (mean < kDegenerateMeanThreshold)
    throw Error(ErrorCode::DegenerateMean, "mean count " + std::to_string(mean) + " leaves Q_M undefined");
  return variance / mean - 1.0;
}

NonclassicalityReport nonclassicality_report(const StateSpec& spec, const DetectorConfig& config,
                                             ClickMethod method) {
  const auto dist = click_distribution(spec, config, method);
  NonclassicalityReport report;
  const auto m = click_moments(dist);
  report.click_mean = m.mean;
  report.click_variance = m.variance;
  report.q_b = qb_parameter(dist);
  report.q_m_clicks = mandel_q(dist.probs);
  const auto pnd = make_distribution(spec);
  if (photon_moments(pnd).mean >= kDegenerateMeanThreshold) report.q_m_photons = mandel_q(pnd.probs);
  return report;
}

}  // namespace clickstat
