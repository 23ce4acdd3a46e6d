#include "clickstat/states.hpp"

#include "clickstat/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace clickstat {
namespace {

void validate_at(const StateSpec& spec, const std::string& path, int depth) {
  auto fail = [&](const std::string& field, const std::string& why) {
    throw Error(ErrorCode::ValidationError, path + field + ": " + why);
  };
  switch (spec.kind) {
    case StateKind::Coherent:
    case StateKind::Thermal:
      if (!std::isfinite(spec.mean_photons) || spec.mean_photons < 0.0)
        fail("mean_photons", "must be a finite nonnegative number");
      break;
    case StateKind::Fock:
      if (spec.n < 0) fail("n", "must be nonnegative");
      break;
    case StateKind::SqueezedVacuum:
      if (!std::isfinite(spec.r) || spec.r < 0.0) fail("r", "must be a finite nonnegative number");
      break;
    case StateKind::Mixture: {
      if (depth >= kMaxMixtureDepth)
        fail("components", "mixture nesting deeper than " + std::to_string(kMaxMixtureDepth));
      if (spec.components.empty()) fail("components", "mixture needs at least one component");
      double total = 0.0;
      for (std::size_t i = 0; i < spec.components.size(); ++i) {
        const auto& c = spec.components[i];
        const std::string here = path + "components[" + std::to_string(i) + "].";
        if (!std::isfinite(c.weight) || c.weight < 0.0 || c.weight > 1.0)
          throw Error(ErrorCode::ValidationError, here + "weight: must lie in [0, 1]");
        total += c.weight;
        validate_at(c.state, here + "state.", depth + 1);
      }
      if (std::abs(total - 1.0) > 1e-9)
        fail("components", "weights sum to " + std::to_string(total) + ", expected 1");
      break;
    }
    case StateKind::Explicit:
      if (spec.probs.empty()) fail("probs", "explicit distribution is empty");
      for (std::size_t i = 0; i < spec.probs.size(); ++i) {
        if (!std::isfinite(spec.probs[i]) || spec.probs[i] < 0.0)
          fail("probs[" + std::to_string(i) + "]", "must be a finite nonnegative number");
      }
      break;
  }
}

void flatten_into(const StateSpec& spec, double weight, std::vector<WeightedState>& out) {
  if (spec.kind != StateKind::Mixture) {
    out.push_back({weight, spec});
    return;
  }
  for (const auto& c : spec.components) flatten_into(c.state, weight * c.weight, out);
}

[[noreturn]] void overflow(const char* what) {
  throw Error(ErrorCode::TruncationOverflow,
              std::string(what) + " requires more than " + std::to_string(kMaxPhotonNumber) +
                  " photons to reach the requested tail tolerance");
}

PhotonNumberDistribution point_mass(int n) {
  if (n > kMaxPhotonNumber) overflow("fock state");
  PhotonNumberDistribution pnd;
  pnd.probs = Vector<double>::Zero(n + 1);
  pnd.probs(n) = 1.0;
  return pnd;
}

PhotonNumberDistribution poisson(double mu, double tol) {
  if (mu == 0.0) return point_mass(0);
  const double log_mu = std::log(mu);
  auto log_p = [&](int n) { return -mu + n * log_mu - std::lgamma(n + 1.0); };
  for (int n_max = 0; n_max <= kMaxPhotonNumber; ++n_max) {
    if (n_max + 2 <= mu) continue;
    // Ratios p_{n+1}/p_n = mu/(n+1) are bounded by mu/(n_max+2) past the cut.
    const double tail = std::exp(log_p(n_max + 1)) / (1.0 - mu / (n_max + 2));
    if (tail > tol) continue;
    PhotonNumberDistribution pnd;
    pnd.probs.resize(n_max + 1);
    for (int n = 0; n <= n_max; ++n) pnd.probs(n) = std::exp(log_p(n));
    pnd.tail_bound = tail;
    return pnd;
  }
  overflow("coherent state");
}

PhotonNumberDistribution geometric(double mu, double tol) {
  if (mu == 0.0) return point_mass(0);
  const double ratio = mu / (1.0 + mu);
  const double log_ratio = std::log(ratio);
  // Tail beyond n_max is exactly ratio^(n_max + 1).
  const double needed = std::ceil(std::log(tol) / log_ratio) - 1.0;
  if (needed > kMaxPhotonNumber) overflow("thermal state");
  int n_max = std::max(0, static_cast<int>(needed));
  while (n_max > 0 && std::exp((n_max) * log_ratio) <= tol) --n_max;
  while (std::exp((n_max + 1) * log_ratio) > tol) ++n_max;
  if (n_max > kMaxPhotonNumber) overflow("thermal state");
  PhotonNumberDistribution pnd;
  pnd.probs.resize(n_max + 1);
  for (int n = 0; n <= n_max; ++n) pnd.probs(n) = std::exp(n * log_ratio) / (1.0 + mu);
  pnd.tail_bound = std::exp((n_max + 1) * log_ratio);
  return pnd;
}

PhotonNumberDistribution squeezed(double r, double tol) {
  if (r == 0.0) return point_mass(0);
  const double t2 = std::tanh(r) * std::tanh(r);
  const double log_t2 = std::log(t2);
  const double log_cosh = std::log(std::cosh(r));
  // p_{2m} = (2m)! tanh^{2m} r / ((2^m m!)^2 cosh r)
  auto log_p = [&](int m) {
    return std::lgamma(2.0 * m + 1.0) - 2.0 * std::lgamma(m + 1.0) - 2.0 * m * std::log(2.0) +
           m * log_t2 - log_cosh;
  };
  for (int m_max = 0; 2 * m_max <= kMaxPhotonNumber; ++m_max) {
    // p_{2m+2}/p_{2m} = tanh^2 r (2m+1)/(2m+2) < tanh^2 r.
    const double tail = std::exp(log_p(m_max + 1)) / (1.0 - t2);
    if (tail > tol) continue;
    PhotonNumberDistribution pnd;
    pnd.probs = Vector<double>::Zero(2 * m_max + 1);
    for (int m = 0; m <= m_max; ++m) pnd.probs(2 * m) = std::exp(log_p(m));
    pnd.tail_bound = tail;
    return pnd;
  }
  overflow("squeezed vacuum");
}

PhotonNumberDistribution explicit_pnd(const std::vector<double>& probs) {
  if (probs.size() > static_cast<std::size_t>(kMaxPhotonNumber) + 1) overflow("explicit distribution");
  CompensatedSum<double> total;
  for (double p : probs) total.add(p);
  const double sum = total.value();
  if (std::abs(sum - 1.0) > 1e-6)
    throw Error(ErrorCode::UnnormalizedExplicit,
                "explicit probabilities sum to " + std::to_string(sum));
  PhotonNumberDistribution pnd;
  pnd.probs = Eigen::Map<const Vector<double>>(probs.data(), static_cast<Eigen::Index>(probs.size())) / sum;
  return pnd;
}

PhotonNumberDistribution leaf_distribution(const StateSpec& spec, double tol) {
  switch (spec.kind) {
    case StateKind::Coherent: return poisson(spec.mean_photons, tol);
    case StateKind::Thermal: return geometric(spec.mean_photons, tol);
    case StateKind::Fock: return point_mass(spec.n);
    case StateKind::SqueezedVacuum: return squeezed(spec.r, tol);
    case StateKind::Explicit: return explicit_pnd(spec.probs);
    case StateKind::Mixture: break;
  }
  throw Error(ErrorCode::InvalidArgument, "mixture passed as leaf state");
}

template <typename Scalar>
Scalar leaf_closed_form(const StateSpec& spec, Scalar x) {
  using std::cosh;
  using std::exp;
  using std::pow;
  using std::sqrt;
  using std::tanh;
  const Scalar one(1);
  switch (spec.kind) {
    case StateKind::Coherent: return exp(-Scalar(spec.mean_photons) * (one - x));
    case StateKind::Thermal: return one / (one + Scalar(spec.mean_photons) * (one - x));
    case StateKind::Fock: return pow(x, spec.n);
    case StateKind::SqueezedVacuum: {
      const Scalar t = tanh(Scalar(spec.r));
      return one / (cosh(Scalar(spec.r)) * sqrt(one - x * x * t * t));
    }
    case StateKind::Explicit:
    case StateKind::Mixture: break;
  }
  throw Error(ErrorCode::InvalidArgument, std::string(to_string(spec.kind)) + " state has no closed-form leaf");
}

double leaf_generating_function(const StateSpec& spec, double x, double tol) {
  if (spec.kind != StateKind::Explicit) return leaf_closed_form(spec, x);
  const auto pnd = leaf_distribution(spec, tol);
  double g = 0.0;
  for (Eigen::Index n = pnd.probs.size() - 1; n >= 0; --n) g = g * x + pnd.probs(n);
  return g;
}

}  // namespace

const char* to_string(StateKind kind) noexcept {
  switch (kind) {
    case StateKind::Coherent: return "coherent";
    case StateKind::Thermal: return "thermal";
    case StateKind::Fock: return "fock";
    case StateKind::SqueezedVacuum: return "squeezed_vacuum";
    case StateKind::Mixture: return "mixture";
    case StateKind::Explicit: return "explicit";
  }
  return "unknown";
}

StateSpec StateSpec::coherent(double mean_photons) {
  StateSpec s;
  s.kind = StateKind::Coherent;
  s.mean_photons = mean_photons;
  return s;
}

StateSpec StateSpec::thermal(double mean_photons) {
  StateSpec s;
  s.kind = StateKind::Thermal;
  s.mean_photons = mean_photons;
  return s;
}

StateSpec StateSpec::fock(int n) {
  StateSpec s;
  s.kind = StateKind::Fock;
  s.n = n;
  return s;
}

StateSpec StateSpec::squeezed_vacuum(double r) {
  StateSpec s;
  s.kind = StateKind::SqueezedVacuum;
  s.r = r;
  return s;
}

StateSpec StateSpec::mixture(std::vector<MixtureComponent> components) {
  StateSpec s;
  s.kind = StateKind::Mixture;
  s.components = std::move(components);
  return s;
}

StateSpec StateSpec::explicit_distribution(std::vector<double> probs) {
  StateSpec s;
  s.kind = StateKind::Explicit;
  s.probs = std::move(probs);
  return s;
}

void StateSpec::validate() const { validate_at(*this, "", 0); }

bool StateSpec::operator==(const StateSpec& other) const {
  if (kind != other.kind) return false;
  switch (kind) {
    case StateKind::Coherent:
    case StateKind::Thermal: return mean_photons == other.mean_photons;
    case StateKind::Fock: return n == other.n;
    case StateKind::SqueezedVacuum: return r == other.r;
    case StateKind::Mixture: return components == other.components;
    case StateKind::Explicit: return probs == other.probs;
  }
  return false;
}

std::vector<WeightedState> flatten(const StateSpec& spec) {
  std::vector<WeightedState> out;
  flatten_into(spec, 1.0, out);
  return out;
}

PhotonNumberDistribution make_distribution(const StateSpec& spec, double tail_tolerance) {
  if (!(tail_tolerance > 0.0 && tail_tolerance <= 1e-6))
    throw Error(ErrorCode::InvalidArgument, "tail_tolerance must lie in (0, 1e-6]");
  spec.validate();
  if (spec.kind != StateKind::Mixture) return leaf_distribution(spec, tail_tolerance);

  std::vector<std::pair<double, PhotonNumberDistribution>> parts;
  Eigen::Index size = 1;
  for (auto& [weight, leaf] : flatten(spec)) {
    if (weight == 0.0) continue;
    auto pnd = leaf_distribution(leaf, tail_tolerance);
    size = std::max(size, pnd.probs.size());
    parts.emplace_back(weight, std::move(pnd));
  }
  PhotonNumberDistribution out;
  out.probs = Vector<double>::Zero(size);
  for (const auto& [weight, pnd] : parts) {
    out.probs.head(pnd.probs.size()) += weight * pnd.probs;
    out.tail_bound += weight * pnd.tail_bound;
  }
  return out;
}

bool has_closed_form_generating_function(const StateSpec& spec) {
  switch (spec.kind) {
    case StateKind::Explicit: return false;
    case StateKind::Mixture:
      return std::all_of(spec.components.begin(), spec.components.end(),
                         [](const MixtureComponent& c) { return has_closed_form_generating_function(c.state); });
    default: return true;
  }
}

template <typename Scalar>
Scalar closed_form_generating_function(const StateSpec& spec, Scalar x) {
  Scalar g(0);
  for (const auto& [weight, leaf] : flatten(spec)) {
    if (weight == 0.0) continue;
    g += Scalar(weight) * leaf_closed_form(leaf, x);
  }
  return g;
}

template double closed_form_generating_function<double>(const StateSpec&, double);
template long double closed_form_generating_function<long double>(const StateSpec&, long double);

double generating_function(const StateSpec& spec, double x, double tail_tolerance) {
  if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorCode::InvalidArgument, "generating function needs x in [0, 1]");
  spec.validate();
  double g = 0.0;
  for (const auto& [weight, leaf] : flatten(spec)) {
    if (weight == 0.0) continue;
    g += weight * leaf_generating_function(leaf, x, tail_tolerance);
  }
  return g;
}

Moments<double> photon_moments(const PhotonNumberDistribution& pnd) {
  return distribution_moments(pnd.probs);
}

}  // namespace clickstat
