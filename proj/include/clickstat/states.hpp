#pragma once

#include "clickstat/numeric.hpp"

#include <Eigen/Core>

#include <utility>
#include <vector>

namespace clickstat {

/// Tail mass allowed when truncating photon-number distributions unless the
/// caller asks for something else.
inline constexpr double kDefaultTailTolerance = 1e-14;

/// Largest photon number a truncated distribution may carry.
inline constexpr int kMaxPhotonNumber = 4096;

inline constexpr int kMaxMixtureDepth = 8;

enum class StateKind { Coherent, Thermal, Fock, SqueezedVacuum, Mixture, Explicit };

const char* to_string(StateKind kind) noexcept;

struct MixtureComponent;

/// Symbolic description of a phase-insensitive light state. Only the fields
/// relevant to `kind` are meaningful.
struct StateSpec {
  StateKind kind = StateKind::Fock;
  double mean_photons = 0.0;  // coherent |alpha|^2, thermal occupation
  int n = 0;                  // Fock photon number
  double r = 0.0;             // squeeze parameter
  std::vector<MixtureComponent> components;
  std::vector<double> probs;  // explicit distribution

  static StateSpec coherent(double mean_photons);
  static StateSpec thermal(double mean_photons);
  static StateSpec fock(int n);
  static StateSpec squeezed_vacuum(double r);
  static StateSpec mixture(std::vector<MixtureComponent> components);
  static StateSpec explicit_distribution(std::vector<double> probs);

  /// Throws Error(ValidationError) naming the offending field path.
  void validate() const;

  bool operator==(const StateSpec&) const;
};

struct MixtureComponent {
  double weight = 0.0;
  StateSpec state;

  bool operator==(const MixtureComponent&) const = default;
};

/// A non-mixture state with its overall weight after flattening nested mixtures.
struct WeightedState {
  double weight;
  StateSpec state;
};

std::vector<WeightedState> flatten(const StateSpec& spec);

struct PhotonNumberDistribution {
  Vector<double> probs;     // p_0 .. p_nmax
  double tail_bound = 0.0;  // upper bound on the mass beyond n_max

  int n_max() const { return static_cast<int>(probs.size()) - 1; }
};

PhotonNumberDistribution make_distribution(const StateSpec& spec,
                                           double tail_tolerance = kDefaultTailTolerance);

/// G(x) = sum_n p_n x^n for x in [0, 1]. Closed forms are used for coherent,
/// thermal, Fock and squeezed vacuum states (and mixtures of them).
double generating_function(const StateSpec& spec, double x,
                           double tail_tolerance = kDefaultTailTolerance);

/// True when generating_function needs no truncated sum for this state.
bool has_closed_form_generating_function(const StateSpec& spec);

/// Closed-form G(x) in the requested precision. Requires
/// has_closed_form_generating_function(spec); instantiated for double and
/// long double.
template <typename Scalar>
Scalar closed_form_generating_function(const StateSpec& spec, Scalar x);

Moments<double> photon_moments(const PhotonNumberDistribution& pnd);

}  // namespace clickstat
