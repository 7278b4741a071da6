#pragma once

// Photon number and excited-atom number in the energy eigenbasis, and the
// diagonal / off-diagonal statistics used to test eigenstate thermalization.

#include "dicke/classical.hpp"
#include "dicke/model.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace dicke {

enum class ObservableKind { PhotonNumber, ExcitedAtoms };

/// How n_ex is evaluated for efficient-basis solutions: by mapping the states
/// to the Fock basis, or directly with the displaced-Fock J_z matrix.
enum class ObservableRoute { Mapping, Native };

std::string to_string(ObservableKind kind);

struct ObservableMatrix {
  ObservableKind kind = ObservableKind::PhotonNumber;
  Eigen::MatrixXd elements;  // O_{k,k'} over `states`
  std::vector<double> energies;
  std::vector<std::size_t> states;
  bool scaled = true;  // divided by j

  Eigen::VectorXd diagonal() const { return elements.diagonal(); }
};

/// Converged states of one parity with lo < epsilon < hi, ascending.
std::vector<std::size_t> states_in_range(const EigenSolution& sol, double lo, double hi);

/// Full matrix over the selected states. Every state must be converged and all
/// must share one resolved parity.
ObservableMatrix observable_matrix(const EigenSolution& sol, ObservableKind kind,
                                   std::span<const std::size_t> states, bool scaled = true,
                                   ObservableRoute route = ObservableRoute::Mapping);

/// Diagonal elements only, evaluated in blocks to bound memory.
Eigen::VectorXd observable_diagonal(const EigenSolution& sol, ObservableKind kind,
                                    std::span<const std::size_t> states, bool scaled = true,
                                    ObservableRoute route = ObservableRoute::Mapping);

// --- microcanonical averages ------------------------------------------------------

/// Either the `count` states nearest to `center` or all states within
/// `half_width` of it.
struct MicrocanonicalWindow {
  double center = 0.0;
  int count = 0;
  double half_width = 0.0;
};

double microcanonical_average(std::span<const double> energies, std::span<const double> values,
                              const MicrocanonicalWindow& window);
double microcanonical_average(const ObservableMatrix& obs, const MicrocanonicalWindow& window);

/// Sum |O_kk - O_mic| / Sum O_kk over one window.
double delta_mic(std::span<const double> values);
/// |max - min| / O_mic over one window.
double delta_mic_extremal(std::span<const double> values);

struct DeviationPoint {
  double epsilon = 0.0;  // mean energy of the window
  double delta = 0.0;
  double extremal = 0.0;
};

/// Both deviations over moving windows of `window_levels` consecutive states.
std::vector<DeviationPoint> delta_mic_profile(std::span<const double> energies,
                                              std::span<const double> values, int window_levels,
                                              int stride = 1);

// --- distributions --------------------------------------------------------------

struct MomentSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double sigma = 0.0;  // maximum-likelihood Gaussian width
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  bool degenerate = false;  // vanishing spread

  bool gaussian(double max_skewness = 0.3, double max_excess_kurtosis = 0.5) const;
};

/// Moments about the sample mean, or about zero with zero_mean.
MomentSummary sample_moments(std::span<const double> values, bool zero_mean = false);

struct Histogram {
  std::vector<double> edges;
  std::vector<long> counts;
};

Histogram make_histogram(std::span<const double> values, int bins);

struct Distribution {
  std::vector<double> values;  // centered data
  MomentSummary fit;
  Histogram histogram;
};

inline constexpr int kCenteringWindow = 50;
inline constexpr std::size_t kMinDistributionStates = 50;

/// Centered mean over the `window` states nearest each index (clipped at the ends).
std::vector<double> moving_mean(std::span<const double> values, int window);

/// O_kk minus its moving mean for states with lo < epsilon < hi.
Distribution diagonal_distribution(std::span<const double> energies,
                                   std::span<const double> values, double lo, double hi,
                                   int centering_window = kCenteringWindow, int bins = 40);

/// O_{k,k'} for k < k' with both energies in (lo, hi) and
/// |epsilon_k - epsilon_k'| <= omega_max.
Distribution offdiagonal_distribution(const ObservableMatrix& obs, double lo, double hi,
                                      double omega_max = std::numeric_limits<double>::infinity(),
                                      bool zero_mean = false, int bins = 40);

// --- diagonal ensemble -----------------------------------------------------------

inline constexpr double kSupportTolerance = 1e-6;

/// Sum_k w_k O_kk for weights w_k = |c_k|^2 over `states`. `leaked` is the
/// weight outside them; above kSupportTolerance the result is refused.
double diagonal_ensemble(std::span<const double> weights, std::span<const double> values,
                         double leaked = 0.0);

/// |n> (x) |j, m_z> amplitudes of the Glauber-Bloch coherent state at x:
/// alpha = sqrt(j/2)(q + i p), and the spin state with
/// (Q, P) = 2 sin(theta/2)(cos phi, sin phi), <J_z> = -j cos(theta).
Eigen::VectorXcd glauber_bloch_state(const PhaseSpacePoint& x, const ModelParams& params,
                                     int n_max);

/// (psi + s Pi psi) / norm for s = +1 (Even) or -1 (Odd), Fock layout.
Eigen::VectorXcd parity_projection(const Eigen::VectorXcd& fock, int two_j, Parity parity);

/// |<E_k|psi>|^2 for every state of the solution; psi is in the Fock basis
/// with cutoff n_max.
std::vector<double> eigenbasis_weights(const EigenSolution& sol, const Eigen::VectorXcd& fock,
                                       int n_max);

}  // namespace dicke
