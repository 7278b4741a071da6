#pragma once

// Entanglement entropy of the atomic reduction and Shannon entropies of
// eigenstates in the Fock and efficient bases. All entropies are in nats.

#include "dicke/model.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <limits>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace dicke {

/// Eigenvalues below this are dropped before the logarithm.
inline constexpr double kEigenvalueFloor = 1e-14;
/// Allowed |tr rho - 1| for von_neumann_entropy.
inline constexpr double kTraceTolerance = 1e-8;
/// Allowed norm deficit of a truncated Fock state.
inline constexpr double kReductionNormTolerance = 1e-6;

/// rho_A[m, m'] = Sum_n c_{n,m} c_{n,m'} for a state in |n> (x) |j, m> layout
/// (either atomic basis). Throws TruncationError if the norm falls short of
/// one by more than kReductionNormTolerance; a smaller deficit is divided out.
Eigen::MatrixXd reduce_to_atomic(const CoefficientVector& coeffs);
Eigen::MatrixXcd reduce_to_atomic(const Eigen::VectorXcd& fock, int two_j);

/// The bosonic reduction, (n_max+1) x (n_max+1). Same nonzero spectrum as the
/// atomic one.
Eigen::MatrixXd reduce_to_bosonic(const CoefficientVector& coeffs);

/// -Sum p ln p over p > kEigenvalueFloor.
double spectrum_entropy(std::span<const double> probabilities);

/// Entropy of a Hermitian density matrix. Throws NormalizationError when the
/// trace is off by more than kTraceTolerance.
double von_neumann_entropy(const Eigen::MatrixXd& rho);
double von_neumann_entropy(const Eigen::MatrixXcd& rho);

/// -Sum |c|^2 ln |c|^2 of the given amplitudes.
double shannon_entropy(const Eigen::Ref<const Eigen::VectorXd>& coeffs);
double shannon_entropy(const CoefficientVector& coeffs);

enum class EntropyKind { Entanglement, ShannonFock, ShannonEfficient };

std::string to_string(EntropyKind kind);

/// One eigenstate. Entropies that were not requested are NaN.
struct EntropyRecord {
  std::size_t state = 0;
  double epsilon = 0.0;
  Parity parity = Parity::Unresolved;
  double j = 0.0;
  double S_En = std::numeric_limits<double>::quiet_NaN();
  double S_Sh_fock = std::numeric_limits<double>::quiet_NaN();
  double S_Sh_eff = std::numeric_limits<double>::quiet_NaN();

  /// exp(S_En) / (2j + 1).
  double entanglement_scaled() const;
  /// S_Sh / ln(2 j^2); NaN for j < 1.
  double shannon_fock_scaled() const;
  double shannon_efficient_scaled() const;
};

/// Entropies of the converged states (or the given subset). Efficient-basis
/// states are mapped to the Fock basis with cutoff 3 N_max when S_En or the
/// Fock Shannon entropy is requested. The efficient Shannon entropy needs an
/// efficient-basis solution.
std::vector<EntropyRecord> entropy_lattice(const EigenSolution& sol, const std::set<EntropyKind>& which,
                                           std::span<const std::size_t> states = {}, int threads = 0);

}  // namespace dicke
