#pragma once

// Dicke Hamiltonian in the Fock and efficient bases, dense diagonalization,
// convergence control, parity labels and the Tavis-Cummings limit.

#include "dicke/params.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <array>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace dicke {

// --- basis layout ------------------------------------------------------------

/// Index of |x> (x) |j, a - j> in the product basis (atomic-major).
inline long product_index(int a, int x, int bosonic_dim) {
  return static_cast<long>(a) * bosonic_dim + x;
}

/// A vector of the working basis written as at most two product-basis
/// components. Every component shares the same bosonic index.
struct SectorState {
  int bosonic = 0;
  int count = 1;
  std::array<long, 2> index{};
  std::array<double, 2> weight{};
};

/// Working basis of a (possibly parity-reduced) truncated space. For
/// ParitySector::Full it is the product basis itself.
///
/// Fock states |n; m_z> are parity eigenstates with eigenvalue (-1)^{n+m_z+j}.
/// In the efficient basis parity maps |N; m_x> to (-1)^N phi |N; -m_x>, so the
/// reduced basis pairs m_x with -m_x.
class SectorLayout {
 public:
  SectorLayout(const ModelParams& params, const BasisSpec& basis);

  const BasisSpec& basis() const { return basis_; }
  int two_j() const { return two_j_; }
  long dim() const { return static_cast<long>(states_.size()); }
  long full_dim() const { return full_dim_; }
  std::span<const SectorState> states() const { return states_; }

  /// Working-basis index holding product index i, with its weight; nullopt if
  /// i lies in the other sector.
  std::optional<std::pair<long, double>> locate(long i) const;

  /// Working-basis column(s) -> product-basis column(s).
  Eigen::MatrixXd expand(const Eigen::Ref<const Eigen::MatrixXd>& v) const;
  Eigen::VectorXd expand_vector(const Eigen::Ref<const Eigen::VectorXd>& v) const;
  /// Orthogonal projection of product-basis column(s) onto the working basis.
  Eigen::MatrixXd restrict(const Eigen::Ref<const Eigen::MatrixXd>& v) const;

 private:
  BasisSpec basis_;
  int two_j_;
  long full_dim_;
  std::vector<SectorState> states_;
  std::vector<long> owner_;
  std::vector<double> owner_weight_;
};

/// Parity phase phi_a in  Pi |N; m_x> = (-1)^N phi_a |N; -m_x>.
std::vector<double> efficient_parity_phases(int two_j);

// --- Hamiltonian -------------------------------------------------------------

struct HamiltonianMatrix {
  Eigen::MatrixXd entries;
  BasisSpec basis;
  ModelParams params;

  long dim() const { return entries.rows(); }
};

/// H = omega a^dag a + omega0 J_z + gamma/sqrt(2j) (a + a^dag)(J_+ + J_-) over
/// |n> (x) |j, m_z>, n <= n_max.
HamiltonianMatrix build_fock_hamiltonian(const ModelParams& params, int n_max,
                                         ParitySector sector = ParitySector::Full);

/// Same Hamiltonian over the efficient basis, N <= N_max. With A = a + G J_x it
/// reads H = omega A^dag A - omega G^2 J_x^2 + omega0 J_z; the last term couples
/// m_x to m_x +- 1 through displaced-Fock overlaps.
HamiltonianMatrix build_efficient_hamiltonian(const ModelParams& params, int N_max,
                                              ParitySector sector = ParitySector::Full);

HamiltonianMatrix build_hamiltonian(const ModelParams& params, const BasisSpec& basis);

enum class BasisOperator { Hamiltonian, PhotonNumber, SpinZ };

/// Sparse matrix of a^dag a, J_z or H over the working basis. In the efficient
/// basis J_z couples m_x to m_x +- 1 through displaced-Fock overlaps.
Eigen::SparseMatrix<double> working_operator(const ModelParams& params, const BasisSpec& basis,
                                             BasisOperator op);

// --- spectra -----------------------------------------------------------------

enum class Parity : int { Odd = -1, Unresolved = 0, Even = 1 };

/// Eigenpairs of one Hamiltonian. Energies are scaled, epsilon = E / j.
struct EigenSolution {
  std::vector<double> energies;
  /// Column k is eigenvector k in the working basis; empty for
  /// eigenvalue-only solutions.
  Eigen::MatrixXd coefficients;
  std::vector<Parity> parity;
  std::vector<bool> converged;
  double epsilon_T = -std::numeric_limits<double>::infinity();
  BasisSpec basis;
  ModelParams params;

  // Tavis-Cummings solutions only: excitation number and block eigenvector of
  // every state (block basis a = 0..min(lambda, 2j), n = lambda - a).
  std::vector<int> lambda;
  std::vector<Eigen::VectorXd> block_vectors;

  std::size_t size() const { return energies.size(); }
  bool has_vectors() const { return coefficients.cols() > 0 || !block_vectors.empty(); }

  /// Indices of converged states, optionally restricted to one parity.
  std::vector<std::size_t> converged_indices(std::optional<Parity> parity_filter = {}) const;
};

enum class EigenJob { ValuesOnly, Vectors };

/// Raw dense symmetric eigensolver (LAPACK dsyevd). Returns ascending
/// eigenvalues and, for EigenJob::Vectors, orthonormal eigenvectors.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> symmetric_eigensystem(Eigen::MatrixXd matrix,
                                                                  EigenJob job);

/// Full spectrum of h, energies scaled by 1/j. States of a parity-reduced
/// basis get that parity; otherwise parity is Unresolved. No state is marked
/// converged.
EigenSolution diagonalize(const HamiltonianMatrix& h, EigenJob job = EigenJob::Vectors);

/// Cutoff used for the reference run of filter_converged (+20%).
int enlarged_cutoff(int cutoff);

struct ConvergenceTolerances {
  double energy = 1e-6;  // |eps_k - eps_k(larger)|
  double tail = 1e-3;    // weight in the top 10% of bosonic levels
};

/// Bosonic levels counted as the tail of a basis with this cutoff.
int tail_levels(int cutoff);

/// Marks state k converged iff its energy is stable against `larger` and its
/// tail weight is small; every state above the first failure is unconverged
/// and epsilon_T is the last converged energy below it.
EigenSolution filter_converged(const EigenSolution& sol, const EigenSolution& larger,
                               double tol_energy, double tol_tail);

/// Parity expectation Sum (-1)^{n+m_z+j} |c|^2 of every column of a Fock
/// (|n> (x) |j, m_z>) coefficient block.
Eigen::VectorXd parity_expectations(const Eigen::MatrixXd& fock_coeffs, int two_j,
                                    int bosonic_dim);

inline constexpr double kParityTolerance = 1e-6;

/// Labels states from their Fock-basis coefficients (one column per state).
/// Unresolved converged states are reported on the warning channel.
EigenSolution assign_parity(const EigenSolution& sol, const Eigen::MatrixXd& fock_coeffs,
                            int fock_bosonic_dim);

// --- state access --------------------------------------------------------------

/// Eigenvector k written in the unreduced construction basis.
CoefficientVector product_state(const EigenSolution& sol, std::size_t k);

/// Eigenvector k written in the Fock basis |n> (x) |j, m_z>, n <= n_max.
/// Efficient-basis states are mapped through the displaced-Fock kernels.
CoefficientVector fock_state(const EigenSolution& sol, std::size_t k, int n_max);

/// Block of eigenvectors (selected columns) in the unreduced construction basis.
Eigen::MatrixXd product_states(const EigenSolution& sol, std::span<const std::size_t> indices);

/// Block of eigenvectors in the Fock basis |n> (x) |j, m_z>, n <= n_max.
Eigen::MatrixXd fock_states(const EigenSolution& sol, std::span<const std::size_t> indices,
                            int n_max);

// --- Tavis-Cummings ------------------------------------------------------------

struct LambdaBlock {
  int lambda = 0;
  Eigen::MatrixXd entries;
  long dim() const { return entries.rows(); }
};

/// Block of H_TC = omega a^dag a + omega0 J_z + gamma/sqrt(2j)(a^dag J_- + a J_+)
/// over {|n; m_z> : n + m_z + j = lambda}, ordered by a = m_z + j.
LambdaBlock build_tavis_cummings_block(const ModelParams& params, int lambda);

/// Merged spectrum of blocks 0..lambda_max, sorted. epsilon_T is a lower bound
/// on every omitted block, so all states below it are complete and converged.
EigenSolution tavis_cummings_spectrum(const ModelParams& params, int lambda_max,
                                      EigenJob job = EigenJob::Vectors);

/// Smallest lambda_max for which every omitted block lies at or above epsilon,
/// so the merged spectrum is complete below it.
int tavis_cummings_lambda_cover(const ModelParams& params, double epsilon);

}  // namespace dicke
