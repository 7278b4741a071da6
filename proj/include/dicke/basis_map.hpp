#pragma once

// Displaced-Fock overlaps and the mapping between the efficient basis
// D(alpha_{m_x})|N> (x) |j, m_x> and the ordinary Fock basis.

#include "dicke/params.hpp"

#include <Eigen/Dense>

#include <map>
#include <memory>
#include <shared_mutex>
#include <tuple>

namespace dicke {

// --- collective spin --------------------------------------------------------

/// sqrt(j(j+1) - m(m+1)): the matrix element <m+1|J_+|m>.
double ladder_up(int two_j, int a);

/// Real spin matrices in the |j, m_z> basis, index a = m + j.
Eigen::MatrixXd spin_jz(int two_j);
Eigen::MatrixXd spin_jplus(int two_j);

/// Wigner small-d matrix d^j(pi/2). Column a is the J_x eigenvector with
/// eigenvalue m_x = a - j written in the |j, m_z> basis, with the standard
/// phase convention of exp(-i pi/2 J_y), so d^j_{m,j}(pi/2) > 0.
Eigen::MatrixXd wigner_d_half_pi(int two_j);

/// Cached, read-only access to `wigner_d_half_pi`.
const Eigen::MatrixXd& rotation_matrix(int two_j);

// --- Laguerre polynomials and displacement overlaps -------------------------

/// Associated Laguerre polynomial L_n^k(x) by the three-term recurrence in n.
double laguerre(int n, int k, double x);

/// <n|D(alpha)|N> for real alpha.
double displacement_element(int n, int N, double alpha);

/// Overlap matrix entries(n, N) = <n|D(alpha)|N> for n <= n_max, N <= N_max.
struct DisplacementKernel {
  double alpha = 0.0;
  int n_max = 0;
  int N_max = 0;
  Eigen::MatrixXd entries;
};

DisplacementKernel displacement_kernel(double alpha, int n_max, int N_max);

/// Thread-safe memo of kernels keyed by (alpha, n_max, N_max).
class KernelCache {
 public:
  std::shared_ptr<const DisplacementKernel> get(double alpha, int n_max, int N_max);
  std::size_t size() const;
  void clear();

  static KernelCache& global();

 private:
  using Key = std::tuple<double, int, int>;
  mutable std::shared_mutex mutex_;
  std::map<Key, std::shared_ptr<const DisplacementKernel>> kernels_;
};

// --- basis maps --------------------------------------------------------------

/// Displacement alpha_{m_x} = -G m_x of the bosonic factor attached to atomic
/// index a.
double efficient_displacement(const ModelParams& params, int a);

/// Norm deficit above which a mapping is reported as truncated.
inline constexpr double kMappingNormTolerance = 1e-6;

/// Efficient-basis amplitudes -> |n> (x) |j, m_x> amplitudes. Requires
/// n_max >= 3 N_max; throws TruncationError if the mapped norm falls short of
/// the input norm by more than kMappingNormTolerance.
CoefficientVector map_efficient_to_fock(const CoefficientVector& coeffs,
                                        const ModelParams& params, int n_max);

/// Column-batched variant: each column of `states` is an efficient-basis
/// vector in atomic-major layout. Kernels come from KernelCache::global().
/// No truncation check.
Eigen::MatrixXd map_efficient_to_fock(const Eigen::MatrixXd& states, const ModelParams& params,
                                      int N_max, int n_max);

/// Projection of |n> (x) |j, m_x> amplitudes onto the efficient basis with
/// cutoff N_max (the adjoint of map_efficient_to_fock).
CoefficientVector project_fock_to_efficient(const CoefficientVector& coeffs,
                                            const ModelParams& params, int N_max);

/// |n> (x) |j, m_x>  ->  |n> (x) |j, m_z>.
CoefficientVector rotate_atomic_x_to_z(const CoefficientVector& coeffs);
/// Inverse of rotate_atomic_x_to_z.
CoefficientVector rotate_atomic_z_to_x(const CoefficientVector& coeffs);

/// Batched x -> z rotation of atomic-major columns with the given bosonic dimension.
Eigen::MatrixXd rotate_atomic_x_to_z(const Eigen::MatrixXd& states, int two_j, int bosonic_dim);

}  // namespace dicke
