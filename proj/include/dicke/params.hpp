#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace dicke {

/// Physical parameters of the Dicke Hamiltonian. The pseudo-spin is stored as
/// the integer `two_j` so that half-integer values stay exact.
struct ModelParams {
  double omega = 1.0;   // field frequency
  double omega0 = 1.0;  // atomic splitting
  double gamma = 1.0;   // atom-field coupling
  int two_j = 2;

  /// Validating factory; `j` must be a positive half-integer.
  static ModelParams make(double omega, double omega0, double gamma, double j);

  void validate() const;

  double j() const { return 0.5 * two_j; }
  int atomic_dim() const { return two_j + 1; }
  double gamma_c() const { return 0.5 * std::sqrt(omega * omega0); }
  /// Displacement per unit of J_x in the efficient basis, 2 gamma / (omega sqrt(2j)).
  double G() const { return 2.0 * gamma / (omega * std::sqrt(static_cast<double>(two_j))); }
  double hbar_eff() const { return 1.0 / j(); }

  bool operator==(const ModelParams&) const = default;
};

enum class BasisKind { Fock, Efficient };

/// Which parity block of the truncated space a matrix is built on.
enum class ParitySector { Full, Even, Odd };

struct BasisSpec {
  BasisKind kind = BasisKind::Efficient;
  int cutoff = 0;  // n_max (Fock) or N_max (efficient)
  ParitySector sector = ParitySector::Full;

  int bosonic_dim() const { return cutoff + 1; }
  /// Dimension of the unsymmetrized product space.
  long full_dim(const ModelParams& p) const {
    return static_cast<long>(p.atomic_dim()) * bosonic_dim();
  }

  bool operator==(const BasisSpec&) const = default;
};

std::string to_string(BasisKind kind);
std::string to_string(ParitySector sector);

/// Representation a coefficient vector is written in.
///  - Fock: |n> (x) |j, m_z>
///  - FockRotated: |n> (x) |j, m_x>
///  - Efficient: D(alpha_{m_x})|N> (x) |j, m_x>
enum class CoefficientBasis { Fock, FockRotated, Efficient };

/// Real amplitudes of a pure state over a product basis. Storage is
/// atomic-major: `values[a * bosonic_dim + x]` with a = m + j.
struct CoefficientVector {
  CoefficientBasis basis = CoefficientBasis::Fock;
  int two_j = 0;
  int bosonic_dim = 0;
  Eigen::VectorXd values;

  int atomic_dim() const { return two_j + 1; }
  int cutoff() const { return bosonic_dim - 1; }

  /// Column a holds the bosonic amplitudes for atomic index a.
  Eigen::Map<const Eigen::MatrixXd> grid() const {
    return {values.data(), bosonic_dim, two_j + 1};
  }
  Eigen::Map<Eigen::MatrixXd> grid() { return {values.data(), bosonic_dim, two_j + 1}; }

  double norm() const { return values.norm(); }
};

}  // namespace dicke
