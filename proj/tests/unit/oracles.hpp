#pragma once

// Dense operator constructions used as independent references.

#include <Eigen/Dense>

#include <cmath>

namespace oracle {

inline Eigen::MatrixXd annihilation(int n_max) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_max + 1, n_max + 1);
  for (int n = 1; n <= n_max; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

// J_+ in |j, m>, a = m + j, from J_+|m> = sqrt((j - m)(j + m + 1))|m + 1>.
inline Eigen::MatrixXd jplus(int two_j) {
  const double j = 0.5 * two_j;
  Eigen::MatrixXd jp = Eigen::MatrixXd::Zero(two_j + 1, two_j + 1);
  for (int a = 0; a < two_j; ++a) {
    const double m = a - j;
    jp(a + 1, a) = std::sqrt((j - m) * (j + m + 1));
  }
  return jp;
}

inline Eigen::MatrixXd jz(int two_j) {
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(two_j + 1, two_j + 1);
  for (int a = 0; a <= two_j; ++a) z(a, a) = a - 0.5 * two_j;
  return z;
}

// Kronecker product with the atomic factor outermost (atomic-major index).
inline Eigen::MatrixXd kron(const Eigen::MatrixXd& atom, const Eigen::MatrixXd& field) {
  Eigen::MatrixXd out(atom.rows() * field.rows(), atom.cols() * field.cols());
  for (long r = 0; r < atom.rows(); ++r)
    for (long c = 0; c < atom.cols(); ++c)
      out.block(r * field.rows(), c * field.cols(), field.rows(), field.cols()) = atom(r, c) * field;
  return out;
}

inline Eigen::MatrixXd dicke(double omega, double omega0, double gamma, int two_j, int n_max) {
  const Eigen::MatrixXd a = annihilation(n_max);
  const Eigen::MatrixXd jp = jplus(two_j);
  const Eigen::MatrixXd id_f = Eigen::MatrixXd::Identity(n_max + 1, n_max + 1);
  const Eigen::MatrixXd id_a = Eigen::MatrixXd::Identity(two_j + 1, two_j + 1);
  const Eigen::MatrixXd x = a + a.transpose();
  const Eigen::MatrixXd jx2 = jp + jp.transpose();
  return omega * kron(id_a, a.transpose() * a) + omega0 * kron(jz(two_j), id_f) +
         gamma / std::sqrt(static_cast<double>(two_j)) * kron(jx2, x);
}

inline Eigen::MatrixXd tavis_cummings(double omega, double omega0, double gamma, int two_j,
                                      int n_max) {
  const Eigen::MatrixXd a = annihilation(n_max);
  const Eigen::MatrixXd jp = jplus(two_j);
  const Eigen::MatrixXd id_f = Eigen::MatrixXd::Identity(n_max + 1, n_max + 1);
  const Eigen::MatrixXd id_a = Eigen::MatrixXd::Identity(two_j + 1, two_j + 1);
  const Eigen::MatrixXd rot = kron(jp.transpose(), a.transpose()) + kron(jp, a);
  return omega * kron(id_a, a.transpose() * a) + omega0 * kron(jz(two_j), id_f) +
         gamma / std::sqrt(static_cast<double>(two_j)) * rot;
}

inline Eigen::VectorXd sorted_eigenvalues(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  return eig.eigenvalues();
}

}  // namespace oracle
