#include "dicke/basis_map.hpp"
#include "dicke/errors.hpp"
#include "dicke/model.hpp"
#include "oracles.hpp"

#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/factorials.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

using namespace dicke;

namespace {

using Big = boost::multiprecision::cpp_bin_float_50;

// L_n^k(x) = Sum_i (-1)^i C(n+k, n-i) x^i / i!
Big explicit_laguerre(int n, int k, Big x) {
  Big sum = 0;
  Big power = 1;
  Big fact = 1;
  for (int i = 0; i <= n; ++i) {
    if (i > 0) {
      power *= x;
      fact *= i;
    }
    Big binom = 1;
    for (int t = 1; t <= n - i; ++t) binom = binom * (k + i + t) / t;
    sum += ((i % 2 == 0) ? 1 : -1) * binom * power / fact;
  }
  return sum;
}

Eigen::MatrixXd displacement_by_expm(double alpha, int n_trunc) {
  const Eigen::MatrixXd a = oracle::annihilation(n_trunc);
  const Eigen::MatrixXd gen = alpha * (a.transpose() - a);
  return gen.exp();
}

}  // namespace

TEST(Spin, LadderMatchesOperator) {
  for (int two_j : {1, 2, 5, 12}) {
    const Eigen::MatrixXd ref = oracle::jplus(two_j);
    EXPECT_LT((spin_jplus(two_j) - ref).cwiseAbs().maxCoeff(), 1e-12) << two_j;
    EXPECT_LT((spin_jz(two_j) - oracle::jz(two_j)).cwiseAbs().maxCoeff(), 0.0 + 1e-15);
  }
}

TEST(Spin, RotationIsWignerDAtHalfPi) {
  for (int two_j : {1, 2, 3, 6, 11, 20}) {
    const Eigen::MatrixXd jp = oracle::jplus(two_j);
    // exp(-i pi/2 J_y) with J_y = (J_+ - J_-)/(2i) is real.
    const Eigen::MatrixXd gen = -0.25 * M_PI * (jp - jp.transpose());
    const Eigen::MatrixXd ref = gen.exp();
    const Eigen::MatrixXd r = wigner_d_half_pi(two_j);
    EXPECT_LT((r - ref).cwiseAbs().maxCoeff(), 1e-10) << "2j=" << two_j;
    for (int a = 0; a <= two_j; ++a) EXPECT_GT(r(a, two_j), 0.0);
  }
}

TEST(Spin, RotationDiagonalizesJx) {
  const int two_j = 9;
  const Eigen::MatrixXd jp = oracle::jplus(two_j);
  const Eigen::MatrixXd jx = 0.5 * (jp + jp.transpose());
  const Eigen::MatrixXd& r = rotation_matrix(two_j);
  const Eigen::MatrixXd diag = r.transpose() * jx * r;
  EXPECT_LT((diag - oracle::jz(two_j)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((r.transpose() * r - Eigen::MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(&rotation_matrix(two_j), &r);
}

TEST(Laguerre, MatchesExplicitSum) {
  for (int n : {0, 1, 2, 7, 20, 45}) {
    for (int k : {0, 1, 3, 10}) {
      for (double x : {0.0, 0.3, 2.5, 11.0, 40.0}) {
        const double ref = static_cast<double>(explicit_laguerre(n, k, Big(x)));
        const double scale = std::max(1.0, std::abs(ref));
        EXPECT_NEAR(laguerre(n, k, x), ref, 1e-9 * scale) << n << " " << k << " " << x;
      }
    }
  }
  EXPECT_THROW(laguerre(-1, 0, 1.0), ParameterError);
}

TEST(Displacement, MatchesMatrixExponential) {
  const int n_trunc = 260;
  for (double alpha : {-2.3, -0.4, 0.7, 3.1}) {
    const Eigen::MatrixXd ref = displacement_by_expm(alpha, n_trunc);
    for (int n = 0; n <= 40; n += 3)
      for (int N = 0; N <= 40; N += 5)
        EXPECT_NEAR(displacement_element(n, N, alpha), ref(n, N), 1e-10)
            << "alpha=" << alpha << " n=" << n << " N=" << N;
  }
}

TEST(Displacement, ClosedFormEdges) {
  // <n|D(alpha)|0> = e^{-alpha^2/2} alpha^n / sqrt(n!)
  const double alpha = 1.7;
  for (int n = 0; n < 30; ++n) {
    const double ref = std::exp(-0.5 * alpha * alpha + n * std::log(alpha) -
                                0.5 * std::lgamma(n + 1.0));
    EXPECT_NEAR(displacement_element(n, 0, alpha), ref, 1e-13);
    EXPECT_NEAR(displacement_element(0, n, alpha), ((n % 2) ? -1.0 : 1.0) * ref, 1e-13);
  }
  EXPECT_DOUBLE_EQ(displacement_element(4, 4, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(displacement_element(4, 5, 0.0), 0.0);
  EXPECT_THROW(displacement_element(-1, 2, 0.5), ParameterError);
}

TEST(Displacement, KernelIsUnitaryAtLargeArguments) {
  // Deep in the tails the direct formula over/underflows; the scaled
  // recurrence must still give orthonormal columns.
  const double alpha = 9.0;
  const int N_max = 150;
  const int n_max = 3 * N_max + 200;
  const DisplacementKernel k = displacement_kernel(alpha, n_max, N_max);
  ASSERT_EQ(k.entries.rows(), n_max + 1);
  ASSERT_EQ(k.entries.cols(), N_max + 1);
  const Eigen::MatrixXd gram = k.entries.transpose() * k.entries;
  EXPECT_LT((gram - Eigen::MatrixXd::Identity(N_max + 1, N_max + 1)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_TRUE(k.entries.allFinite());
  for (int n = 0; n <= n_max; n += 37)
    for (int N = 0; N <= N_max; N += 29) EXPECT_DOUBLE_EQ(k.entries(n, N), displacement_element(n, N, alpha));
}

TEST(Displacement, SymmetryUnderSignAndTranspose) {
  for (int n = 0; n < 25; ++n)
    for (int N = 0; N < 25; ++N) {
      const double v = displacement_element(n, N, 1.3);
      EXPECT_NEAR(displacement_element(N, n, -1.3), v, 1e-14);
      EXPECT_NEAR(displacement_element(n, N, -1.3), (((n + N) % 2) ? -1.0 : 1.0) * v, 1e-14);
    }
}

TEST(KernelCache, SharesKernels) {
  KernelCache cache;
  auto a = cache.get(0.5, 30, 10);
  auto b = cache.get(0.5, 30, 10);
  auto c = cache.get(0.5, 31, 10);
  EXPECT_EQ(a.get(), b.get());
  EXPECT_NE(a.get(), c.get());
  EXPECT_EQ(cache.size(), 2u);
  cache.clear();
  EXPECT_EQ(cache.size(), 0u);
}

TEST(BasisMap, RoundTripAndNorm) {
  const ModelParams p = ModelParams::make(1.0, 1.0, 1.0, 3.0);
  const int N_max = 20;
  CoefficientVector v{CoefficientBasis::Efficient, p.two_j, N_max + 1,
                      Eigen::VectorXd::Random(p.atomic_dim() * (N_max + 1))};
  v.values.normalize();
  const CoefficientVector fock = map_efficient_to_fock(v, p, 3 * N_max + 30);
  EXPECT_EQ(fock.basis, CoefficientBasis::FockRotated);
  EXPECT_NEAR(fock.norm(), 1.0, 1e-9);
  const CoefficientVector back = project_fock_to_efficient(fock, p, N_max);
  EXPECT_LT((back.values - v.values).cwiseAbs().maxCoeff(), 1e-9);

  const Eigen::MatrixXd batch = map_efficient_to_fock(v.values, p, N_max, 3 * N_max + 30);
  EXPECT_LT((batch.col(0) - fock.values).cwiseAbs().maxCoeff(), 1e-13);

  const CoefficientVector z = rotate_atomic_x_to_z(fock);
  EXPECT_EQ(z.basis, CoefficientBasis::Fock);
  EXPECT_NEAR(z.norm(), 1.0, 1e-9);
  EXPECT_LT((rotate_atomic_z_to_x(z).values - fock.values).cwiseAbs().maxCoeff(), 1e-12);
  const Eigen::MatrixXd zb = rotate_atomic_x_to_z(fock.values, p.two_j, fock.bosonic_dim);
  EXPECT_LT((zb.col(0) - z.values).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(BasisMap, RejectsSmallCutoffAndTruncation) {
  // G = 2 gamma / sqrt(2j) = 4 at j = 2: alpha up to 8, so 3 N_max is not
  // enough room for the displaced highest state.
  const ModelParams p = ModelParams::make(1.0, 1.0, 4.0, 2.0);
  const int N_max = 10;
  CoefficientVector v{CoefficientBasis::Efficient, p.two_j, N_max + 1,
                      Eigen::VectorXd::Zero(p.atomic_dim() * (N_max + 1))};
  v.values(product_index(0, N_max, N_max + 1)) = 1.0;
  EXPECT_THROW(map_efficient_to_fock(v, p, 3 * N_max - 1), ParameterError);
  EXPECT_THROW(map_efficient_to_fock(v, p, 3 * N_max), TruncationError);
  EXPECT_NO_THROW(map_efficient_to_fock(v, p, 250));
  v.basis = CoefficientBasis::Fock;
  EXPECT_THROW(map_efficient_to_fock(v, p, 250), ParameterError);
}
