#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "dmimo/mimo_math.hpp"
#include "test_support.hpp"

using namespace dmimo;
using dmimo::testing::random_matrix;
using dmimo::testing::random_psd;

namespace {

// Independent route: log2 of the product of eigenvalues of (sA + I).
double eigen_log_det(const ComplexMatrix& a, double scale) {
  const EigenMatrix m = scale * a.eigen() + EigenMatrix::Identity(a.rows(), a.cols());
  const Eigen::SelfAdjointEigenSolver<EigenMatrix> eig(m);
  double acc = 0.0;
  for (double lambda : eig.eigenvalues()) acc += std::log2(lambda);
  return acc;
}

}  // namespace

TEST(ComplexMatrix, RejectsEmptyAndNonFinite) {
  EXPECT_THROW(ComplexMatrix(EigenMatrix(0, 2)), DimensionError);
  EigenMatrix m = EigenMatrix::Zero(2, 2);
  m(1, 0) = Complex(std::nan(""), 0.0);
  EXPECT_THROW(ComplexMatrix{m}, DomainError);
  m(1, 0) = Complex(0.0, INFINITY);
  EXPECT_THROW(ComplexMatrix{m}, DomainError);
  EXPECT_THROW((ComplexMatrix{{1.0, 2.0}, {3.0}}), DimensionError);
}

TEST(HermitianGram, Identity) {
  EXPECT_EQ(hermitian_gram(ComplexMatrix::identity(2)), ComplexMatrix::identity(2));
}

TEST(HermitianGram, RowVector) {
  const ComplexMatrix g = hermitian_gram(ComplexMatrix{{1.0, Complex(0.0, 1.0)}});
  ASSERT_EQ(g.rows(), 1);
  ASSERT_EQ(g.cols(), 1);
  EXPECT_DOUBLE_EQ(g(0, 0).real(), 2.0);
  EXPECT_DOUBLE_EQ(g(0, 0).imag(), 0.0);
}

TEST(HermitianGram, RandomIsHermitianPsd) {
  RandomStream rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const ComplexMatrix h = random_matrix(2, 4, rng);
    const ComplexMatrix g = hermitian_gram(h);
    ASSERT_EQ(g.rows(), 2);
    EXPECT_LE((g.eigen() - g.eigen().adjoint()).norm(), 1e-12);
    const Eigen::SelfAdjointEigenSolver<EigenMatrix> eig(g.eigen());
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-12);
  }
}

TEST(LogDetCapacity, TrivialValues) {
  EXPECT_EQ(log_det_capacity(ComplexMatrix::zero(3, 3), 1e6), 0.0);
  EXPECT_DOUBLE_EQ(log_det_capacity(ComplexMatrix{{1.0}}, 3.0), 2.0);
  EXPECT_DOUBLE_EQ(log_det_capacity(ComplexMatrix::identity(2), 1.0), 2.0);
}

TEST(LogDetCapacity, Errors) {
  EXPECT_THROW(log_det_capacity(ComplexMatrix::zero(2, 3), 1.0), DimensionError);
  EXPECT_THROW(log_det_capacity(ComplexMatrix{{-1.0, 0.0}, {0.0, 1.0}}, 1.0), DomainError);
  EXPECT_THROW(log_det_capacity(ComplexMatrix::identity(2), -1.0), DomainError);
}

TEST(LogDetCapacity, SymmetrizesSlightlyNonHermitianInput) {
  const ComplexMatrix a{{2.0, Complex(0.5, 1e-14)}, {Complex(0.5, 0.0), 1.0}};
  const ComplexMatrix sym{{2.0, Complex(0.5, 0.5e-14)}, {Complex(0.5, -0.5e-14), 1.0}};
  EXPECT_DOUBLE_EQ(log_det_capacity(a, 4.0), log_det_capacity(sym, 4.0));
}

TEST(LogDetCapacity, HighSnrDoesNotOverflow) {
  // det argument ~ 1e300^2 would overflow a naive determinant.
  const double c = log_det_capacity(ComplexMatrix::identity(2), 1e300);
  EXPECT_NEAR(c, 2.0 * std::log2(1e300), 1e-9);
}

TEST(LogDetCapacity, MatchesEigenvalueProduct) {
  RandomStream rng(11);
  for (Eigen::Index n = 1; n <= 8; ++n) {
    for (int trial = 0; trial < 50; ++trial) {
      const ComplexMatrix a = random_psd(n, 1 + trial % n, rng);
      const double scale = std::pow(10.0, -3.0 + 0.25 * (trial % 30));
      const double expected = eigen_log_det(a, scale);
      const double got = log_det_capacity(a, scale);
      EXPECT_LE(std::abs(got - expected), 1e-9 * std::max(1.0, std::abs(expected)))
          << "n=" << n << " scale=" << scale;
    }
  }
}

TEST(LogDetCapacity, MonotoneInScale) {
  RandomStream rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const ComplexMatrix a = random_psd(3, 1 + trial % 3, rng);
    double prev = 0.0;
    for (double s = 0.0; s < 1e4; s = s * 3.0 + 0.01) {
      const double c = log_det_capacity(a, s);
      EXPECT_GE(c, prev - 1e-12);
      prev = c;
    }
  }
}

TEST(PseudoInverse, TrivialValues) {
  EXPECT_LE((pseudo_inverse(ComplexMatrix::identity(3)).eigen() - EigenMatrix::Identity(3, 3)).norm(), 1e-15);
  const ComplexMatrix half = pseudo_inverse(ComplexMatrix{{2.0}});
  EXPECT_DOUBLE_EQ(half(0, 0).real(), 0.5);
  EXPECT_DOUBLE_EQ(half(0, 0).imag(), 0.0);
}

TEST(PseudoInverse, RightInverseOfWideMatrix) {
  RandomStream rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const ComplexMatrix h = random_matrix(2, 4, rng);
    const ComplexMatrix p = pseudo_inverse(h);
    ASSERT_EQ(p.rows(), 4);
    ASSERT_EQ(p.cols(), 2);
    EXPECT_LE((h.eigen() * p.eigen() - EigenMatrix::Identity(2, 2)).norm(), 1e-9);
  }
}

TEST(PseudoInverse, TwiceIsIdentityMap) {
  RandomStream rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    const Eigen::Index rows = 1 + trial % 3;
    const ComplexMatrix h = random_matrix(rows, rows + trial % 4, rng);
    EXPECT_LE((pseudo_inverse(pseudo_inverse(h)).eigen() - h.eigen()).norm(), 1e-8);
  }
}

TEST(PseudoInverse, RankDeficientCarriesRatio) {
  const ComplexMatrix dup{{1.0, 2.0, 3.0}, {2.0, 4.0, 6.0}};
  try {
    pseudo_inverse(dup);
    FAIL() << "expected SingularityError";
  } catch (const SingularityError& e) {
    EXPECT_LE(e.singular_value_ratio, 1e-10);
  }
  EXPECT_THROW(pseudo_inverse(ComplexMatrix::zero(2, 2)), SingularityError);
  EXPECT_THROW(pseudo_inverse(ComplexMatrix{{1.0, 0.0}, {0.0, 1e-12}}), SingularityError);
}
