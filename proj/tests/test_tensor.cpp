#include <gtest/gtest.h>

#include <tsdp/fourier.hpp>
#include <tsdp/tensor.hpp>

namespace {

using namespace tsdp;

// Deterministic tensor with distinct entries: a(i,j,k) = 100k + 10i + j + 1.
Tensor3 counting_tensor(int m, int n, int p) {
  Tensor3 t(m, n, p);
  for (int k = 0; k < p; ++k)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) t(i, j, k) = 100.0 * k + 10.0 * i + j + 1.0;
  return t;
}

double max_abs(const Tensor3& t) {
  double v = 0;
  for (int k = 0; k < t.p(); ++k) v = std::max(v, t.slice(k).cwiseAbs().maxCoeff());
  return v;
}

TEST(Tensor, ConstructionAndShapeChecks) {
  Tensor3 t(2, 3, 4);
  EXPECT_EQ(t.m(), 2);
  EXPECT_EQ(t.n(), 3);
  EXPECT_EQ(t.p(), 4);
  EXPECT_EQ(max_abs(t), 0.0);
  EXPECT_THROW(Tensor3(0, 1, 1), std::invalid_argument);
  EXPECT_THROW(Tensor3(std::vector<Eigen::MatrixXd>{}), std::invalid_argument);
  std::vector<Eigen::MatrixXd> ragged{Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(3, 2)};
  EXPECT_THROW(Tensor3(std::move(ragged)), std::invalid_argument);
  Tensor3 a(2, 2, 2), b(2, 2, 3);
  EXPECT_THROW(a += b, std::invalid_argument);
}

TEST(Tensor, FoldUnfoldRoundTrip) {
  Tensor3 t = counting_tensor(2, 3, 4);
  Eigen::MatrixXd u = unfold(t);
  ASSERT_EQ(u.rows(), 8);
  ASSERT_EQ(u.cols(), 3);
  EXPECT_EQ(u(0, 0), t(0, 0, 0));
  EXPECT_EQ(u(2, 1), t(0, 1, 1));  // slice k occupies rows [k*m, (k+1)*m)
  Tensor3 back = fold(u, 2, 3, 4);
  EXPECT_EQ(max_abs(back - t), 0.0);
  EXPECT_THROW(fold(u, 3, 3, 4), std::invalid_argument);
}

TEST(Tensor, BcircLayout) {
  const int p = 4;
  Tensor3 t = counting_tensor(2, 3, p);
  Eigen::MatrixXd c = bcirc(t);
  ASSERT_EQ(c.rows(), 2 * p);
  ASSERT_EQ(c.cols(), 3 * p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      Eigen::MatrixXd blk = c.block(2 * i, 3 * j, 2, 3);
      EXPECT_EQ((blk - t.slice(((i - j) % p + p) % p)).cwiseAbs().maxCoeff(), 0.0) << i << "," << j;
    }
}

TEST(Tensor, BcircInvRoundTripAndCheck) {
  Tensor3 t = counting_tensor(3, 2, 3);
  Tensor3 back = bcirc_inv(bcirc(t), 3, 2, 3, true);
  EXPECT_EQ(max_abs(back - t), 0.0);
  Eigen::MatrixXd bad = bcirc(t);
  bad(0, 0) += 1.0;
  EXPECT_THROW(bcirc_inv(bad, 3, 2, 3, true), NotBlockCirculantError);
  EXPECT_NO_THROW(bcirc_inv(bad, 3, 2, 3, false));
}

TEST(Tensor, TprodMatchesBcircDefinition) {
  Tensor3 a = counting_tensor(2, 3, 3);
  Tensor3 b = counting_tensor(3, 4, 3);
  Tensor3 via_def = fold(bcirc(a) * unfold(b), 2, 4, 3);
  Tensor3 via_fft = tprod(a, b);
  EXPECT_LE(max_abs(via_fft - via_def), 1e-9 * (1.0 + max_abs(via_def)));
  EXPECT_THROW(tprod(a, counting_tensor(2, 2, 3)), std::invalid_argument);
  EXPECT_THROW(tprod(a, counting_tensor(3, 4, 2)), std::invalid_argument);
}

TEST(Tensor, TransposeAlgebra) {
  Tensor3 a = counting_tensor(2, 3, 4);
  Tensor3 b = counting_tensor(3, 2, 4);
  EXPECT_LE((bcirc(ttranspose(a)) - bcirc(a).transpose()).cwiseAbs().maxCoeff(), 0.0);
  Tensor3 lhs = ttranspose(tprod(a, b));
  Tensor3 rhs = tprod(ttranspose(b), ttranspose(a));
  EXPECT_LE(max_abs(lhs - rhs), 1e-9 * (1.0 + max_abs(rhs)));
  EXPECT_EQ(max_abs(ttranspose(ttranspose(a)) - a), 0.0);
}

TEST(Tensor, IdentityIsNeutral) {
  Tensor3 a = counting_tensor(3, 3, 4);
  EXPECT_LE(max_abs(tprod(a, identity(3, 4)) - a), 1e-10 * (1.0 + max_abs(a)));
  EXPECT_LE(max_abs(tprod(identity(3, 4), a) - a), 1e-10 * (1.0 + max_abs(a)));
  Tensor3 e = identity(3, 4);
  EXPECT_EQ(e.slice(0).diagonal().minCoeff(), 1.0);
  for (int k = 1; k < 4; ++k) EXPECT_EQ(e.slice(k).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Tensor, InnerMatchesBcirc) {
  Tensor3 a = counting_tensor(2, 2, 3);
  Tensor3 b = counting_tensor(2, 2, 3);
  b *= 0.5;
  const double direct = inner(a, b);
  const double via_circ = bcirc(a).cwiseProduct(bcirc(b)).sum();
  EXPECT_NEAR(3.0 * direct, via_circ, 1e-9 * (1.0 + std::abs(via_circ)));
  EXPECT_NEAR(norm(a), std::sqrt(inner(a, a)), 1e-12);
}

TEST(Tensor, SymmetrizeAndDetection) {
  Tensor3 a = counting_tensor(3, 3, 4);
  EXPECT_FALSE(is_symmetric(a));
  Tensor3 s = symmetrize(a);
  EXPECT_TRUE(is_symmetric(s));
  EXPECT_EQ(max_abs(ttranspose(s) - s), 0.0);
  EXPECT_TRUE(is_symmetric(identity(3, 5)));
}

TEST(Tensor, P1IsMatrixAlgebra) {
  Tensor3 a = counting_tensor(2, 3, 1);
  Tensor3 b = counting_tensor(3, 2, 1);
  EXPECT_LE((tprod(a, b).slice(0) - a.slice(0) * b.slice(0)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_EQ((ttranspose(a).slice(0) - a.slice(0).transpose()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((bcirc(a) - a.slice(0)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Fourier, DftMatrixUnitary) {
  for (int p : {1, 2, 5, 8}) {
    Eigen::MatrixXcd f = dft_matrix(p);
    EXPECT_LE((f.adjoint() * f - Eigen::MatrixXcd::Identity(p, p)).cwiseAbs().maxCoeff(), 1e-12) << p;
  }
}

TEST(Fourier, ConjugateSymmetryAndRoundTrip) {
  for (int p : {1, 2, 3, 6}) {
    Tensor3 t = counting_tensor(2, 3, p);
    FourierBlocks fb = fourier_blocks(t);
    ASSERT_EQ(static_cast<int>(fb.blocks.size()), p);
    EXPECT_LE(fb.blocks[0].imag().cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LE(conjugate_symmetry_violation(fb), 1e-9);
    if (p % 2 == 0) EXPECT_LE(fb.blocks[static_cast<size_t>(p / 2)].imag().cwiseAbs().maxCoeff(), 1e-9);
    Tensor3 back = inverse_fourier_blocks(fb);
    EXPECT_LE(max_abs(back - t), 1e-9 * (1.0 + max_abs(t)));
  }
}

TEST(Fourier, BlocksAreAlgebraHomomorphism) {
  Tensor3 a = counting_tensor(2, 3, 4);
  Tensor3 b = counting_tensor(3, 3, 4);
  FourierBlocks fa = fourier_blocks(a), fb = fourier_blocks(b), fab = fourier_blocks(tprod(a, b));
  for (int j = 0; j < 4; ++j) {
    Eigen::MatrixXcd prod = fa.blocks[static_cast<size_t>(j)] * fb.blocks[static_cast<size_t>(j)];
    EXPECT_LE((fab.blocks[static_cast<size_t>(j)] - prod).cwiseAbs().maxCoeff(),
              1e-8 * (1.0 + prod.cwiseAbs().maxCoeff()))
        << j;
  }
}

TEST(Fourier, InverseRejectsBrokenSymmetry) {
  Tensor3 t = counting_tensor(2, 2, 3);
  FourierBlocks fb = fourier_blocks(t);
  fb.blocks[1](0, 0) += Cplx(0.5, 0.5);  // breaks the conjugate pairing with block 2
  EXPECT_THROW(inverse_fourier_blocks(fb), ConjugateSymmetryError);
}

TEST(Fourier, TinvInvertsAndDetectsSingular) {
  Tensor3 a(2, 2, 2);
  a.slice(0) << 3, 1, 1, 4;
  a.slice(1) << 0.5, 0, 0, -0.25;
  Tensor3 inv = tinv(a);
  EXPECT_LE(max_abs(tprod(a, inv) - identity(2, 2)), 1e-10);
  EXPECT_LE(max_abs(tprod(inv, a) - identity(2, 2)), 1e-10);
  Tensor3 sing(2, 2, 2);  // rank-deficient in every Fourier block
  sing.slice(0) << 1, 1, 1, 1;
  EXPECT_THROW(tinv(sing), SingularTensorError);
  EXPECT_THROW(tinv(counting_tensor(2, 3, 2)), std::invalid_argument);
}

}  // namespace
