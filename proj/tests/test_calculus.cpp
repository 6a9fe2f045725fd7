#include <gtest/gtest.h>

#include <tsdp/calculus.hpp>

namespace {

using namespace tsdp;

double max_abs(const Tensor3& t) {
  double v = 0;
  for (int k = 0; k < t.p(); ++k) v = std::max(v, t.slice(k).cwiseAbs().maxCoeff());
  return v;
}

Tensor3 point_fixture(int n, int p) {
  Tensor3 x(n, 1, p);
  for (int k = 0; k < p; ++k)
    for (int i = 0; i < n; ++i) x(i, 0, k) = std::sin(1.0 + i + 2.0 * k);
  return x;
}

QuadraticForm quad_fixture() {
  Tensor3 a(2, 2, 3);
  a.slice(0) << 4, 1, 0.5, 3;
  a.slice(1) << 0.2, -0.3, 0.1, 0.6;
  a.slice(2) << -0.1, 0.4, 0.2, 0.3;
  Tensor3 b(2, 1, 3);
  b(0, 0, 0) = 1.0;
  b(1, 0, 2) = -2.0;
  return {a, b, 0.7};
}

TEST(Calculus, QuadraticValueAndGradient) {
  QuadraticForm q = quad_fixture();
  Tensor3 x = point_fixture(2, 3);
  // value against the unfolded definition
  Eigen::VectorXd xv = unfold(x).col(0);
  double expect = xv.dot(bcirc(q.A) * xv) + unfold(q.B).col(0).dot(xv) + q.c;
  EXPECT_NEAR(q(x), expect, 1e-10 * (1.0 + std::abs(expect)));

  Tensor3 g_analytic = q.gradient(x);
  Tensor3 g_fd = t_gradient_fd(q.as_function(), x);
  EXPECT_LE(max_abs(g_fd - g_analytic), 1e-6 * (1.0 + max_abs(g_analytic)));

  // finite differences straight from evaluate (no analytic gradient supplied)
  MvFunction plain{2, 3, [q](const Tensor3& z) { return q(z); }, nullptr};
  EXPECT_LE(max_abs(t_gradient_fd(plain, x) - g_analytic), 1e-5 * (1.0 + max_abs(g_analytic)));
}

TEST(Calculus, QuadraticHessianRecovered) {
  QuadraticForm q = quad_fixture();
  Tensor3 x = point_fixture(2, 3);
  Tensor3 expect = q.A + ttranspose(q.A);
  EXPECT_LE(max_abs(t_hessian(q.as_function(), x) - expect), 1e-6 * (1.0 + max_abs(expect)));
  MvFunction plain{2, 3, [q](const Tensor3& z) { return q(z); }, nullptr};
  EXPECT_LE(max_abs(t_hessian(plain, x) - expect), 1e-4 * (1.0 + max_abs(expect)));
}

// f(X) = x111^2 + 2 x111 x112 + x112^2 + x211^2 + x212^2 on 2 x 1 x 2 tensors.
// Twice T-differentiable with constant T-Hessian slices [[2,0],[0,2]] and
// [[2,0],[0,0]]; T-PSD but not T-PD (one Fourier block is singular).
double convex_quadratic(const Tensor3& x) {
  const double x111 = x(0, 0, 0), x112 = x(0, 0, 1);
  const double x211 = x(1, 0, 0), x212 = x(1, 0, 1);
  return x111 * x111 + 2.0 * x111 * x112 + x112 * x112 + x211 * x211 + x212 * x212;
}

TEST(Calculus, ConvexQuadraticFixture) {
  MvFunction f{2, 2, convex_quadratic, nullptr};
  Tensor3 x = point_fixture(2, 2);
  Tensor3 h = t_hessian(f, x);
  Eigen::MatrixXd h0(2, 2), h1(2, 2);
  h0 << 2, 0, 0, 2;
  h1 << 2, 0, 0, 0;
  EXPECT_LE((h.slice(0) - h0).cwiseAbs().maxCoeff(), 1e-5);
  EXPECT_LE((h.slice(1) - h1).cwiseAbs().maxCoeff(), 1e-5);

  std::vector<Tensor3> samples{point_fixture(2, 2), Tensor3(2, 1, 2)};
  ConvexityCertificate cert = convexity_certificate(f, samples);
  EXPECT_EQ(cert.verdict, ConvexityVerdict::kConvexEvidence);
  EXPECT_FALSE(cert.pd_evidence);  // Fourier block diag(0, 2) is singular
  EXPECT_FALSE(cert.witness_point.has_value());
}

TEST(Calculus, NonCirculantWitnessRejected) {
  // f(X) = x111 * x211^2: the gradient Jacobian is not block circulant, so f
  // has no T-Hessian and the detector must throw.
  MvFunction f{2, 2, [](const Tensor3& x) { return x(0, 0, 0) * x(1, 0, 0) * x(1, 0, 0); }, nullptr};
  Tensor3 x = point_fixture(2, 2);
  EXPECT_THROW(t_hessian(f, x), NotTwiceTDifferentiableError);
  try {
    t_hessian(f, x);
  } catch (const NotTwiceTDifferentiableError& e) {
    EXPECT_GT(e.deviation, kCirculantTol);
  }
  // the certificate machinery cannot classify such a function either
  EXPECT_THROW(convexity_certificate(f, {x}), NotTwiceTDifferentiableError);
}

TEST(Calculus, NonConvexQuadraticWitness) {
  Tensor3 a(2, 2, 2);
  a.slice(0) << 1, 0, 0, -2;  // indefinite
  QuadraticForm q{a, Tensor3(2, 1, 2), 0.0};
  ConvexityCertificate cert = convexity_certificate(q.as_function(), {point_fixture(2, 2)});
  ASSERT_EQ(cert.verdict, ConvexityVerdict::kNotConvex);
  ASSERT_TRUE(cert.witness_direction.has_value());
  EXPECT_LT(cert.witness_value, 0.0);
  // the witness direction really has negative curvature: <Y, H*Y> < 0
  Tensor3 h = a + ttranspose(a);
  const Tensor3& y = *cert.witness_direction;
  EXPECT_NEAR(inner(y, tprod(h, y)), cert.witness_value, 1e-8 * (1.0 + std::abs(cert.witness_value)));
}

TEST(Calculus, P1MatchesDenseHessian) {
  Eigen::MatrixXd m(3, 3);
  m << 2, 0.5, 0, 0.5, 1, -0.2, 0, -0.2, 3;
  MvFunction f{3, 1, [m](const Tensor3& x) {
                 Eigen::VectorXd v = x.slice(0).col(0);
                 return 0.5 * v.dot(m * v);
               },
               nullptr};
  Tensor3 x = point_fixture(3, 1);
  Tensor3 h = t_hessian(f, x);
  EXPECT_LE((h.slice(0) - m).cwiseAbs().maxCoeff(), 1e-5);
}

// Gradient field with an explicitly controlled Jacobian J = bcirc(H) + eps*N,
// N symmetric with zero block-circulant part. The detector must accept or
// reject on the size of eps alone.
MvFunction jacobian_fixture(const Tensor3& h, const Eigen::MatrixXd& noise, double eps) {
  const int n = h.n(), p = h.p();
  Eigen::MatrixXd jac = bcirc(h) + eps * noise;
  return {n, p,
          [jac, n, p](const Tensor3& x) {
            Eigen::VectorXd v(n * p);
            for (int k = 0; k < p; ++k)
              for (int i = 0; i < n; ++i) v(k * n + i) = x(i, 0, k);
            return 0.5 * v.dot(jac * v);
          },
          [jac, n, p](const Tensor3& x) {
            Eigen::VectorXd v(n * p);
            for (int k = 0; k < p; ++k)
              for (int i = 0; i < n; ++i) v(k * n + i) = x(i, 0, k);
            Eigen::VectorXd g = jac * v;
            Tensor3 out(n, 1, p);
            for (int k = 0; k < p; ++k)
              for (int i = 0; i < n; ++i) out(i, 0, k) = g(k * n + i);
            return out;
          }};
}

TEST(Calculus, CirculantDetectorThreshold) {
  Tensor3 h(2, 2, 2);
  h.slice(0) << 3, 0.5, 0.5, 2;
  h.slice(1) << 0.4, 0.1, 0.1, -0.2;
  h = symmetrize(h);

  // symmetric noise with its block-circulant part projected away
  Eigen::MatrixXd raw(4, 4);
  raw << 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, -1, 0, 0, -1, 0;
  Tensor3 mean(2, 2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) mean.slice((i - j + 2) % 2) += raw.block(2 * i, 2 * j, 2, 2);
  mean *= 0.5;
  Eigen::MatrixXd noise = raw - bcirc(mean);
  noise /= noise.cwiseAbs().maxCoeff();
  ASSERT_GT(noise.cwiseAbs().maxCoeff(), 0.0);

  Tensor3 x = point_fixture(2, 2);
  MvFunction clean = jacobian_fixture(h, noise, 0.05 * kCirculantTol);
  EXPECT_NO_THROW(t_hessian(clean, x));
  MvFunction dirty = jacobian_fixture(h, noise, 30.0 * kCirculantTol);
  EXPECT_THROW(t_hessian(dirty, x), NotTwiceTDifferentiableError);
}

TEST(Calculus, TaylorResidualQuadraticExact) {
  QuadraticForm q = quad_fixture();
  Tensor3 x0 = point_fixture(2, 3);
  Tensor3 x = x0;
  x(0, 0, 1) += 0.3;
  x(1, 0, 0) -= 0.2;
  EXPECT_LE(taylor2_residual(q.as_function(), x0, x), 1e-6);
}

TEST(Calculus, DomainValidation) {
  QuadraticForm q = quad_fixture();
  EXPECT_THROW(t_gradient_fd(q.as_function(), Tensor3(3, 1, 3)), std::invalid_argument);
  EXPECT_THROW(t_hessian(q.as_function(), Tensor3(2, 1, 2)), std::invalid_argument);
  MvFunction broken{2, 3, nullptr, nullptr};
  EXPECT_THROW(t_gradient_fd(broken, point_fixture(2, 3)), std::invalid_argument);
}

}  // namespace
