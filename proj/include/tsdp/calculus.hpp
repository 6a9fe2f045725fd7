#pragma once

#include <cmath>
#include <functional>
#include <optional>

#include "tsdp/spectral.hpp"

/// T-calculus for scalar functions of an n x 1 x p tensor variable: the
/// T-gradient is the folded coordinate gradient; a T-Hessian exists only when
/// the symmetrized coordinate Jacobian is block-circulant, in which case it is
/// bcirc^{-1} of that Jacobian.
namespace tsdp {

/// Relative block-circulant deviation above which a Jacobian is declared not
/// to come from a twice T-differentiable function (finite-difference noise floor).
inline constexpr double kCirculantTol = 1e-5;

struct MvFunction {
  int n = 0, p = 0;
  std::function<double(const Tensor3&)> evaluate;
  /// Optional analytic gradient; when absent derivatives fall back to finite
  /// differences of evaluate.
  std::function<Tensor3(const Tensor3&)> gradient;
};

/// f(X) = <X, A*X> + <B, X> + c with A n x n x p, B and X n x 1 x p.
struct QuadraticForm {
  Tensor3 A, B;
  double c = 0;

  QuadraticForm(Tensor3 a, Tensor3 b, double c0) : A(std::move(a)), B(std::move(b)), c(c0) {
    if (A.m() != A.n() || B.n() != 1 || B.m() != A.n() || B.p() != A.p())
      throw std::invalid_argument("QuadraticForm: A must be n x n x p and B n x 1 x p");
  }

  double operator()(const Tensor3& x) const { return inner(x, tprod(A, x)) + inner(B, x) + c; }

  /// Analytic gradient (A + A^T)*X + B.
  Tensor3 gradient(const Tensor3& x) const { return tprod(A + ttranspose(A), x) + B; }

  MvFunction as_function() const {
    QuadraticForm q = *this;
    return {A.n(), A.p(), [q](const Tensor3& x) { return q(x); },
            [q](const Tensor3& x) { return q.gradient(x); }};
  }
};

namespace detail {

inline void check_domain(const MvFunction& f, const Tensor3& x, const char* who) {
  if (!f.evaluate) throw std::invalid_argument(std::string(who) + ": function has no evaluate callback");
  if (x.m() != f.n || x.n() != 1 || x.p() != f.p)
    throw std::invalid_argument(std::string(who) + ": point shape does not match function domain");
}

inline double require_finite(double v, const char* who) {
  if (!std::isfinite(v)) throw std::runtime_error(std::string(who) + ": function evaluation is not finite");
  return v;
}

/// Coordinate basis step: X with entry (i, 0, k) shifted by delta.
inline Tensor3 shifted(const Tensor3& x, int i, int k, double delta) {
  Tensor3 y = x;
  y(i, 0, k) += delta;
  return y;
}

}  // namespace detail

/// Central-difference T-gradient. h <= 0 selects eps^{1/3} * (1 + ||X||).
inline Tensor3 t_gradient_fd(const MvFunction& f, const Tensor3& x, double h = 0.0) {
  detail::check_domain(f, x, "t_gradient_fd");
  if (h <= 0.0) h = std::cbrt(std::numeric_limits<double>::epsilon()) * (1.0 + norm(x));
  Tensor3 g(x.m(), 1, x.p());
  for (int k = 0; k < x.p(); ++k)
    for (int i = 0; i < x.m(); ++i) {
      const double fp = detail::require_finite(f.evaluate(detail::shifted(x, i, k, h)), "t_gradient_fd");
      const double fm = detail::require_finite(f.evaluate(detail::shifted(x, i, k, -h)), "t_gradient_fd");
      g(i, 0, k) = (fp - fm) / (2.0 * h);
    }
  return g;
}

/// Raised when the coordinate Jacobian of the gradient is not block-circulant,
/// i.e. the function has no T-Hessian at the point.
struct NotTwiceTDifferentiableError : std::runtime_error {
  double deviation;
  explicit NotTwiceTDifferentiableError(double dev)
      : std::runtime_error("not twice T-differentiable: Jacobian is not block-circulant (relative deviation " +
                           std::to_string(dev) + ")"),
        deviation(dev) {}
};

namespace detail {

/// np x np coordinate Jacobian of the gradient. Analytic gradient when
/// available (central differences of it); otherwise second-order central
/// differences of f itself, which are symmetric by construction.
inline Eigen::MatrixXd hessian_jacobian(const MvFunction& f, const Tensor3& x, double h) {
  const int n = x.m(), p = x.p(), np = n * p;
  Eigen::MatrixXd jac(np, np);
  // unfold(X) coordinate index of entry (i, k)
  auto idx = [n](int i, int k) { return k * n + i; };
  if (f.gradient) {
    if (h <= 0.0) h = std::cbrt(std::numeric_limits<double>::epsilon()) * (1.0 + norm(x));
    for (int k = 0; k < p; ++k)
      for (int i = 0; i < n; ++i) {
        Tensor3 gp = f.gradient(shifted(x, i, k, h));
        Tensor3 gm = f.gradient(shifted(x, i, k, -h));
        for (int kk = 0; kk < p; ++kk)
          for (int ii = 0; ii < n; ++ii)
            jac(idx(ii, kk), idx(i, k)) = (gp(ii, 0, kk) - gm(ii, 0, kk)) / (2.0 * h);
      }
    return jac;
  }
  if (h <= 0.0) h = std::pow(std::numeric_limits<double>::epsilon(), 0.25) * (1.0 + norm(x));
  const double f0 = require_finite(f.evaluate(x), "t_hessian");
  for (int a = 0; a < np; ++a) {
    const int ia = a % n, ka = a / n;
    const double fpa = require_finite(f.evaluate(shifted(x, ia, ka, h)), "t_hessian");
    const double fma = require_finite(f.evaluate(shifted(x, ia, ka, -h)), "t_hessian");
    jac(a, a) = (fpa - 2.0 * f0 + fma) / (h * h);
    for (int b = a + 1; b < np; ++b) {
      const int ib = b % n, kb = b / n;
      Tensor3 base = shifted(x, ia, ka, h);
      const double fpp = require_finite(f.evaluate(shifted(base, ib, kb, h)), "t_hessian");
      const double fpm = require_finite(f.evaluate(shifted(base, ib, kb, -h)), "t_hessian");
      base = shifted(x, ia, ka, -h);
      const double fmp = require_finite(f.evaluate(shifted(base, ib, kb, h)), "t_hessian");
      const double fmm = require_finite(f.evaluate(shifted(base, ib, kb, -h)), "t_hessian");
      jac(a, b) = jac(b, a) = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
    }
  }
  return jac;
}

struct CirculantProjection {
  Tensor3 tensor;       // slice k = mean of the blocks on circulant diagonal k
  double deviation;     // max block deviation relative to max(1, ||J||_max)
};

/// Project an np x np matrix onto block-circulant structure and measure how
/// far it was. The denominator is floored at 1 so that near-zero Jacobians
/// (linear functions) are judged absolutely.
inline CirculantProjection project_block_circulant(const Eigen::MatrixXd& jac, int n, int p) {
  Tensor3 mean(n, n, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) mean.slice(((i - j) % p + p) % p) += jac.block(i * n, j * n, n, n);
  mean *= 1.0 / p;
  double dev = 0;
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      const Eigen::MatrixXd diff = jac.block(i * n, j * n, n, n) - mean.slice(((i - j) % p + p) % p);
      dev = std::max(dev, diff.cwiseAbs().maxCoeff());
    }
  const double scale = std::max(1.0, jac.cwiseAbs().maxCoeff());
  return {std::move(mean), dev / scale};
}

}  // namespace detail

/// T-Hessian at X: bcirc^{-1} of the symmetrized coordinate Jacobian, provided
/// that Jacobian is block-circulant within circ_tol. h <= 0 selects an
/// automatic step.
inline Tensor3 t_hessian(const MvFunction& f, const Tensor3& x, double h = 0.0, double circ_tol = kCirculantTol) {
  detail::check_domain(f, x, "t_hessian");
  Eigen::MatrixXd jac = detail::hessian_jacobian(f, x, h);
  jac = 0.5 * (jac + jac.transpose()).eval();
  auto proj = detail::project_block_circulant(jac, x.m(), x.p());
  if (proj.deviation > circ_tol) throw NotTwiceTDifferentiableError(proj.deviation);
  return proj.tensor;
}

enum class ConvexityVerdict { kConvexEvidence, kNotConvex };

struct ConvexityCertificate {
  ConvexityVerdict verdict = ConvexityVerdict::kConvexEvidence;
  /// Every sampled Hessian was T-PD. Positive-definiteness is only sufficient
  /// for strict convexity, so this is reported as evidence, never a claim.
  bool pd_evidence = false;
  /// Populated when verdict == kNotConvex.
  std::optional<Tensor3> witness_point;
  std::optional<Tensor3> witness_direction;
  double witness_value = 0;  // <Y, H*Y> at the witness, below -tol
};

namespace detail {

/// Real direction Y with <Y, H*Y> = (weight/p) * lambda, built from an
/// eigenvector of the Fourier block of H attaining lambda = lambda_min.
inline Tensor3 negative_direction(const Tensor3& hess) {
  FourierBlocks fb = fourier_blocks(symmetrize(hess));
  const int n = hess.n(), p = hess.p();
  int arg_block = 0;
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXcd best_vec;
  for (int j = 0; j <= p / 2; ++j) {
    Eigen::MatrixXcd hblk = 0.5 * (fb.blocks[static_cast<size_t>(j)] + fb.blocks[static_cast<size_t>(j)].adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hblk);
    if (es.eigenvalues()(0) < best) {
      best = es.eigenvalues()(0);
      best_vec = es.eigenvectors().col(0);
      arg_block = j;
    }
  }
  FourierBlocks dir{n, 1, p, std::vector<Eigen::MatrixXcd>(static_cast<size_t>(p),
                                                           Eigen::MatrixXcd::Zero(n, 1))};
  dir.blocks[static_cast<size_t>(arg_block)] = best_vec;
  const int mate = (p - arg_block) % p;
  if (mate != arg_block) dir.blocks[static_cast<size_t>(mate)] = best_vec.conjugate();
  // self-conjugate blocks must be real for the tensor to lift
  if (mate == arg_block) dir.blocks[static_cast<size_t>(arg_block)] = best_vec.real().normalized().cast<Cplx>();
  return inverse_fourier_blocks(dir);
}

}  // namespace detail

/// Sample-based convexity check: T-PSD Hessian at every sample is evidence of
/// convexity; any sample with a direction of negative curvature below -tol
/// disproves it and is returned as a witness.
inline ConvexityCertificate convexity_certificate(const MvFunction& f, const std::vector<Tensor3>& samples,
                                                  double tol = kPsdAtol) {
  if (samples.empty()) throw std::invalid_argument("convexity_certificate: samples must be nonempty");
  ConvexityCertificate cert;
  cert.pd_evidence = true;
  for (const Tensor3& x : samples) {
    Tensor3 hess = t_hessian(f, x);
    auto [lo, hi] = t_eigenvalue_range(hess);
    const double scale = std::max(std::abs(lo), std::abs(hi));
    if (lo < -(tol + kPsdRtol * scale)) {
      Tensor3 dir = detail::negative_direction(hess);
      cert.verdict = ConvexityVerdict::kNotConvex;
      cert.pd_evidence = false;
      cert.witness_point = x;
      cert.witness_value = inner(dir, tprod(hess, dir));
      cert.witness_direction = std::move(dir);
      return cert;
    }
    if (lo <= tol + kPsdRtol * scale) cert.pd_evidence = false;
  }
  return cert;
}

/// |f(X) - second-order T-Taylor expansion of f around X0 evaluated at X|.
inline double taylor2_residual(const MvFunction& f, const Tensor3& x0, const Tensor3& x, double h = 0.0) {
  detail::check_domain(f, x0, "taylor2_residual");
  detail::check_domain(f, x, "taylor2_residual");
  Tensor3 grad = f.gradient ? f.gradient(x0) : t_gradient_fd(f, x0, h);
  Tensor3 hess = t_hessian(f, x0, h);
  Tensor3 step = x - x0;
  const double model = detail::require_finite(f.evaluate(x0), "taylor2_residual") + inner(grad, step) +
                       0.5 * inner(tprod(hess, step), step);
  return std::abs(detail::require_finite(f.evaluate(x), "taylor2_residual") - model);
}

}  // namespace tsdp
