#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tsdp/calculus.hpp"
#include "tsdp/polyopt.hpp"

/// Seeded property suites over the whole library. Each suite returns a
/// SuiteResult; the CLI selftest subcommand, the unit tests and the acceptance
/// gate all run the same code.
namespace tsdp {

/// Deterministic random source: mt19937_64 output is pinned by the standard
/// and doubles are derived by bit shifts, so streams are identical across
/// platforms for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }  // [0, 1)
  double sym() { return 2.0 * uniform() - 1.0; }                              // [-1, 1)
  double range(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  Eigen::VectorXd vector(int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = sym();
    return v;
  }

  Eigen::MatrixXd matrix(int r, int c) {
    Eigen::MatrixXd m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = sym();
    return m;
  }

  Tensor3 tensor(int m, int n, int p) {
    Tensor3 t(m, n, p);
    for (int k = 0; k < p; ++k) t.slice(k) = matrix(m, n);
    return t;
  }

  Tensor3 symmetric_tensor(int n, int p) { return symmetrize(tensor(n, n, p)); }

  Tensor3 t_psd_tensor(int n, int p) {
    Tensor3 w = tensor(n, n, p);
    return tprod(w, ttranspose(w));
  }

  Tensor3 t_pd_tensor(int n, int p) {
    Tensor3 t = t_psd_tensor(n, p);
    for (int i = 0; i < n; ++i) t(i, i, 0) += 1.0;
    return t;
  }

  Eigen::MatrixXcd complex_matrix(int r, int c) {
    Eigen::MatrixXd re = matrix(r, c), im = matrix(r, c);
    return re.cast<Cplx>() + Cplx(0, 1) * im.cast<Cplx>();
  }

  Eigen::MatrixXd orthogonal(int n) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(matrix(n, n));
    return qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  }

  Eigen::MatrixXcd unitary(int n) {
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(complex_matrix(n, n));
    return qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
  }

 private:
  std::mt19937_64 eng_;
};

struct SuiteResult {
  std::string name;
  int checks = 0;
  int failures = 0;
  std::vector<std::string> messages;  // first few failure descriptions

  bool passed() const { return failures == 0; }

  void check(bool ok, const std::string& what) {
    ++checks;
    if (!ok) {
      ++failures;
      if (messages.size() < 12) messages.push_back(what);
    }
  }
};

namespace detail {

template <typename... Ts>
std::string msg(Ts&&... parts) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific;
  (os << ... << parts);
  return os.str();
}

inline double max_abs(const Tensor3& t) {
  double v = 0;
  for (int k = 0; k < t.p(); ++k) v = std::max(v, t.slice(k).cwiseAbs().maxCoeff());
  return v;
}

/// Real dimension of the symmetric n x n x p tensors (slice k equals the
/// transpose of slice p - k): caps constraint counts so random operators
/// stay linearly independent.
inline int symmetric_dof(int n, int p) {
  const int sym = n * (n + 1) / 2;
  if (p % 2 == 0) return 2 * sym + (p - 2) / 2 * n * n;
  return sym + (p - 1) / 2 * n * n;
}

}  // namespace detail

/// T-SDP with a known optimal certificate: a strictly complementary pair
/// (X*, S*) is drawn blockwise in the Fourier domain, y* at random, then
/// C = S* + sum_i y*_i A_i and b = [<A_i, X*>]_i make (X*, y*, S*) a zero-gap
/// primal-dual optimal pair with value <C, X*> = b^T y*.
struct SyntheticTsdp {
  TsdpProblem problem;
  Tensor3 x_star, s_star;
  Eigen::VectorXd y_star;
  double optimal_value = 0;
};

inline SyntheticTsdp make_synthetic_tsdp(Rng& rng, int n, int p, int m) {
  m = std::min(m, detail::symmetric_dof(n, p));
  const bool even = (p % 2 == 0);
  const int keep = even ? (p + 2) / 2 : (p + 1) / 2;
  FourierBlocks xb{n, n, p, std::vector<Eigen::MatrixXcd>(static_cast<size_t>(p))};
  FourierBlocks sb{n, n, p, std::vector<Eigen::MatrixXcd>(static_cast<size_t>(p))};
  for (int j = 0; j < keep; ++j) {
    const bool self_conj = (j == 0) || (even && j == keep - 1);
    const int r = (n == 1) ? rng.uniform_int(0, 1) : rng.uniform_int(1, n - 1);
    Eigen::VectorXd lx = Eigen::VectorXd::Zero(n), ls = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
      if (i < r)
        lx(i) = rng.range(0.5, 2.0);
      else
        ls(i) = rng.range(0.5, 2.0);
    }
    if (self_conj) {
      Eigen::MatrixXd q = rng.orthogonal(n);
      xb.blocks[static_cast<size_t>(j)] = (q * lx.asDiagonal() * q.transpose()).cast<Cplx>();
      sb.blocks[static_cast<size_t>(j)] = (q * ls.asDiagonal() * q.transpose()).cast<Cplx>();
    } else {
      Eigen::MatrixXcd q = rng.unitary(n);
      xb.blocks[static_cast<size_t>(j)] = q * lx.cast<Cplx>().asDiagonal() * q.adjoint();
      sb.blocks[static_cast<size_t>(j)] = q * ls.cast<Cplx>().asDiagonal() * q.adjoint();
    }
  }
  for (int j = keep; j < p; ++j) {
    xb.blocks[static_cast<size_t>(j)] = xb.blocks[static_cast<size_t>(p - j)].conjugate();
    sb.blocks[static_cast<size_t>(j)] = sb.blocks[static_cast<size_t>(p - j)].conjugate();
  }
  SyntheticTsdp inst;
  inst.x_star = symmetrize(inverse_fourier_blocks(xb));
  inst.s_star = symmetrize(inverse_fourier_blocks(sb));
  inst.y_star = rng.vector(m);
  inst.problem.A.reserve(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) inst.problem.A.push_back(rng.symmetric_tensor(n, p));
  inst.problem.C = inst.s_star;
  for (int i = 0; i < m; ++i) inst.problem.C += inst.y_star(i) * inst.problem.A[static_cast<size_t>(i)];
  inst.problem.b = apply_operator(inst.problem, inst.x_star);
  inst.optimal_value = inner(inst.problem.C, inst.x_star);
  return inst;
}

/// Core algebra invariants on random tensors up to 5 x 5 x 5.
inline SuiteResult suite_algebra(std::uint64_t seed, int trials = 200) {
  using detail::msg;
  SuiteResult res{"tcore"};
  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    const int m = rng.uniform_int(1, 5);
    const int n = rng.uniform_int(1, 5);
    const int q = rng.uniform_int(1, 5);
    const int p = rng.uniform_int(1, 5);
    Tensor3 a = rng.tensor(m, n, p);
    Tensor3 b = rng.tensor(n, q, p);

    // bcirc turns the T-product into a matrix product.
    Eigen::MatrixXd lhs = bcirc(tprod(a, b));
    Eigen::MatrixXd rhs = bcirc(a) * bcirc(b);
    double scale = 1.0 + rhs.cwiseAbs().maxCoeff();
    res.check((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10 * scale,
              msg("trial ", t, ": bcirc homomorphism deviation ", (lhs - rhs).cwiseAbs().maxCoeff()));

    // Right identity.
    res.check(detail::max_abs(tprod(a, identity(n, p)) - a) <= 1e-12 * (1.0 + detail::max_abs(a)),
              msg("trial ", t, ": A * I != A"));

    // Inner product matches the bcirc inner product up to the factor p.
    Tensor3 a2 = rng.tensor(m, n, p);
    const double ip = p * inner(a, a2);
    const double ipc = (bcirc(a).cwiseProduct(bcirc(a2))).sum();
    res.check(std::abs(ip - ipc) <= 1e-10 * (1.0 + std::abs(ipc)), msg("trial ", t, ": inner product scaling"));

    // Fourier round trip.
    Tensor3 rt = inverse_fourier_blocks(fourier_blocks(a));
    res.check(detail::max_abs(rt - a) <= 1e-12 * (1.0 + detail::max_abs(a)),
              msg("trial ", t, ": Fourier round-trip error ", detail::max_abs(rt - a)));

    // Transpose identity holds exactly: both sides permute the same doubles.
    res.check((bcirc(ttranspose(a)) - bcirc(a).transpose()).cwiseAbs().maxCoeff() == 0.0,
              msg("trial ", t, ": bcirc(A^T) != bcirc(A)^T"));

    // T-eigendecomposition: reconstruction and orthogonality.
    Tensor3 s0 = rng.symmetric_tensor(n, p);
    TEigenDecomposition de = t_eig(s0);
    Tensor3 recon = tprod(tprod(ttranspose(de.U), de.S), de.U);
    res.check(norm(recon - s0) <= 1e-9 * std::max(1.0, norm(s0)),
              msg("trial ", t, ": t_eig reconstruction error ", norm(recon - s0)));
    res.check(norm(tprod(ttranspose(de.U), de.U) - identity(n, p)) <= 1e-9,
              msg("trial ", t, ": t_eig factor not orthogonal"));

    // T-roots of a T-PSD tensor.
    Tensor3 psd = rng.t_psd_tensor(n, p);
    Tensor3 r2 = t_root(psd, 2);
    res.check(norm(tprod(r2, r2) - psd) <= 1e-9 * std::max(1.0, norm(psd)),
              msg("trial ", t, ": square root residual ", norm(tprod(r2, r2) - psd)));
    Tensor3 r3 = t_root(psd, 3);
    res.check(norm(tprod(tprod(r3, r3), r3) - psd) <= 1e-9 * std::max(1.0, norm(psd)),
              msg("trial ", t, ": cube root residual"));

    // Schur complement: block tensor is T-PSD iff the complement is.
    {
      const int k = rng.uniform_int(1, 3);
      Tensor3 a0 = rng.t_pd_tensor(n, p);
      Tensor3 b0 = rng.tensor(n, k, p);
      const bool positive = rng.uniform() < 0.5;
      Tensor3 core = rng.t_psd_tensor(k, p);
      for (int i = 0; i < k; ++i) core(i, i, 0) += 0.1;
      if (!positive) core *= -1.0;
      Tensor3 c0 = tprod(tprod(ttranspose(b0), tinv(a0)), b0) + core;
      res.check(is_t_psd(t_schur_complement(a0, b0, c0)) == positive,
                msg("trial ", t, ": Schur complement PSD verdict mismatch"));
      res.check(is_t_psd(block2x2_tensor(a0, b0, c0)) == positive,
                msg("trial ", t, ": block tensor PSD verdict mismatch"));
    }

    // Congruence preserves T-PSD.
    Tensor3 pmat = rng.tensor(n, n, p);
    res.check(is_t_psd(tprod(tprod(ttranspose(pmat), psd), pmat)),
              msg("trial ", t, ": congruence broke T-PSD"));

    // Self-duality of the T-PSD cone, sampled.
    Tensor3 psd2 = rng.t_psd_tensor(n, p);
    res.check(inner(psd, psd2) >= -1e-10 * (1.0 + norm(psd) * norm(psd2)),
              msg("trial ", t, ": negative inner product of T-PSD pair ", inner(psd, psd2)));
  }
  return res;
}

/// Derivatives: finite differences vs analytic forms, the block-circulant
/// Jacobian test, convexity certificates and Taylor remainders.
inline SuiteResult suite_calculus(std::uint64_t seed) {
  using detail::msg;
  SuiteResult res{"calculus"};
  Rng rng(seed);

  for (int t = 0; t < 8; ++t) {
    const int n = rng.uniform_int(1, 3), p = rng.uniform_int(1, 3);
    QuadraticForm qf{rng.tensor(n, n, p), rng.tensor(n, 1, p), rng.sym()};
    MvFunction f = qf.as_function();
    MvFunction f_nograd{f.n, f.p, f.evaluate, nullptr};
    Tensor3 x = rng.tensor(n, 1, p);
    Tensor3 g_exact = qf.gradient(x);

    for (double h : {0.0, 1e-4}) {
      Tensor3 g_fd = t_gradient_fd(f_nograd, x, h);
      res.check(norm(g_fd - g_exact) <= 1e-8 * (1.0 + norm(g_exact)),
                msg("quadratic ", t, ": gradient fd error ", norm(g_fd - g_exact), " at h=", h));
    }

    // Hessian of <X, A*X> + <B, X> + c is A + A^T, constant in X.
    Tensor3 h_expect = qf.A + ttranspose(qf.A);
    Tensor3 h_analytic = t_hessian(f, x);
    res.check(norm(h_analytic - h_expect) <= 1e-6 * (1.0 + norm(h_expect)),
              msg("quadratic ", t, ": hessian (analytic gradient) error ", norm(h_analytic - h_expect)));
    Tensor3 h_fd = t_hessian(f_nograd, x);
    res.check(norm(h_fd - h_expect) <= 1e-5 * (1.0 + norm(h_expect)),
              msg("quadratic ", t, ": hessian (fd of f) error ", norm(h_fd - h_expect)));
  }

  // Detector soundness: a function with an exactly block-circulant Jacobian
  // perturbed well below tolerance is accepted, well above is rejected.
  for (int t = 0; t < 6; ++t) {
    const int n = rng.uniform_int(1, 3), p = rng.uniform_int(2, 3), np = n * p;
    Eigen::MatrixXd j0 = bcirc(rng.symmetric_tensor(n, p));
    Eigen::MatrixXd noise = rng.matrix(np, np);
    noise = 0.5 * (noise + noise.transpose()).eval();
    noise -= bcirc(detail::project_block_circulant(noise, n, p).tensor);  // zero circulant part
    noise /= noise.cwiseAbs().maxCoeff();
    const double base = std::max(1.0, j0.cwiseAbs().maxCoeff());
    auto quadratic_with_jacobian = [n, p, np](const Eigen::MatrixXd& jac) {
      return MvFunction{n, p,
                        [jac, n, np](const Tensor3& x) {
                          Eigen::VectorXd u(np);
                          for (int k = 0; k < x.p(); ++k)
                            for (int i = 0; i < n; ++i) u(k * n + i) = x(i, 0, k);
                          return 0.5 * u.dot(jac * u);
                        },
                        [jac, n, np](const Tensor3& x) {
                          Eigen::VectorXd u(np);
                          for (int k = 0; k < x.p(); ++k)
                            for (int i = 0; i < n; ++i) u(k * n + i) = x(i, 0, k);
                          Eigen::VectorXd g = jac * u;
                          Tensor3 out(n, 1, x.p());
                          for (int k = 0; k < x.p(); ++k)
                            for (int i = 0; i < n; ++i) out(i, 0, k) = g(k * n + i);
                          return out;
                        }};
    };
    Tensor3 x = rng.tensor(n, 1, p);
    try {
      t_hessian(quadratic_with_jacobian(j0 + (0.05 * kCirculantTol * base) * noise), x);
      res.check(true, "");
    } catch (const NotTwiceTDifferentiableError& e) {
      res.check(false, msg("detector ", t, ": rejected sub-tolerance noise, deviation ", e.deviation));
    }
    bool threw = false;
    try {
      t_hessian(quadratic_with_jacobian(j0 + (30.0 * kCirculantTol * base) * noise), x);
    } catch (const NotTwiceTDifferentiableError&) {
      threw = true;
    }
    res.check(threw, msg("detector ", t, ": accepted noise far above tolerance"));
  }

  // Quartic f(X) = <X^T * X, X^T * X> is smooth in the tensor sense; its
  // gradient is 4 X * (X^T * X).
  for (int t = 0; t < 4; ++t) {
    const int n = rng.uniform_int(1, 3), p = rng.uniform_int(1, 3);
    MvFunction quart{n, p,
                     [](const Tensor3& x) {
                       Tensor3 w = tprod(ttranspose(x), x);
                       return inner(w, w);
                     },
                     [](const Tensor3& x) { return 4.0 * tprod(x, tprod(ttranspose(x), x)); }};
    Tensor3 x = rng.tensor(n, 1, p);
    Tensor3 g_fd = t_gradient_fd({quart.n, quart.p, quart.evaluate, nullptr}, x);
    Tensor3 g_an = quart.gradient(x);
    res.check(norm(g_fd - g_an) <= 1e-6 * (1.0 + norm(g_an)),
              msg("quartic ", t, ": fd gradient error ", norm(g_fd - g_an)));

    // Second-order Taylor remainder shrinks by ~8 when the step halves.
    Tensor3 dir = rng.tensor(n, 1, p);
    dir *= 1.0 / std::max(norm(dir), 1e-12);
    const double r1 = taylor2_residual(quart, x, x + 0.2 * dir);
    const double r2 = taylor2_residual(quart, x, x + 0.1 * dir);
    if (r1 > 1e-10) res.check(r2 <= 0.35 * r1, msg("quartic ", t, ": taylor remainder ratio ", r2 / r1));

    // Quadratics are reproduced exactly by their second-order model.
    QuadraticForm qf{rng.tensor(n, n, p), rng.tensor(n, 1, p), rng.sym()};
    const double rq = taylor2_residual(qf.as_function(), x, x + dir);
    res.check(rq <= 1e-8 * (1.0 + std::abs(qf(x + dir))), msg("quadratic taylor residual ", rq));
  }

  // Convexity certificates on quadratics with known curvature.
  for (int t = 0; t < 3; ++t) {
    const int n = rng.uniform_int(1, 3), p = rng.uniform_int(1, 3);
    std::vector<Tensor3> samples;
    for (int s = 0; s < 3; ++s) samples.push_back(rng.tensor(n, 1, p));
    QuadraticForm convex{rng.t_pd_tensor(n, p), rng.tensor(n, 1, p), 0.0};
    ConvexityCertificate cc = convexity_certificate(convex.as_function(), samples);
    res.check(cc.verdict == ConvexityVerdict::kConvexEvidence && cc.pd_evidence,
              msg("convexity ", t, ": T-PD quadratic not recognized"));

    QuadraticForm concave{-1.0 * identity(n, p), rng.tensor(n, 1, p), 0.0};
    ConvexityCertificate nc = convexity_certificate(concave.as_function(), samples);
    res.check(nc.verdict == ConvexityVerdict::kNotConvex, msg("convexity ", t, ": concave quadratic accepted"));
    if (nc.verdict == ConvexityVerdict::kNotConvex) {
      res.check(nc.witness_point.has_value() && nc.witness_direction.has_value() && nc.witness_value < 0,
                msg("convexity ", t, ": missing or non-negative witness"));
      if (nc.witness_point && nc.witness_direction) {
        Tensor3 hess = t_hessian(concave.as_function(), *nc.witness_point);
        const double quad = inner(*nc.witness_direction, tprod(hess, *nc.witness_direction));
        res.check(quad < 0, msg("convexity ", t, ": witness direction has non-negative curvature ", quad));
      }
    }
  }

  // A function whose gradient Jacobian is not block-circulant anywhere
  // generic: f = x_{111} * x_{211}^2 over 2 x 1 x 2 tensors.
  {
    MvFunction f{2, 2, [](const Tensor3& x) { return x(0, 0, 0) * x(1, 0, 0) * x(1, 0, 0); }, nullptr};
    Tensor3 x(2, 1, 2);
    x(0, 0, 0) = 0.3;
    x(1, 0, 0) = -0.7;
    x(0, 0, 1) = 0.2;
    x(1, 0, 1) = 0.4;
    bool threw = false;
    double dev = 0;
    try {
      t_hessian(f, x);
    } catch (const NotTwiceTDifferentiableError& e) {
      threw = true;
      dev = e.deviation;
    }
    res.check(threw && dev > kCirculantTol, msg("witness function accepted; deviation ", dev));
  }
  return res;
}

/// Interior-point batch on synthetic certified instances. Requires at least
/// 95% of instances solved to value error 1e-6, and every OPTIMAL status to
/// pass the independent certificate check.
inline SuiteResult suite_solver(std::uint64_t seed, int instances = 100) {
  using detail::msg;
  SuiteResult res{"solver"};
  Rng rng(seed);
  int accurate = 0;
  for (int t = 0; t < instances; ++t) {
    const int n = rng.uniform_int(2, 4), p = rng.uniform_int(1, 5), m = rng.uniform_int(1, 6);
    SyntheticTsdp inst = make_synthetic_tsdp(rng, n, p, m);
    auto [csdp, map] = reduce_to_csdp(inst.problem);
    CsdpSolution cs;
    try {
      cs = solve(csdp);
    } catch (const SchurDegenerateError& e) {
      res.check(false, msg("instance ", t, ": Schur degenerate, condition ", e.condition_estimate));
      continue;
    }
    TsdpSolution sol = lift_solution(cs, map);
    const double value = inner(inst.problem.C, sol.X);
    const double err = std::abs(value - inst.optimal_value) / (1.0 + std::abs(inst.optimal_value));
    if (cs.status == SolveStatus::kOptimal && err <= 1e-6) ++accurate;
    if (cs.status == SolveStatus::kOptimal) {
      CertifyReport rep = certify(csdp, cs);
      res.check(rep.primal_res <= 1e-7 && rep.dual_res <= 1e-7,
                msg("instance ", t, ": certify residuals ", rep.primal_res, " / ", rep.dual_res));
      res.check(rep.weak_duality_ok, msg("instance ", t, ": weak duality violated"));
      res.check(rep.min_eig_X >= -1e-7 && rep.min_eig_S >= -1e-7,
                msg("instance ", t, ": certified blocks not PSD within 1e-7"));
    }
  }
  res.check(100 * accurate >= 95 * instances,
            msg("only ", accurate, " of ", instances, " instances solved to value error 1e-6"));
  return res;
}

/// Fourier-block reduction: value equality against the unreduced all-block
/// problem, adjoint pairing, and lift round trips.
inline SuiteResult suite_reduction(std::uint64_t seed, int trials = 10) {
  using detail::msg;
  SuiteResult res{"tsdp"};
  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    const int n = rng.uniform_int(2, 3), p = rng.uniform_int(1, 5), m = rng.uniform_int(1, 4);
    SyntheticTsdp inst = make_synthetic_tsdp(rng, n, p, m);

    TsdpSolution sol = solve_tsdp(inst.problem);
    res.check(sol.status == SolveStatus::kOptimal, msg("trial ", t, ": reduced solve not OPTIMAL"));
    const double verr = std::abs(sol.primal_obj - inst.optimal_value) / (1.0 + std::abs(inst.optimal_value));
    res.check(verr <= 1e-6, msg("trial ", t, ": value error vs certificate ", verr));
    res.check(sol.dual_obj <= sol.primal_obj + 1e-7 * (1.0 + std::abs(sol.primal_obj)),
              msg("trial ", t, ": weak duality violated after lift"));
    res.check(sol.min_eig_X >= -1e-7 && sol.min_eig_S >= -1e-7, msg("trial ", t, ": lifted blocks not T-PSD"));

    // Same problem without pairing the conjugate blocks: all p Fourier blocks
    // as free Hermitian variables, no weights. Optimal values must agree.
    CsdpProblem full;
    full.block_sizes.assign(static_cast<size_t>(p), n);
    full.is_real.assign(static_cast<size_t>(p), false);
    full.is_real[0] = true;
    if (p % 2 == 0) full.is_real[static_cast<size_t>(p / 2)] = true;
    auto clean = [&](const Eigen::MatrixXcd& h, bool real_flag) -> Eigen::MatrixXcd {
      Eigen::MatrixXcd out = 0.5 * (h + h.adjoint());
      if (real_flag) out = out.real().cast<Cplx>();
      return out;
    };
    FourierBlocks cf = fourier_blocks(inst.problem.C);
    full.C.reserve(static_cast<size_t>(p));
    for (int j = 0; j < p; ++j) full.C.push_back(clean(cf.blocks[static_cast<size_t>(j)], full.is_real[static_cast<size_t>(j)]));
    for (int i = 0; i < m; ++i) {
      FourierBlocks af = fourier_blocks(inst.problem.A[static_cast<size_t>(i)]);
      std::vector<Eigen::MatrixXcd> row;
      row.reserve(static_cast<size_t>(p));
      for (int j = 0; j < p; ++j) row.push_back(clean(af.blocks[static_cast<size_t>(j)], full.is_real[static_cast<size_t>(j)]));
      full.A.push_back(std::move(row));
    }
    full.b = static_cast<double>(p) * inst.problem.b;
    full.obj_scale = 1.0 / p;
    CsdpSolution fs = solve(full);
    res.check(fs.status == SolveStatus::kOptimal, msg("trial ", t, ": unreduced solve not OPTIMAL"));
    res.check(std::abs(fs.primal_obj - sol.primal_obj) <= 1e-6 * (1.0 + std::abs(sol.primal_obj)),
              msg("trial ", t, ": unreduced vs reduced value gap ", std::abs(fs.primal_obj - sol.primal_obj)));

    // Lift round trip through hand-built Fourier blocks of the certificate.
    auto [red, rmap] = reduce_to_csdp(inst.problem);
    (void)red;
    CsdpSolution manual;
    FourierBlocks xf = fourier_blocks(inst.x_star), sf = fourier_blocks(inst.s_star);
    for (int j = 0; j < rmap.K; ++j) {
      manual.X.push_back(clean(xf.blocks[static_cast<size_t>(j)], false));
      manual.S.push_back(rmap.weights[static_cast<size_t>(j)] * clean(sf.blocks[static_cast<size_t>(j)], false));
    }
    manual.y = inst.y_star;
    TsdpSolution lifted = lift_solution(manual, rmap);
    res.check(norm(lifted.X - inst.x_star) <= 1e-10 * (1.0 + norm(inst.x_star)),
              msg("trial ", t, ": X lift round-trip error ", norm(lifted.X - inst.x_star)));
    res.check(norm(lifted.S - inst.s_star) <= 1e-10 * (1.0 + norm(inst.s_star)),
              msg("trial ", t, ": S lift round-trip error ", norm(lifted.S - inst.s_star)));

    // <A(X), y> = <X, A^*(y)> for random X, y.
    Tensor3 xr = rng.symmetric_tensor(n, p);
    Eigen::VectorXd yr = rng.vector(m);
    const double lhs = apply_operator(inst.problem, xr).dot(yr);
    const double rhs = inner(adjoint(inst.problem, yr), xr);
    res.check(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(lhs)), msg("trial ", t, ": adjoint pairing"));
  }
  return res;
}

/// Applications against brute-force oracles.
inline SuiteResult suite_oracles(std::uint64_t seed, int nuclear_count = 50, int iqp_max_n = 8) {
  using detail::msg;
  SuiteResult res{"oracles"};
  Rng rng(seed);

  for (int t = 0; t < nuclear_count; ++t) {
    Tensor3 a = rng.tensor(rng.uniform_int(1, 4), rng.uniform_int(1, 4), rng.uniform_int(1, 4));
    const double oracle = nuclear_norm_oracle(a);
    const double got = nuclear_norm_tsdp(a);
    res.check(std::abs(got - oracle) <= 1e-5 * std::max(1.0, std::abs(oracle)),
              msg("nuclear ", t, ": tsdp ", got, " vs oracle ", oracle));
  }

  for (int t = 0; t < 10; ++t) {
    Tensor3 a = rng.tensor(rng.uniform_int(1, 3), rng.uniform_int(1, 3), rng.uniform_int(1, 3));
    MinimaxResult r = min_spectral_norm(a, {});
    const double oracle = spectral_norm_oracle(a);
    res.check(std::abs(r.value - oracle) <= 1e-6 * (1.0 + oracle),
              msg("spectral ", t, ": tsdp ", r.value, " vs oracle ", oracle));
  }

  for (int t = 0; t < 10; ++t) {
    const int n = rng.uniform_int(1, 3), p = rng.uniform_int(1, 3);
    Tensor3 a = rng.symmetric_tensor(n, p);
    MinimaxResult r = min_max_teigenvalue(a, {});
    const double oracle = max_teig_oracle(a);
    res.check(std::abs(r.value - oracle) <= 1e-6 * (1.0 + std::abs(oracle)),
              msg("max eig ", t, ": tsdp ", r.value, " vs oracle ", oracle));
  }

  for (int n = 2; n <= iqp_max_n; ++n) {
    Tensor3 a = rng.tensor(n, n, n);
    IqpResult r = integer_quartic_relaxation(a);
    const double oracle = iqp_oracle(a);
    res.check(r.upper_bound >= oracle - 1e-7 * (1.0 + std::abs(oracle)),
              msg("iqp n=", n, ": bound ", r.upper_bound, " below exhaustive optimum ", oracle));
  }
  return res;
}

/// Sum-of-squares data builders and bounds.
inline SuiteResult suite_polyopt(std::uint64_t seed) {
  using detail::msg;
  SuiteResult res{"polyopt"};
  Rng rng(seed);

  // Coefficient expansion identity: for any Gram tensor G and point x,
  // u(x)^T bcirc(G) u(x) = <C, G> + sum_alpha <A_alpha, G> x^alpha.
  auto monomial_vector = [](const MonomialBasis& basis, const Eigen::VectorXd& x) {
    Eigen::VectorXd u(static_cast<Eigen::Index>(basis.exponents.size()));
    for (size_t i = 0; i < basis.exponents.size(); ++i) {
      double v = 1;
      for (size_t var = 0; var < basis.exponents[i].size(); ++var)
        for (int rep = 0; rep < basis.exponents[i][var]; ++rep) v *= x(static_cast<Eigen::Index>(var));
      u(static_cast<Eigen::Index>(i)) = v;
    }
    return u;
  };
  auto monomial_value = [](const Polynomial::Exponent& e, const Eigen::VectorXd& x) {
    double v = 1;
    for (size_t var = 0; var < e.size(); ++var)
      for (int rep = 0; rep < e[var]; ++rep) v *= x(static_cast<Eigen::Index>(var));
    return v;
  };

  for (int p : {1, 2, 3}) {  // divisors of the basis size 6
    Polynomial shape = Polynomial::variable(2, 0).pow(4);  // fixes n = 2, degree 4
    auto [gd, prob] = build_tsdp_data(shape, p);
    (void)prob;
    for (int t = 0; t < 17; ++t) {
      Tensor3 g = rng.symmetric_tensor(gd.m, gd.p);
      Eigen::MatrixXd bg = bcirc(g);
      Eigen::VectorXd x = rng.vector(2);
      Eigen::VectorXd u = monomial_vector(gd.basis, x);
      const double lhs = u.dot(bg * u);
      double rhs = inner(gd.C, g);
      for (size_t i = 0; i < gd.alphas.size(); ++i) rhs += inner(gd.A[i], g) * monomial_value(gd.alphas[i], x);
      res.check(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(lhs)),
                msg("expansion p=", p, " trial ", t, ": ", std::abs(lhs - rhs)));
    }
  }

  // Same identity for the flat builder.
  {
    Polynomial shape = Polynomial::variable(2, 0).pow(4);
    auto [gd, b] = build_sdp_data(shape);
    (void)b;
    for (int t = 0; t < 10; ++t) {
      Eigen::MatrixXd g = rng.matrix(static_cast<int>(gd.basis.size()), static_cast<int>(gd.basis.size()));
      g = 0.5 * (g + g.transpose()).eval();
      Eigen::VectorXd x = rng.vector(2);
      Eigen::VectorXd u = monomial_vector(gd.basis, x);
      const double lhs = u.dot(g * u);
      double rhs = gd.C.cwiseProduct(g).sum();
      for (size_t i = 0; i < gd.alphas.size(); ++i)
        rhs += gd.A[i].cwiseProduct(g).sum() * monomial_value(gd.alphas[i], x);
      res.check(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(lhs)), msg("flat expansion trial ", t));
    }
  }

  // (x - 1)^2 has certified minimum 0.
  {
    Polynomial x1 = Polynomial::variable(1, 0);
    Polynomial f = (x1 - Polynomial::constant(1, 1.0)) * (x1 - Polynomial::constant(1, 1.0));
    SosResult r = sos_lower_bound(f, 1);
    res.check(r.sol.status == SolveStatus::kOptimal && std::abs(r.bound) <= 1e-6,
              msg("(x-1)^2 bound ", r.bound));
  }

  // Polynomials built from a block-circulant Gram: every divisor relaxation
  // is feasible, bounds are nonnegative and never exceed the flat bound.
  for (auto [m, p] : {std::pair{3, 2}, std::pair{2, 3}}) {
    Polynomial shape = Polynomial::variable(2, 0).pow(4);
    auto [gd, prob0] = build_tsdp_data(shape, p);
    (void)prob0;
    Tensor3 g = rng.t_psd_tensor(m, p);
    Polynomial f = Polynomial::constant(2, inner(gd.C, g));
    for (size_t i = 0; i < gd.alphas.size(); ++i) {
      Polynomial term = Polynomial::constant(2, inner(gd.A[i], g));
      for (size_t var = 0; var < gd.alphas[i].size(); ++var)
        for (int rep = 0; rep < gd.alphas[i][var]; ++rep) term = term * Polynomial::variable(2, static_cast<int>(var));
      f += term;
    }
    SosResult rp = sos_lower_bound(f, p);
    SosResult r1 = sos_lower_bound(f, 1);
    res.check(rp.sol.status == SolveStatus::kOptimal && r1.sol.status == SolveStatus::kOptimal,
              msg("ordering p=", p, ": solves not OPTIMAL"));
    res.check(rp.bound >= -1e-6, msg("ordering p=", p, ": SOS polynomial got negative bound ", rp.bound));
    res.check(rp.bound <= r1.bound + 1e-7 * (1.0 + std::abs(r1.bound)),
              msg("ordering p=", p, ": tensor bound ", rp.bound, " exceeds flat bound ", r1.bound));
    // The flat bound never exceeds the true minimum, sampled on a grid.
    double grid_min = std::numeric_limits<double>::infinity();
    for (int i = -20; i <= 20; ++i)
      for (int j = -20; j <= 20; ++j) {
        Eigen::VectorXd pt(2);
        pt << i / 10.0, j / 10.0;
        grid_min = std::min(grid_min, f(pt));
      }
    res.check(r1.bound <= grid_min + 1e-6 * (1.0 + std::abs(grid_min)),
              msg("ordering p=", p, ": flat bound ", r1.bound, " above sampled minimum ", grid_min));
  }

  // Norm duality: <A, Y> <= ||A||_* ||Y||_sp.
  for (int t = 0; t < 20; ++t) {
    Tensor3 a = rng.tensor(3, 3, 3), y = rng.tensor(3, 3, 3);
    res.check(std::abs(inner(a, y)) <= nuclear_norm_oracle(a) * spectral_norm_oracle(y) + 1e-8,
              msg("norm duality trial ", t));
  }

  // Circulant structure detector on known positives and negatives.
  {
    Tensor3 t0 = rng.tensor(3, 3, 2);
    Eigen::MatrixXd pos = bcirc(t0);
    res.check(is_block_circulant(pos, 2).is_circulant, "bcirc output not detected as block-circulant");
    Eigen::MatrixXd neg = pos;
    neg(0, 3) += 0.01 * std::max(1.0, pos.cwiseAbs().maxCoeff());
    res.check(!is_block_circulant(neg, 2).is_circulant, "perturbed matrix still detected as block-circulant");
  }
  return res;
}

inline std::vector<SuiteResult> run_selftest(std::uint64_t seed, const std::string& filter = "") {
  std::vector<SuiteResult> out;
  auto wanted = [&filter](const char* name) {
    return filter.empty() || std::string(name).find(filter) != std::string::npos;
  };
  if (wanted("tcore")) out.push_back(suite_algebra(seed));
  if (wanted("calculus")) out.push_back(suite_calculus(seed));
  if (wanted("tsdp")) out.push_back(suite_reduction(seed));
  if (wanted("solver")) out.push_back(suite_solver(seed));
  if (wanted("oracles")) out.push_back(suite_oracles(seed));
  if (wanted("polyopt")) out.push_back(suite_polyopt(seed));
  return out;
}

}  // namespace tsdp
