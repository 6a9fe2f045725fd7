#pragma once

#include <cstdio>
#include <iostream>

#include "tsdp/fourier.hpp"
#include "tsdp/tensor.hpp"

/// Block-diagonal Hermitian SDP solver. Complex Hermitian blocks are embedded
/// as real symmetric blocks of doubled size; a primal-dual path-following
/// method (HKM direction, Mehrotra predictor-corrector, dense Schur
/// complement) runs on the real form, and the solution is mapped back
/// blockwise. Intended scale: a few thousand constraints, blocks up to a few
/// hundred.
namespace tsdp {

/// Data blocks must be Hermitian within this relative tolerance.
inline constexpr double kHermitianTol = 1e-12;

enum class SolveStatus { kOptimal, kMaxIter, kInfeasibleSuspected, kUnboundedSuspected };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "OPTIMAL";
    case SolveStatus::kMaxIter: return "MAX_ITER";
    case SolveStatus::kInfeasibleSuspected: return "INFEASIBLE_SUSPECTED";
    case SolveStatus::kUnboundedSuspected: return "UNBOUNDED_SUSPECTED";
  }
  return "UNKNOWN";
}

/// kAuto routes problems with many constraints to the first-order method,
/// whose per-iteration cost is linear in the data, and everything else to the
/// interior-point method. The dense interior-point Schur complement costs
/// order m^2 * sum(n_k^2) per iteration, which is prohibitive for the large
/// coefficient-matching problems produced by high-degree polynomials.
enum class SolveAlgorithm { kAuto, kInteriorPoint, kFirstOrder };

struct SolveOptions {
  double gap_tol = 1e-8;
  double feas_tol = 1e-8;
  double psd_tol = 1e-8;  // eigenvalue floor accepted when judging returned blocks
  int max_iter = 100;
  double step_fraction = 0.98;   // fraction-to-boundary
  double divergence_tol = 1e10;  // iterate norm beyond which SUSPECTED statuses fire
  bool verbose = false;
  SolveAlgorithm algorithm = SolveAlgorithm::kAuto;
  int first_order_cutoff = 500;   // kAuto switches when constraints >= cutoff
  int first_order_max_iter = 200000;
  double first_order_mu = 0.0;    // initial penalty; <= 0 selects automatically
};

/// min obj_scale * sum_k <C_k, X_k>  s.t.  sum_k <A[i][k], X_k> = b_i, X_k PSD.
/// Blocks flagged is_real carry zero imaginary part and are solved in native
/// size; complex blocks go through the symmetric embedding. obj_scale only
/// rescales reported objective values.
struct CsdpProblem {
  std::vector<int> block_sizes;
  std::vector<bool> is_real;
  std::vector<Eigen::MatrixXcd> C;               // one per block
  std::vector<std::vector<Eigen::MatrixXcd>> A;  // A[i][k]: constraint i, block k
  Eigen::VectorXd b;
  double obj_scale = 1.0;

  void validate() const {
    const size_t kb = block_sizes.size();
    if (kb == 0) throw std::invalid_argument("CsdpProblem: no blocks");
    if (is_real.size() != kb || C.size() != kb)
      throw std::invalid_argument("CsdpProblem: per-block field sizes disagree");
    if (A.empty() || static_cast<Eigen::Index>(A.size()) != b.size())
      throw std::invalid_argument("CsdpProblem: need m >= 1 constraints with matching b");
    if (!(obj_scale > 0)) throw std::invalid_argument("CsdpProblem: obj_scale must be positive");
    auto check_block = [&](const Eigen::MatrixXcd& h, size_t k, const char* what) {
      if (h.rows() != block_sizes[k] || h.cols() != block_sizes[k])
        throw std::invalid_argument(std::string("CsdpProblem: ") + what + " block has wrong size");
      const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
      if ((h - h.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol * scale)
        throw std::invalid_argument(std::string("CsdpProblem: ") + what + " block is not Hermitian");
      if (is_real[k] && h.imag().cwiseAbs().maxCoeff() > kHermitianTol * scale)
        throw std::invalid_argument(std::string("CsdpProblem: ") + what + " block flagged real has imaginary part");
    };
    for (size_t k = 0; k < kb; ++k) {
      if (block_sizes[k] < 1) throw std::invalid_argument("CsdpProblem: block sizes must be positive");
      check_block(C[k], k, "C");
    }
    for (const auto& ai : A) {
      if (ai.size() != kb) throw std::invalid_argument("CsdpProblem: constraint block count mismatch");
      for (size_t k = 0; k < kb; ++k) check_block(ai[k], k, "A");
    }
  }
};

struct CsdpSolution {
  std::vector<Eigen::MatrixXcd> X, S;  // Hermitian PSD blocks
  Eigen::VectorXd y;
  double primal_obj = 0, dual_obj = 0, rel_gap = 0;
  double primal_res = 0, dual_res = 0;
  int iterations = 0;
  SolveStatus status = SolveStatus::kMaxIter;
  std::vector<double> gap_history;  // relative gap per iterate, including the last
};

/// Interior-point linear algebra broke down (singular Schur complement or
/// lost positive definiteness of an iterate).
struct SchurDegenerateError : std::runtime_error {
  double condition_estimate;
  explicit SchurDegenerateError(double cond)
      : std::runtime_error("interior-point Schur system numerically singular (condition estimate " +
                           std::to_string(cond) + ")"),
        condition_estimate(cond) {}
};

/// [[Re H, -Im H], [Im H, Re H]]. H is PSD exactly when the image is, and
/// <H1, H2> = (1/2) <realify(H1), realify(H2)>.
inline Eigen::MatrixXd realify(const Eigen::MatrixXcd& h, double tol = kHermitianTol) {
  if (h.rows() != h.cols()) throw std::invalid_argument("realify: matrix must be square");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > tol * scale)
    throw std::invalid_argument("realify: matrix is not Hermitian within tolerance");
  const Eigen::Index n = h.rows();
  Eigen::MatrixXd r(2 * n, 2 * n);
  r.topLeftCorner(n, n) = h.real();
  r.topRightCorner(n, n) = -h.imag();
  r.bottomLeftCorner(n, n) = h.imag();
  r.bottomRightCorner(n, n) = h.real();
  return r;
}

/// Structured average inverse of realify: (P11 + P22)/2 + i (P21 - P12)/2.
/// For symmetric input the result is Hermitian, and PSD input maps to PSD.
inline Eigen::MatrixXcd derealify(const Eigen::MatrixXd& r) {
  if (r.rows() != r.cols() || r.rows() % 2 != 0)
    throw std::invalid_argument("derealify: matrix must be square with even dimension");
  const Eigen::Index n = r.rows() / 2;
  Eigen::MatrixXd re = 0.5 * (r.topLeftCorner(n, n) + r.bottomRightCorner(n, n));
  Eigen::MatrixXd im = 0.5 * (r.bottomLeftCorner(n, n) - r.topRightCorner(n, n));
  return re.cast<Cplx>() + Cplx(0, 1) * im.cast<Cplx>();
}

namespace detail {

/// Real symmetric form the interior-point method actually runs on. Complex
/// blocks are stored as (1/2) realify(.) so that block inner products against
/// unscaled PSD variables reproduce the complex inner products exactly.
struct RealForm {
  std::vector<int> sizes;
  std::vector<Eigen::MatrixXd> C;
  std::vector<std::vector<Eigen::MatrixXd>> A;  // A[i][k]
};

inline RealForm to_real_form(const CsdpProblem& prob) {
  const size_t kb = prob.block_sizes.size();
  const size_t m = prob.A.size();
  RealForm rf;
  rf.sizes.resize(kb);
  rf.C.resize(kb);
  rf.A.assign(m, std::vector<Eigen::MatrixXd>(kb));
  auto embed = [&](const Eigen::MatrixXcd& h, size_t k) -> Eigen::MatrixXd {
    Eigen::MatrixXd r = prob.is_real[k] ? Eigen::MatrixXd(h.real()) : Eigen::MatrixXd(0.5 * realify(h));
    return 0.5 * (r + r.transpose());
  };
  for (size_t k = 0; k < kb; ++k) {
    rf.sizes[k] = prob.is_real[k] ? prob.block_sizes[k] : 2 * prob.block_sizes[k];
    rf.C[k] = embed(prob.C[k], k);
    for (size_t i = 0; i < m; ++i) rf.A[i][k] = embed(prob.A[i][k], k);
  }
  return rf;
}

/// Largest alpha <= 1 with P + alpha dP staying PSD, damped by frac, via the
/// smallest eigenvalue of L^{-1} dP L^{-T}.
inline double max_step(const Eigen::LLT<Eigen::MatrixXd>& llt, const Eigen::MatrixXd& dp, double frac) {
  Eigen::MatrixXd t = llt.matrixL().solve(dp);
  Eigen::MatrixXd w = llt.matrixL().solve(t.transpose());
  const double lmin =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(w, Eigen::EigenvaluesOnly).eigenvalues()(0);
  if (lmin >= -1e-14) return 1.0;
  return std::min(1.0, -frac / lmin);
}

inline Eigen::LLT<Eigen::MatrixXd> factor_spd(const Eigen::MatrixXd& mat) {
  Eigen::LLT<Eigen::MatrixXd> llt(mat);
  if (llt.info() == Eigen::Success) return llt;
  const double jitter = 1e-12 * std::max(1.0, mat.diagonal().maxCoeff());
  Eigen::MatrixXd bumped = mat;
  bumped.diagonal().array() += jitter;
  llt.compute(bumped);
  if (llt.info() == Eigen::Success) return llt;
  Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(mat, Eigen::EigenvaluesOnly).eigenvalues();
  const double hi = std::abs(ev(ev.size() - 1));
  const double lo = ev(0);
  throw SchurDegenerateError(lo > 0 ? hi / lo : std::numeric_limits<double>::infinity());
}

// Converts real-form iterates back to the complex block convention of the
// problem: X lifts directly, S undoes the half scaling applied to the data.
inline CsdpSolution assemble_solution(const CsdpProblem& prob, const std::vector<Eigen::MatrixXd>& xs,
                                      const std::vector<Eigen::MatrixXd>& ss, const Eigen::VectorXd& y,
                                      CsdpSolution&& partial) {
  const size_t kb = prob.block_sizes.size();
  CsdpSolution sol = std::move(partial);
  sol.y = y;
  sol.X.resize(kb);
  sol.S.resize(kb);
  for (size_t k = 0; k < kb; ++k) {
    if (prob.is_real[k]) {
      sol.X[k] = xs[k].cast<Cplx>();
      sol.S[k] = ss[k].cast<Cplx>();
    } else {
      sol.X[k] = derealify(xs[k]);
      sol.S[k] = 2.0 * derealify(ss[k]);
    }
  }
  return sol;
}

/// Primal-dual path-following interior-point solve (HKM directions with a
/// Mehrotra corrector, one Schur factorization per iteration).
inline CsdpSolution solve_ipm(const CsdpProblem& prob, const SolveOptions& opts) {
  detail::RealForm rf = detail::to_real_form(prob);
  const int m = static_cast<int>(prob.b.size());
  const size_t kb = rf.sizes.size();

  auto finish = [&](const std::vector<Eigen::MatrixXd>& xs, const std::vector<Eigen::MatrixXd>& ss,
                    const Eigen::VectorXd& y, CsdpSolution&& partial) {
    return assemble_solution(prob, xs, ss, y, std::move(partial));
  };

  double anorm_max = 0, cnorm2 = 0;
  for (size_t k = 0; k < kb; ++k) cnorm2 += rf.C[k].squaredNorm();
  for (int i = 0; i < m; ++i) {
    double a2 = 0;
    for (size_t k = 0; k < kb; ++k) a2 += rf.A[static_cast<size_t>(i)][k].squaredNorm();
    anorm_max = std::max(anorm_max, std::sqrt(a2));
  }
  const double cnorm = std::sqrt(cnorm2);
  const double tau = 1.0 + std::max({prob.b.size() > 0 ? prob.b.cwiseAbs().maxCoeff() : 0.0, anorm_max, cnorm});

  int ntot = 0;
  std::vector<Eigen::MatrixXd> xs, ss;
  for (size_t k = 0; k < kb; ++k) {
    ntot += rf.sizes[k];
    xs.emplace_back(tau * Eigen::MatrixXd::Identity(rf.sizes[k], rf.sizes[k]));
    ss.emplace_back(tau * Eigen::MatrixXd::Identity(rf.sizes[k], rf.sizes[k]));
  }
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);

  Eigen::VectorXd rp(m);
  std::vector<Eigen::MatrixXd> rd(kb);
  double mu = 0, pinf = 0, dinf = 0, relgap = 0, cx = 0, by = 0;
  auto refresh = [&] {
    double xs_sum = 0, rd2 = 0;
    cx = 0;
    for (int i = 0; i < m; ++i) {
      double ax = 0;
      for (size_t k = 0; k < kb; ++k) ax += rf.A[static_cast<size_t>(i)][k].cwiseProduct(xs[k]).sum();
      rp(i) = prob.b(i) - ax;
    }
    for (size_t k = 0; k < kb; ++k) {
      rd[k] = rf.C[k] - ss[k];
      for (int i = 0; i < m; ++i) rd[k].noalias() -= y(i) * rf.A[static_cast<size_t>(i)][k];
      rd2 += rd[k].squaredNorm();
      xs_sum += xs[k].cwiseProduct(ss[k]).sum();
      cx += rf.C[k].cwiseProduct(xs[k]).sum();
    }
    by = prob.b.dot(y);
    mu = xs_sum / ntot;
    pinf = rp.norm() / (1.0 + prob.b.norm());
    dinf = std::sqrt(rd2) / (1.0 + cnorm);
    relgap = std::abs(cx - by) / (1.0 + std::abs(cx) + std::abs(by));
  };

  CsdpSolution sol;
  int it = 0;
  while (true) {
    refresh();
    sol.gap_history.push_back(relgap);
    if (opts.verbose) {
      char line[160];
      std::snprintf(line, sizeof line, "  it %3d  mu %9.3e  pinf %9.3e  dinf %9.3e  gap %9.3e", it, mu, pinf,
                    dinf, relgap);
      std::cerr << line << '\n';
    }
    if (pinf <= opts.feas_tol && dinf <= opts.feas_tol && relgap <= opts.gap_tol) {
      sol.status = SolveStatus::kOptimal;
      break;
    }
    double xmax = 0;
    for (const auto& x : xs) xmax = std::max(xmax, x.cwiseAbs().maxCoeff());
    if (y.size() > 0 && y.cwiseAbs().maxCoeff() > opts.divergence_tol) {
      sol.status = SolveStatus::kInfeasibleSuspected;
      break;
    }
    if (xmax > opts.divergence_tol) {
      sol.status = SolveStatus::kUnboundedSuspected;
      break;
    }
    if (it >= opts.max_iter) {
      sol.status = SolveStatus::kMaxIter;
      break;
    }

    std::vector<Eigen::LLT<Eigen::MatrixXd>> lltx, llts;
    lltx.reserve(kb);
    llts.reserve(kb);
    for (size_t k = 0; k < kb; ++k) {
      lltx.emplace_back(detail::factor_spd(xs[k]));
      llts.emplace_back(detail::factor_spd(ss[k]));
    }

    // Schur complement M_ij = sum_k <Ls^{-1} A_i Lx, Ls^{-1} A_j Lx>, assembled
    // blockwise as a symmetric rank update.
    Eigen::MatrixXd schur = Eigen::MatrixXd::Zero(m, m);
    {
      Eigen::MatrixXd bmat, tmp, bi;
      for (size_t k = 0; k < kb; ++k) {
        const int n = rf.sizes[k];
        bmat.resize(m, n * n);
        const auto lx = lltx[k].matrixL();
        for (int i = 0; i < m; ++i) {
          tmp.noalias() = rf.A[static_cast<size_t>(i)][k] * lx;
          bi = llts[k].matrixL().solve(tmp);
          bmat.row(i) = Eigen::Map<const Eigen::VectorXd>(bi.data(), n * n);
        }
        schur.selfadjointView<Eigen::Lower>().rankUpdate(bmat);
      }
      schur = schur.selfadjointView<Eigen::Lower>();
    }
    Eigen::LLT<Eigen::MatrixXd> mllt = detail::factor_spd(schur);

    std::vector<Eigen::MatrixXd> rc(kb), dx(kb), dsb(kb);
    Eigen::VectorXd rhs(m), dy(m);
    auto direction = [&] {
      // M dy = rp + g with g_i = <A_i, (X Rd - Rc) S^{-1}>;
      // dS = Rd - A* dy; dX = sym((Rc - X dS) S^{-1}).
      rhs = rp;
      for (size_t k = 0; k < kb; ++k) {
        Eigen::MatrixXd z = xs[k] * rd[k] - rc[k];
        Eigen::MatrixXd g = llts[k].solve(z.transpose()).transpose();
        for (int i = 0; i < m; ++i) rhs(i) += rf.A[static_cast<size_t>(i)][k].cwiseProduct(g).sum();
      }
      dy = mllt.solve(rhs);
      for (size_t k = 0; k < kb; ++k) {
        dsb[k] = rd[k];
        for (int i = 0; i < m; ++i) dsb[k].noalias() -= dy(i) * rf.A[static_cast<size_t>(i)][k];
        Eigen::MatrixXd z = rc[k] - xs[k] * dsb[k];
        Eigen::MatrixXd raw = llts[k].solve(z.transpose()).transpose();
        dx[k] = 0.5 * (raw + raw.transpose());
      }
    };
    auto step_lengths = [&]() -> std::pair<double, double> {
      double ap = 1.0, ad = 1.0;
      for (size_t k = 0; k < kb; ++k) {
        ap = std::min(ap, detail::max_step(lltx[k], dx[k], opts.step_fraction));
        ad = std::min(ad, detail::max_step(llts[k], dsb[k], opts.step_fraction));
      }
      return {ap, ad};
    };

    // Predictor: aim at complementarity zero.
    for (size_t k = 0; k < kb; ++k) rc[k].noalias() = -(xs[k] * ss[k]);
    direction();
    auto [apa, ada] = step_lengths();
    double mu_aff = 0;
    for (size_t k = 0; k < kb; ++k)
      mu_aff += (xs[k] + apa * dx[k]).cwiseProduct(ss[k] + ada * dsb[k]).sum();
    mu_aff = std::max(mu_aff / ntot, 0.0);
    const double sigma = std::min(1.0, std::pow(mu_aff / std::max(mu, 1e-300), 3));

    // Corrector: recentre and compensate the predictor cross term.
    std::vector<Eigen::MatrixXd> dxa = dx, dsa = dsb;
    for (size_t k = 0; k < kb; ++k) {
      rc[k].noalias() = -(xs[k] * ss[k]);
      rc[k].noalias() -= dxa[k] * dsa[k];
      rc[k].diagonal().array() += sigma * mu;
    }
    direction();
    auto [ap, ad] = step_lengths();
    for (size_t k = 0; k < kb; ++k) {
      xs[k] += ap * dx[k];
      xs[k] = 0.5 * (xs[k] + xs[k].transpose()).eval();
      ss[k] += ad * dsb[k];
      ss[k] = 0.5 * (ss[k] + ss[k].transpose()).eval();
    }
    y += ad * dy;
    ++it;
  }

  sol.iterations = it;
  sol.primal_obj = prob.obj_scale * cx;
  sol.dual_obj = prob.obj_scale * by;
  sol.rel_gap = relgap;
  sol.primal_res = pinf;
  sol.dual_res = dinf;
  return finish(xs, ss, y, std::move(sol));
}

/// Augmented-Lagrangian first-order solve (boundary-point style alternating
/// direction method on the dual). Per-iteration cost is one projection onto
/// the semidefinite cone per block plus sparse applications of the constraint
/// operator, so it scales to constraint counts far beyond the reach of the
/// dense interior-point Schur complement. The Gram matrix A A* is factored
/// once up front.
inline CsdpSolution solve_admm(const CsdpProblem& prob, const SolveOptions& opts) {
  detail::RealForm rf = detail::to_real_form(prob);
  const int m = static_cast<int>(prob.b.size());
  const size_t kb = rf.sizes.size();

  // Sparse triplet view of the realified constraints. Coefficient-matching
  // data is extremely sparse; everything below touches nonzeros only.
  struct Entry {
    int block, row, col;
    double v;
  };
  std::vector<std::vector<Entry>> tri(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) {
    for (size_t k = 0; k < kb; ++k) {
      const Eigen::MatrixXd& a = rf.A[static_cast<size_t>(i)][k];
      for (int c = 0; c < a.cols(); ++c)
        for (int r = 0; r < a.rows(); ++r)
          if (a(r, c) != 0.0) tri[static_cast<size_t>(i)].push_back({static_cast<int>(k), r, c, a(r, c)});
    }
  }

  auto apply_a = [&](const std::vector<Eigen::MatrixXd>& z) {
    Eigen::VectorXd out(m);
    for (int i = 0; i < m; ++i) {
      double s = 0;
      for (const Entry& e : tri[static_cast<size_t>(i)]) s += e.v * z[static_cast<size_t>(e.block)](e.row, e.col);
      out(i) = s;
    }
    return out;
  };
  auto apply_at = [&](const Eigen::VectorXd& y, std::vector<Eigen::MatrixXd>& out) {
    for (size_t k = 0; k < kb; ++k) out[k].setZero(rf.sizes[k], rf.sizes[k]);
    for (int i = 0; i < m; ++i)
      for (const Entry& e : tri[static_cast<size_t>(i)]) out[static_cast<size_t>(e.block)](e.row, e.col) += y(i) * e.v;
  };

  // Gram matrix of the constraint operator via a per-position inverted index.
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(m, m);
  for (size_t k = 0; k < kb; ++k) {
    const int n = rf.sizes[k];
    std::vector<std::vector<std::pair<int, double>>> at(static_cast<size_t>(n) * static_cast<size_t>(n));
    for (int i = 0; i < m; ++i)
      for (const Entry& e : tri[static_cast<size_t>(i)])
        if (e.block == static_cast<int>(k))
          at[static_cast<size_t>(e.row) * static_cast<size_t>(n) + static_cast<size_t>(e.col)].push_back({i, e.v});
    for (const auto& cell : at)
      for (size_t a = 0; a < cell.size(); ++a)
        for (size_t b = 0; b <= a; ++b) gram(cell[a].first, cell[b].first) += cell[a].second * cell[b].second;
  }
  gram = gram.selfadjointView<Eigen::Lower>();
  Eigen::LLT<Eigen::MatrixXd> gram_llt = detail::factor_spd(gram);

  double cnorm2 = 0;
  for (size_t k = 0; k < kb; ++k) cnorm2 += rf.C[k].squaredNorm();
  const double cnorm = std::sqrt(cnorm2);
  const double bnorm = prob.b.norm();

  std::vector<Eigen::MatrixXd> xs(kb), ss(kb), vat(kb);
  for (size_t k = 0; k < kb; ++k) {
    xs[k].setZero(rf.sizes[k], rf.sizes[k]);
    ss[k].setZero(rf.sizes[k], rf.sizes[k]);
  }
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd ac = apply_a(rf.C);
  double mu = opts.first_order_mu > 0 ? opts.first_order_mu : std::max(1e-4, std::min(1e4, (1.0 + cnorm) / (1.0 + bnorm)));

  CsdpSolution sol;
  double cx = 0, by = 0, pinf = 0, relgap = 0;
  double dinf = cnorm / (1.0 + cnorm);  // S = 0, y = 0 start
  int it = 0;
  int stall = 0;
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    Eigen::VectorXd ax = apply_a(xs);
    cx = 0;
    for (size_t k = 0; k < kb; ++k) cx += rf.C[k].cwiseProduct(xs[k]).sum();
    by = prob.b.dot(y);
    pinf = (prob.b - ax).norm() / (1.0 + bnorm);
    relgap = std::abs(cx - by) / (1.0 + std::abs(cx) + std::abs(by));
    sol.gap_history.push_back(relgap);
    if (opts.verbose && it % 500 == 0) {
      char line[160];
      std::snprintf(line, sizeof line, "  it %6d  mu %9.3e  pinf %9.3e  dinf %9.3e  gap %9.3e", it, mu, pinf,
                    dinf, relgap);
      std::cerr << line << '\n';
    }
    // The signed term keeps any dual-over-primal crossover of the slightly
    // infeasible iterates strictly inside the certification margin.
    const double crossover = (by - cx) / (1.0 + std::abs(cx));
    if (pinf <= opts.feas_tol && dinf <= opts.feas_tol && relgap <= opts.gap_tol &&
        crossover <= 0.5 * opts.gap_tol) {
      sol.status = SolveStatus::kOptimal;
      break;
    }
    double xmax = 0;
    for (const auto& x : xs) xmax = std::max(xmax, x.size() > 0 ? x.cwiseAbs().maxCoeff() : 0.0);
    if (y.size() > 0 && y.cwiseAbs().maxCoeff() > opts.divergence_tol) {
      sol.status = SolveStatus::kInfeasibleSuspected;
      break;
    }
    if (xmax > opts.divergence_tol) {
      sol.status = SolveStatus::kUnboundedSuspected;
      break;
    }
    if (it >= opts.first_order_max_iter) {
      sol.status = SolveStatus::kMaxIter;
      break;
    }

    // y step: minimizer of the augmented Lagrangian of the dual.
    Eigen::VectorXd rhs = mu * (prob.b - ax) + ac - apply_a(ss);
    y = gram_llt.solve(rhs);

    // Joint S and X step: split V = C - A*y - mu X into its semidefinite
    // parts; the multiplier update lands exactly on X = (S - V)/mu >= 0.
    apply_at(y, vat);
    double dx2 = 0;
    for (size_t k = 0; k < kb; ++k) {
      Eigen::MatrixXd v = rf.C[k] - vat[k] - mu * xs[k];
      v = 0.5 * (v + v.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(v);
      const Eigen::MatrixXd& u = es.eigenvectors();
      ss[k].noalias() = u * es.eigenvalues().cwiseMax(0.0).asDiagonal() * u.transpose();
      ss[k] = 0.5 * (ss[k] + ss[k].transpose()).eval();
      Eigen::MatrixXd xn = (ss[k] - v) / mu;
      xn = 0.5 * (xn + xn.transpose()).eval();
      dx2 += (xn - xs[k]).squaredNorm();
      xs[k] = std::move(xn);
    }
    dinf = mu * std::sqrt(dx2) / (1.0 + cnorm);

    // Penalty balancing keeps the two residuals within an order of magnitude.
    // A larger mu weights the primal residual more strongly in the y step.
    if (it % 50 == 49) {
      if (pinf > 10.0 * dinf)
        mu = std::min(mu * 1.6, 1e8);
      else if (dinf > 10.0 * pinf)
        mu = std::max(mu / 1.6, 1e-8);
      const double score = std::max({pinf, dinf, relgap});
      if (score < 0.9 * best) {
        best = score;
        stall = 0;
      } else if (++stall >= 200) {
        sol.status = SolveStatus::kMaxIter;  // no measurable progress
        break;
      }
    }
    ++it;
  }

  sol.iterations = it;
  sol.primal_obj = prob.obj_scale * cx;
  sol.dual_obj = prob.obj_scale * by;
  sol.rel_gap = relgap;
  sol.primal_res = pinf;
  sol.dual_res = dinf;
  return assemble_solution(prob, xs, ss, y, std::move(sol));
}

}  // namespace detail

/// Solves the block SDP. Stops OPTIMAL when primal and dual residuals fall
/// below feas_tol and the relative gap below gap_tol; MAX_ITER otherwise.
/// Norm blowups yield SUSPECTED statuses; singular linear algebra throws
/// SchurDegenerateError. Deterministic for fixed inputs and options.
inline CsdpSolution solve(const CsdpProblem& prob, const SolveOptions& opts = {}) {
  prob.validate();
  const int m = static_cast<int>(prob.b.size());
  const size_t kb = prob.block_sizes.size();

  // A constraint with no data cannot be satisfied unless its rhs vanishes.
  for (int i = 0; i < m; ++i) {
    double amax = 0;
    for (size_t k = 0; k < kb; ++k) {
      const auto& a = prob.A[static_cast<size_t>(i)][k];
      amax = std::max(amax, a.size() > 0 ? a.cwiseAbs().maxCoeff() : 0.0);
    }
    if (amax == 0.0 && std::abs(prob.b(i)) > opts.feas_tol) {
      CsdpSolution sol;
      sol.status = SolveStatus::kInfeasibleSuspected;
      sol.primal_res = std::abs(prob.b(i)) / (1.0 + prob.b.norm());
      sol.y = Eigen::VectorXd::Zero(m);
      sol.X.resize(kb);
      sol.S.resize(kb);
      for (size_t k = 0; k < kb; ++k) {
        sol.X[k] = Eigen::MatrixXcd::Identity(prob.block_sizes[k], prob.block_sizes[k]);
        sol.S[k] = Eigen::MatrixXcd::Identity(prob.block_sizes[k], prob.block_sizes[k]);
      }
      return sol;
    }
  }

  if (opts.algorithm == SolveAlgorithm::kFirstOrder ||
      (opts.algorithm == SolveAlgorithm::kAuto && m >= opts.first_order_cutoff))
    return detail::solve_admm(prob, opts);
  if (opts.algorithm == SolveAlgorithm::kInteriorPoint) return detail::solve_ipm(prob, opts);

  // Automatic mode: interior point first; on stall or linear-algebra
  // breakdown retry with the first-order method, which tolerates the
  // near-degenerate instances that defeat the Schur solves.
  CsdpSolution first;
  bool have_first = false;
  try {
    first = detail::solve_ipm(prob, opts);
    if (first.status != SolveStatus::kMaxIter) return first;
    have_first = true;
  } catch (const SchurDegenerateError&) {
  }
  CsdpSolution rescue = detail::solve_admm(prob, opts);
  if (have_first) {
    rescue.gap_history.insert(rescue.gap_history.begin(), first.gap_history.begin(), first.gap_history.end());
    rescue.iterations += first.iterations;
    const double w1 = std::max({first.primal_res, first.dual_res, first.rel_gap});
    const double w2 = std::max({rescue.primal_res, rescue.dual_res, rescue.rel_gap});
    if (rescue.status != SolveStatus::kOptimal && w1 < w2) return first;
  }
  return rescue;
}

/// Independent recomputation of feasibility, gap, and eigenvalue floors from
/// the returned blocks; never trusts solver-reported numbers.
struct CertifyReport {
  double primal_obj = 0, dual_obj = 0, rel_gap = 0;
  double primal_res = 0, dual_res = 0;
  double min_eig_X = 0, min_eig_S = 0;
  bool weak_duality_ok = false;
};

inline CertifyReport certify(const CsdpProblem& prob, const CsdpSolution& sol) {
  const size_t kb = prob.block_sizes.size();
  const int m = static_cast<int>(prob.b.size());
  CertifyReport rep;
  double cx = 0, cnorm2 = 0, rd2 = 0;
  rep.min_eig_X = std::numeric_limits<double>::infinity();
  rep.min_eig_S = rep.min_eig_X;
  Eigen::VectorXd rp = prob.b;
  for (size_t k = 0; k < kb; ++k) {
    const Eigen::MatrixXcd& x = sol.X[k];
    cx += prob.C[k].cwiseProduct(x.conjugate()).sum().real();
    cnorm2 += prob.C[k].squaredNorm();
    for (int i = 0; i < m; ++i)
      rp(i) -= prob.A[static_cast<size_t>(i)][k].cwiseProduct(x.conjugate()).sum().real();
    Eigen::MatrixXcd rd = prob.C[k] - sol.S[k];
    for (int i = 0; i < m; ++i) rd.noalias() -= Cplx(sol.y(i), 0) * prob.A[static_cast<size_t>(i)][k];
    rd2 += rd.squaredNorm();
    auto lmin = [](const Eigen::MatrixXcd& h) {
      Eigen::MatrixXcd hh = 0.5 * (h + h.adjoint());
      return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(hh, Eigen::EigenvaluesOnly).eigenvalues()(0);
    };
    rep.min_eig_X = std::min(rep.min_eig_X, lmin(x));
    rep.min_eig_S = std::min(rep.min_eig_S, lmin(sol.S[k]));
  }
  rep.primal_obj = prob.obj_scale * cx;
  rep.dual_obj = prob.obj_scale * prob.b.dot(sol.y);
  rep.primal_res = rp.norm() / (1.0 + prob.b.norm());
  rep.dual_res = std::sqrt(rd2) / (1.0 + std::sqrt(cnorm2));
  rep.rel_gap = std::abs(rep.primal_obj - rep.dual_obj) / (1.0 + std::abs(rep.primal_obj) + std::abs(rep.dual_obj));
  rep.weak_duality_ok = rep.dual_obj <= rep.primal_obj + 1e-8 * (1.0 + std::abs(rep.primal_obj));
  return rep;
}

}  // namespace tsdp
