#pragma once

#include "tsdp/sdp.hpp"
#include "tsdp/spectral.hpp"

/// Tensor SDP layer: standard-form problems over the T-PSD cone,
///   min <C, X>  s.t.  <A_i, X> = b_i,  X T-PSD,
/// solved by transforming to a weighted block-diagonal Hermitian SDP over the
/// kept Fourier blocks (one block per conjugate pair) and lifting back.
namespace tsdp {

struct TsdpProblem {
  Tensor3 C;
  std::vector<Tensor3> A;
  Eigen::VectorXd b;

  int n() const { return C.n(); }
  int p() const { return C.p(); }
  int m() const { return static_cast<int>(A.size()); }

  void validate() const {
    if (C.m() != C.n()) throw std::invalid_argument("TsdpProblem: C must be n x n x p");
    if (!is_symmetric(C, kSymmetryTol)) throw std::invalid_argument("TsdpProblem: C is not symmetric");
    if (A.empty() || static_cast<Eigen::Index>(A.size()) != b.size())
      throw std::invalid_argument("TsdpProblem: need m >= 1 constraints with matching b");
    for (const Tensor3& ai : A) {
      if (!ai.same_shape(C)) throw std::invalid_argument("TsdpProblem: constraint shape mismatch");
      if (!is_symmetric(ai, kSymmetryTol)) throw std::invalid_argument("TsdpProblem: constraint is not symmetric");
    }
  }
};

struct TsdpSolution {
  Tensor3 X, S;
  Eigen::VectorXd y;
  double primal_obj = 0, dual_obj = 0, gap = 0;
  double primal_residual = 0, dual_residual = 0;
  double min_eig_X = 0, min_eig_S = 0;
  int iterations = 0;
  SolveStatus status = SolveStatus::kMaxIter;
  std::vector<double> gap_history;
};

/// Degenerate problems (notably Gram problems without strict complementarity)
/// can stall at MAX_ITER while already holding a fully certified point; such
/// exits count as solved wherever an optimality decision is needed.
inline bool near_optimal(const TsdpSolution& sol, double tol = 1e-6) {
  if (sol.status == SolveStatus::kOptimal) return true;
  return sol.status == SolveStatus::kMaxIter && sol.primal_residual <= tol && sol.dual_residual <= tol &&
         sol.min_eig_X >= -tol && sol.min_eig_S >= -tol;
}

/// Bookkeeping of the Fourier-block reduction: block j of the reduced problem
/// is the j-th DFT block (0-based), kept for j < K, weighted 1 on
/// self-conjugate blocks and 2 on blocks standing in for a conjugate pair.
struct ReductionMap {
  bool even = false;
  int K = 0;
  std::vector<double> weights;
  int n = 0, p = 0, m = 0;
};

/// [<A_i, X>]_i.
inline Eigen::VectorXd apply_operator(const TsdpProblem& prob, const Tensor3& x) {
  Eigen::VectorXd out(prob.m());
  for (int i = 0; i < prob.m(); ++i) out(i) = inner(prob.A[static_cast<size_t>(i)], x);
  return out;
}

/// sum_i y_i A_i.
inline Tensor3 adjoint(const TsdpProblem& prob, const Eigen::VectorXd& y) {
  if (y.size() != prob.m()) throw std::invalid_argument("adjoint: y length mismatch");
  Tensor3 out(prob.n(), prob.n(), prob.p());
  for (int i = 0; i < prob.m(); ++i) out += y(i) * prob.A[static_cast<size_t>(i)];
  return out;
}

/// Weighted kept-block Hermitian SDP equivalent to the tensor problem:
/// data blocks are weight_j times the Fourier blocks, the right-hand side is
/// p*b, and objectives carry a 1/p scale, so optimal values coincide.
inline std::pair<CsdpProblem, ReductionMap> reduce_to_csdp(const TsdpProblem& prob) {
  prob.validate();
  const int n = prob.n(), p = prob.p(), m = prob.m();
  ReductionMap map;
  map.even = (p % 2 == 0);
  map.K = map.even ? (p + 2) / 2 : (p + 1) / 2;
  map.n = n;
  map.p = p;
  map.m = m;
  map.weights.assign(static_cast<size_t>(map.K), 2.0);
  map.weights[0] = 1.0;
  if (map.even) map.weights[static_cast<size_t>(map.K - 1)] = 1.0;

  CsdpProblem csdp;
  csdp.block_sizes.assign(static_cast<size_t>(map.K), n);
  csdp.is_real.resize(static_cast<size_t>(map.K));
  for (int j = 0; j < map.K; ++j)
    csdp.is_real[static_cast<size_t>(j)] = (j == 0) || (map.even && j == map.K - 1);
  auto reduce_tensor = [&](const Tensor3& t) {
    FourierBlocks fb = fourier_blocks(symmetrize(t));
    std::vector<Eigen::MatrixXcd> kept(static_cast<size_t>(map.K));
    for (int j = 0; j < map.K; ++j) {
      Eigen::MatrixXcd blk = map.weights[static_cast<size_t>(j)] * fb.blocks[static_cast<size_t>(j)];
      blk = 0.5 * (blk + blk.adjoint()).eval();
      if (csdp.is_real[static_cast<size_t>(j)]) blk = blk.real().cast<Cplx>();
      kept[static_cast<size_t>(j)] = std::move(blk);
    }
    return kept;
  };
  csdp.C = reduce_tensor(prob.C);
  csdp.A.reserve(static_cast<size_t>(m));
  for (const Tensor3& ai : prob.A) csdp.A.push_back(reduce_tensor(ai));
  csdp.b = static_cast<double>(p) * prob.b;
  csdp.obj_scale = 1.0 / p;
  return {std::move(csdp), std::move(map)};
}

/// Rebuild real tensors from the kept blocks: mirror across conjugate pairs
/// and inverse transform. Dual blocks are divided by their reduction weight
/// first, since the reduced dual slack is weight_j times the tensor slack's
/// Fourier block.
inline TsdpSolution lift_solution(const CsdpSolution& sol, const ReductionMap& map) {
  if (static_cast<int>(sol.X.size()) != map.K || static_cast<int>(sol.S.size()) != map.K)
    throw std::invalid_argument("lift_solution: block count does not match reduction");
  auto lift_blocks = [&](const std::vector<Eigen::MatrixXcd>& blocks, bool unweight) {
    FourierBlocks fb{map.n, map.n, map.p,
                     std::vector<Eigen::MatrixXcd>(static_cast<size_t>(map.p))};
    for (int j = 0; j < map.K; ++j) {
      Eigen::MatrixXcd blk = blocks[static_cast<size_t>(j)];
      if (unweight) blk /= map.weights[static_cast<size_t>(j)];
      blk = 0.5 * (blk + blk.adjoint()).eval();
      fb.blocks[static_cast<size_t>(j)] = blk;
      const int mate = (map.p - j) % map.p;
      if (mate != j) fb.blocks[static_cast<size_t>(mate)] = blk.conjugate();
    }
    return symmetrize(inverse_fourier_blocks(fb));
  };
  TsdpSolution out;
  out.X = lift_blocks(sol.X, false);
  out.S = lift_blocks(sol.S, true);
  out.y = sol.y;
  out.primal_obj = sol.primal_obj;
  out.dual_obj = sol.dual_obj;
  out.gap = sol.rel_gap;
  out.primal_residual = sol.primal_res;
  out.dual_residual = sol.dual_res;
  out.iterations = sol.iterations;
  out.status = sol.status;
  out.gap_history = sol.gap_history;
  return out;
}

/// reduce -> solve -> lift, with objectives, residuals, and eigenvalue floors
/// recomputed from the lifted tensors so the report is independent of solver
/// bookkeeping.
inline TsdpSolution solve_tsdp(const TsdpProblem& prob, const SolveOptions& opts = {}) {
  auto [csdp, map] = reduce_to_csdp(prob);
  CsdpSolution cs = solve(csdp, opts);
  TsdpSolution out = lift_solution(cs, map);
  out.primal_obj = inner(prob.C, out.X);
  out.dual_obj = prob.b.dot(out.y);
  out.gap = std::abs(out.primal_obj - out.dual_obj) /
            (1.0 + std::abs(out.primal_obj) + std::abs(out.dual_obj));
  out.primal_residual = (apply_operator(prob, out.X) - prob.b).norm() / (1.0 + prob.b.norm());
  out.dual_residual = norm(adjoint(prob, out.y) + out.S - prob.C) / (1.0 + norm(prob.C));
  out.min_eig_X = t_eigenvalue_range(out.X).first;
  out.min_eig_S = t_eigenvalue_range(out.S).first;
  return out;
}

/// inner(X, S); vanishes at optimality.
inline double check_complementarity(const TsdpSolution& sol) { return inner(sol.X, sol.S); }

}  // namespace tsdp
