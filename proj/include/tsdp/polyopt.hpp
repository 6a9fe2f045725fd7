#pragma once

#include <chrono>

#include "tsdp/polynomial.hpp"
#include "tsdp/tsdp.hpp"

/// Applications built on the tensor SDP machinery: SOS lower bounds for even
/// polynomials through a tensor Gram relaxation (the classic Gram-matrix SDP
/// is the p = 1 case), max-T-eigenvalue and norm minimization over affine
/// families, nuclear-norm problems, a quartic {-1,+1} relaxation, and direct
/// oracles used to cross-check every solver path.
namespace tsdp {

/// All monomials of degree <= d, graded by total degree ascending and
/// lexicographically descending within a degree: 1, x1, ..., xn, x1^2,
/// x1 x2, ... Size is C(n+d, d).
struct MonomialBasis {
  int n = 0, d = 0;
  std::vector<Polynomial::Exponent> exponents;
  int size() const { return static_cast<int>(exponents.size()); }
};

inline MonomialBasis monomial_basis(int n, int d) {
  if (n < 1 || d < 0) throw std::invalid_argument("monomial_basis: need n >= 1, d >= 0");
  MonomialBasis basis{n, d, {}};
  Polynomial::Exponent cur(static_cast<size_t>(n), 0);
  auto gen = [&](auto&& self, int i, int left) -> void {
    if (i == n - 1) {
      cur[static_cast<size_t>(i)] = left;
      basis.exponents.push_back(cur);
      return;
    }
    for (int e = left; e >= 0; --e) {
      cur[static_cast<size_t>(i)] = e;
      self(self, i + 1, left - e);
    }
  };
  for (int g = 0; g <= d; ++g) gen(gen, 0, g);
  return basis;
}

/// Coefficient data of the Gram identity: with the degree-d basis folded into
/// an m x 1 x p tensor U, U * U^T = C + sum_alpha A_alpha x^alpha over all
/// 0 != alpha of degree <= 2d (alphas lists them in basis order).
struct GramDataTsdp {
  MonomialBasis basis;
  int m = 0, p = 0;
  Tensor3 C;
  std::vector<Polynomial::Exponent> alphas;
  std::vector<Tensor3> A;
};

/// p = 1 specialization: ordinary Gram matrices over the stacked basis.
struct GramDataSdp {
  MonomialBasis basis;
  Eigen::MatrixXd C;
  std::vector<Polynomial::Exponent> alphas;
  std::vector<Eigen::MatrixXd> A;
};

/// Expands the tensor Gram identity symbolically and assembles the standard
/// form problem: min <C, X> s.t. <A_alpha, X> = f_alpha, X T-PSD. The SOS
/// bound is then f_0 minus the optimal value. p must divide the basis size.
inline std::pair<GramDataTsdp, TsdpProblem> build_tsdp_data(const Polynomial& f, int p) {
  const int deg = f.degree();
  if (deg % 2 != 0) throw std::invalid_argument("build_tsdp_data: polynomial degree must be even");
  const int d = deg / 2;
  MonomialBasis basis = monomial_basis(f.n(), d);
  const int nbasis = basis.size();
  if (p < 1 || nbasis % p != 0) {
    std::string divisors;
    for (int q = 1; q <= nbasis; ++q)
      if (nbasis % q == 0) divisors += (divisors.empty() ? "" : ", ") + std::to_string(q);
    throw std::invalid_argument("build_tsdp_data: p = " + std::to_string(p) + " does not divide the basis size " +
                                std::to_string(nbasis) + " (valid: " + divisors + ")");
  }
  const int m = nbasis / p;

  // Entry (r, c) of slice k of U * U^T is sum_j basis[(k+j)%p * m + r] * basis[j*m + c].
  std::map<Polynomial::Exponent, Tensor3> data;
  Polynomial::Exponent alpha(static_cast<size_t>(f.n()), 0);
  for (int k = 0; k < p; ++k)
    for (int j = 0; j < p; ++j) {
      const int row_chunk = ((k + j) % p) * m;
      const int col_chunk = j * m;
      for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) {
          const auto& er = basis.exponents[static_cast<size_t>(row_chunk + r)];
          const auto& ec = basis.exponents[static_cast<size_t>(col_chunk + c)];
          for (size_t v = 0; v < alpha.size(); ++v) alpha[v] = er[v] + ec[v];
          auto it = data.find(alpha);
          if (it == data.end()) it = data.emplace(alpha, Tensor3(m, m, p)).first;
          it->second(r, c, k) += 1.0;
        }
    }

  GramDataTsdp gd;
  gd.basis = std::move(basis);
  gd.m = m;
  gd.p = p;
  gd.C = data.at(Polynomial::Exponent(static_cast<size_t>(f.n()), 0));

  MonomialBasis full = monomial_basis(f.n(), 2 * d);
  const int mcons = full.size() - 1;
  TsdpProblem prob;
  prob.b.resize(mcons);
  gd.alphas.reserve(static_cast<size_t>(mcons));
  gd.A.reserve(static_cast<size_t>(mcons));
  for (int i = 1; i <= mcons; ++i) {
    const auto& a = full.exponents[static_cast<size_t>(i)];
    auto it = data.find(a);
    gd.alphas.push_back(a);
    gd.A.push_back(it == data.end() ? Tensor3(m, m, p) : std::move(it->second));
    prob.b(i - 1) = f.coeff(a);
  }
  prob.C = gd.C;
  prob.A = gd.A;
  return {std::move(gd), std::move(prob)};
}

inline std::pair<GramDataSdp, Eigen::VectorXd> build_sdp_data(const Polynomial& f) {
  auto [gd, prob] = build_tsdp_data(f, 1);
  GramDataSdp out;
  out.basis = std::move(gd.basis);
  out.C = gd.C.slice(0);
  out.alphas = std::move(gd.alphas);
  out.A.reserve(gd.A.size());
  for (const Tensor3& t : gd.A) out.A.push_back(t.slice(0));
  return {std::move(out), std::move(prob.b)};
}

struct SosResult {
  double bound = 0;  // f_0 - <C, X*>: certified by the returned Gram
  double f0 = 0;
  int p = 1, basis_size = 0, m = 0;
  int block_count = 0;
  std::vector<int> block_sizes;
  int constraints = 0;                // coefficient-matching equations
  int constraints_with_constant = 0;  // counting the constant-term equation too
  double time_build = 0, time_solve = 0;
  TsdpSolution sol;
};

inline SosResult sos_lower_bound(const Polynomial& f, int p, const SolveOptions& opts = {}) {
  using clock = std::chrono::steady_clock;
  SosResult res;
  const auto t0 = clock::now();
  auto [gd, prob] = build_tsdp_data(f, p);
  res.time_build = std::chrono::duration<double>(clock::now() - t0).count();
  const auto t1 = clock::now();
  res.sol = solve_tsdp(prob, opts);
  res.time_solve = std::chrono::duration<double>(clock::now() - t1).count();
  res.f0 = f.constant_term();
  res.bound = res.f0 - res.sol.primal_obj;
  res.p = p;
  res.basis_size = gd.basis.size();
  res.m = gd.m;
  res.block_count = (p % 2 == 0) ? (p + 2) / 2 : (p + 1) / 2;
  res.block_sizes.assign(static_cast<size_t>(res.block_count), gd.m);
  res.constraints = prob.m();
  res.constraints_with_constant = prob.m() + 1;
  return res;
}

struct CirculantCheck {
  bool is_circulant = false;
  double deviation = 0;  // Frobenius distance to the projection, relative
};

/// Distance of a square matrix from its block-circulant projection (blockwise
/// diagonal means), relative to the matrix norm.
inline CirculantCheck is_block_circulant(const Eigen::MatrixXd& x, int p, double tol = 1e-6) {
  if (x.rows() != x.cols()) throw std::invalid_argument("is_block_circulant: matrix must be square");
  if (p < 1 || x.rows() % p != 0)
    throw std::invalid_argument("is_block_circulant: p must divide the matrix dimension");
  const int n = static_cast<int>(x.rows()) / p;
  Tensor3 mean(n, n, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) mean.slice(((i - j) % p + p) % p) += x.block(i * n, j * n, n, n);
  mean *= 1.0 / p;
  const double base = x.norm();
  const double dev = base == 0.0 ? 0.0 : (x - bcirc(mean)).norm() / base;
  return {dev <= tol, dev};
}

/// Side-by-side run of the tensor route and the classic p = 1 route on the
/// same polynomial. The tensor optimum, pushed through bcirc, is a Gram
/// candidate for the p = 1 problem that is block-circulant by construction;
/// the struct carries an independent certificate of its feasibility,
/// positive semidefiniteness, and objective on the p = 1 data.
struct GramEquivalence {
  SosResult tsdp_route, sdp_route;
  Eigen::MatrixXd gram_sdp;        // Gram returned by the p = 1 solve
  Eigen::MatrixXd gram_circulant;  // bcirc of the tensor route's Gram
  CirculantCheck sdp_check, circulant_check;
  double candidate_obj = 0;         // bound implied by gram_circulant on p = 1 data
  double candidate_feas_error = 0;  // max coefficient-equation violation
  double candidate_min_eig = 0;
};

inline GramEquivalence sos_gram_equivalence(const Polynomial& f, int p, const SolveOptions& opts = {}) {
  GramEquivalence out;
  out.tsdp_route = sos_lower_bound(f, p, opts);
  out.sdp_route = sos_lower_bound(f, 1, opts);
  out.gram_sdp = out.sdp_route.sol.X.slice(0);
  out.gram_circulant = bcirc(out.tsdp_route.sol.X);
  out.sdp_check = is_block_circulant(out.gram_sdp, p);
  out.circulant_check = is_block_circulant(out.gram_circulant, p);
  auto [gd, b] = build_sdp_data(f);
  double feas = 0;
  for (size_t i = 0; i < gd.A.size(); ++i)
    feas = std::max(feas, std::abs(gd.A[i].cwiseProduct(out.gram_circulant).sum() - b(static_cast<Eigen::Index>(i))));
  out.candidate_feas_error = feas;
  out.candidate_obj = f.constant_term() - gd.C.cwiseProduct(out.gram_circulant).sum();
  out.candidate_min_eig =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(out.gram_circulant, Eigen::EigenvaluesOnly).eigenvalues()(0);
  return out;
}

struct MinimaxResult {
  double value = 0;   // optimal eta
  Eigen::VectorXd z;  // optimal affine parameters
  TsdpSolution sol;
};

/// min over z of the largest T-eigenvalue of M0 + sum_k z_k M_k, as the dual
/// of a standard-form tensor SDP (dual variables y = (eta, z)).
inline MinimaxResult min_max_teigenvalue(const Tensor3& m0, const std::vector<Tensor3>& ms,
                                         const SolveOptions& opts = {}) {
  if (m0.m() != m0.n()) throw std::invalid_argument("min_max_teigenvalue: tensors must be square");
  TsdpProblem prob;
  prob.C = -symmetrize(m0);
  prob.A.push_back(-1.0 * identity(m0.n(), m0.p()));
  for (const Tensor3& mk : ms) {
    if (!mk.same_shape(m0)) throw std::invalid_argument("min_max_teigenvalue: family shape mismatch");
    prob.A.push_back(symmetrize(mk));
  }
  prob.b = Eigen::VectorXd::Zero(1 + static_cast<Eigen::Index>(ms.size()));
  prob.b(0) = -1.0;
  MinimaxResult res;
  res.sol = solve_tsdp(prob, opts);
  res.value = res.sol.y(0);
  res.z = res.sol.y.tail(static_cast<Eigen::Index>(ms.size()));
  return res;
}

/// min over z of the tensor spectral norm (largest singular value of any
/// Fourier block) of P0 + sum_k z_k P_k, via the symmetric block embedding
/// [[eta I, P(z)], [P(z)^T, eta I]].
inline MinimaxResult min_spectral_norm(const Tensor3& p0, const std::vector<Tensor3>& ps,
                                       const SolveOptions& opts = {}) {
  const int m = p0.m(), n = p0.n(), p = p0.p();
  const Tensor3 zmm(m, m, p), znn(n, n, p);
  TsdpProblem prob;
  prob.C = block2x2_tensor(zmm, -1.0 * p0, znn);
  prob.A.push_back(-1.0 * identity(m + n, p));
  for (const Tensor3& pk : ps) {
    if (!pk.same_shape(p0)) throw std::invalid_argument("min_spectral_norm: family shape mismatch");
    prob.A.push_back(block2x2_tensor(zmm, pk, znn));
  }
  prob.b = Eigen::VectorXd::Zero(1 + static_cast<Eigen::Index>(ps.size()));
  prob.b(0) = -1.0;
  MinimaxResult res;
  res.sol = solve_tsdp(prob, opts);
  res.value = res.sol.y(0);
  res.z = res.sol.y.tail(static_cast<Eigen::Index>(ps.size()));
  return res;
}

namespace detail {

/// Shared builder for nuclear-norm problems: variable Y = [[W1, Z], [Z^T, W2]]
/// T-PSD, objective (1/2) <I, Y> (the trace form), and for each operator B a
/// constraint <embed(B), Y> = 2 rhs pinning <B, Z> = rhs.
inline TsdpProblem nuclear_norm_problem(const std::vector<Tensor3>& ops, const Eigen::VectorXd& rhs, int m, int n,
                                        int p) {
  TsdpProblem prob;
  prob.C = 0.5 * identity(m + n, p);
  prob.A.reserve(ops.size());
  for (const Tensor3& b : ops) {
    Tensor3 g(m + n, m + n, p);
    for (int k = 0; k < p; ++k)
      for (int r = 0; r < m; ++r)
        for (int c = 0; c < n; ++c) {
          const double v = b(r, c, k);
          if (v == 0.0) continue;
          g(r, m + c, k) += v;
          g(m + c, r, (p - k) % p) += v;
        }
    prob.A.push_back(std::move(g));
  }
  prob.b = 2.0 * rhs;
  return prob;
}

}  // namespace detail

/// Tensor nuclear norm (sum of all Fourier-block singular values over p) via
/// the trace-form tensor SDP with the off-diagonal block pinned to A.
inline TsdpSolution nuclear_norm_solve(const Tensor3& a, const SolveOptions& opts = {}) {
  const int m = a.m(), n = a.n(), p = a.p();
  std::vector<Tensor3> ops;
  Eigen::VectorXd rhs(m * n * p);
  int idx = 0;
  for (int k = 0; k < p; ++k)
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < n; ++c) {
        Tensor3 e(m, n, p);
        e(r, c, k) = 1.0;
        ops.push_back(std::move(e));
        rhs(idx++) = a(r, c, k);
      }
  return solve_tsdp(detail::nuclear_norm_problem(ops, rhs, m, n, p), opts);
}

inline double nuclear_norm_tsdp(const Tensor3& a, const SolveOptions& opts = {}) {
  return nuclear_norm_solve(a, opts).primal_obj;
}

struct NuclearAffineResult {
  double value = 0;
  Tensor3 X;
  TsdpSolution sol;
};

/// min ||X||_nuclear s.t. <B_i, X> = b_i.
inline NuclearAffineResult nuclear_norm_min_affine(const std::vector<Tensor3>& ops, const Eigen::VectorXd& rhs,
                                                   const SolveOptions& opts = {}) {
  if (ops.empty() || static_cast<Eigen::Index>(ops.size()) != rhs.size())
    throw std::invalid_argument("nuclear_norm_min_affine: need operators matching rhs");
  const int m = ops[0].m(), n = ops[0].n(), p = ops[0].p();
  for (const Tensor3& b : ops)
    if (!b.same_shape(ops[0])) throw std::invalid_argument("nuclear_norm_min_affine: operator shape mismatch");
  NuclearAffineResult res;
  res.sol = solve_tsdp(detail::nuclear_norm_problem(ops, rhs, m, n, p), opts);
  res.value = res.sol.primal_obj;
  res.X = Tensor3(m, n, p);
  for (int k = 0; k < p; ++k) res.X.slice(k) = res.sol.X.slice(k).block(0, m, m, n);
  return res;
}

/// fold(x x^T) as an n x 1 x n tensor: slice j is the column x * x_j.
inline Tensor3 rank_one_tensor(const Eigen::VectorXd& x) {
  const int n = static_cast<int>(x.size());
  Tensor3 t(n, 1, n);
  for (int j = 0; j < n; ++j) t.slice(j) = x * x(j);
  return t;
}

struct IqpResult {
  double upper_bound = 0;  // n e^T y*, valid over all {-1,+1}^n sign patterns
  TsdpSolution sol;
};

/// Relaxation of max <X, A*X> over tensorized x x^T with x in {-1,+1}^n:
/// the dual problem min n e^T y s.t. Diag(y) - A T-PSD in standard form.
inline IqpResult integer_quartic_relaxation(const Tensor3& a, const SolveOptions& opts = {}) {
  const int n = a.n();
  if (a.m() != n || a.p() != n) throw std::invalid_argument("integer_quartic_relaxation: tensor must be n x n x n");
  TsdpProblem prob;
  prob.C = -symmetrize(a);
  for (int i = 0; i < n; ++i) {
    Tensor3 e(n, n, n);
    e(i, i, 0) = 1.0;
    prob.A.push_back(-1.0 * e);
  }
  prob.b = Eigen::VectorXd::Constant(n, -static_cast<double>(n));
  IqpResult res;
  res.sol = solve_tsdp(prob, opts);
  res.upper_bound = -res.sol.dual_obj;
  return res;
}

/// Exhaustive {-1,+1}^n maximum of <X, A*X> with X = rank_one_tensor(x),
/// evaluated as (x kron x)^T bcirc(A) (x kron x).
inline double iqp_oracle(const Tensor3& a) {
  const int n = a.n();
  if (a.m() != n || a.p() != n) throw std::invalid_argument("iqp_oracle: tensor must be n x n x n");
  if (n > 20) throw std::invalid_argument("iqp_oracle: exhaustive search limited to n <= 20");
  const Eigen::MatrixXd big = bcirc(symmetrize(a));
  Eigen::VectorXd x(n), w(n * n);
  double best = -std::numeric_limits<double>::infinity();
  for (unsigned long mask = 0; mask < (1ul << n); ++mask) {
    for (int i = 0; i < n; ++i) x(i) = (mask >> i) & 1 ? 1.0 : -1.0;
    for (int j = 0; j < n; ++j) w.segment(j * n, n) = x * x(j);
    best = std::max(best, w.dot(big * w));
  }
  return best;
}

/// Largest singular value over all Fourier blocks (the spectral norm of the
/// block-circulant embedding).
inline double spectral_norm_oracle(const Tensor3& a) {
  FourierBlocks fb = fourier_blocks(a);
  double best = 0;
  for (const auto& blk : fb.blocks) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(blk);
    best = std::max(best, svd.singularValues()(0));
  }
  return best;
}

/// (1/p) sum of all singular values over all Fourier blocks (the tensor
/// nuclear norm; dual to the spectral norm).
inline double nuclear_norm_oracle(const Tensor3& a) {
  FourierBlocks fb = fourier_blocks(a);
  double total = 0;
  for (const auto& blk : fb.blocks) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(blk);
    total += svd.singularValues().sum();
  }
  return total / a.p();
}

/// Largest T-eigenvalue of a symmetric tensor.
inline double max_teig_oracle(const Tensor3& a) { return t_eigenvalue_range(a).second; }

}  // namespace tsdp
