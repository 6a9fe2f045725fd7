#pragma once

#include <algorithm>

#include "tsdp/fourier.hpp"

/// Spectral machinery for symmetric tensors: T-eigenvalues are the eigenvalues
/// of the Hermitian Fourier blocks (equivalently of bcirc(A)); the T-PSD cone
/// is exactly "all blocks PSD". Eigensolves run per block of size n, never on
/// the np x np embedding.
namespace tsdp {

/// Inputs within this relative distance of symmetric are symmetrized before
/// spectral work; anything farther is rejected.
inline constexpr double kSymmetryTol = 1e-8;

/// PSD floor: lambda_min >= -(atol + rtol * |lambda|_max).
inline constexpr double kPsdAtol = 1e-10;
inline constexpr double kPsdRtol = 1e-12;

namespace detail {

inline Tensor3 require_symmetric(const Tensor3& a, const char* who) {
  if (a.m() != a.n()) throw std::invalid_argument(std::string(who) + ": tensor must be n x n x p");
  if (!is_symmetric(a, kSymmetryTol))
    throw std::invalid_argument(std::string(who) + ": tensor is not symmetric within tolerance");
  return symmetrize(a);
}

/// Hermitian eigenvalues of one Fourier block, ascending.
inline Eigen::VectorXd block_eigenvalues(const Eigen::MatrixXcd& blk) {
  Eigen::MatrixXcd h = 0.5 * (blk + blk.adjoint());
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h, Eigen::EigenvaluesOnly).eigenvalues();
}

}  // namespace detail

/// All np T-eigenvalues (over every Fourier block), sorted descending.
inline std::vector<double> t_eigenvalues(const Tensor3& a) {
  Tensor3 s = detail::require_symmetric(a, "t_eigenvalues");
  FourierBlocks fb = fourier_blocks(s);
  std::vector<double> ev;
  ev.reserve(static_cast<size_t>(a.n()) * a.p());
  for (const auto& blk : fb.blocks) {
    Eigen::VectorXd v = detail::block_eigenvalues(blk);
    ev.insert(ev.end(), v.data(), v.data() + v.size());
  }
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

/// Tr(A) = p * trace of the first frontal slice (= trace of bcirc(A)).
inline double t_trace(const Tensor3& a) {
  if (a.m() != a.n()) throw std::invalid_argument("t_trace: tensor must be n x n x p");
  return a.p() * a.slice(0).trace();
}

/// Smallest and largest eigenvalue over all Fourier blocks of a symmetrized tensor.
inline std::pair<double, double> t_eigenvalue_range(const Tensor3& a) {
  Tensor3 s = detail::require_symmetric(a, "t_eigenvalue_range");
  FourierBlocks fb = fourier_blocks(s);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& blk : fb.blocks) {
    Eigen::VectorXd v = detail::block_eigenvalues(blk);
    lo = std::min(lo, v(0));
    hi = std::max(hi, v(v.size() - 1));
  }
  return {lo, hi};
}

inline bool is_t_psd(const Tensor3& a, double atol = kPsdAtol, double rtol = kPsdRtol) {
  auto [lo, hi] = t_eigenvalue_range(a);
  const double scale = std::max(std::abs(lo), std::abs(hi));
  return lo >= -(atol + rtol * scale);
}

inline bool is_t_pd(const Tensor3& a, double atol = kPsdAtol, double rtol = kPsdRtol) {
  auto [lo, hi] = t_eigenvalue_range(a);
  const double scale = std::max(std::abs(lo), std::abs(hi));
  return lo > (atol + rtol * scale);
}

/// A = U^T * S * U with U orthogonal and S f-diagonal (diagonal slices);
/// eigenvalues are the diagonals of the Fourier blocks of S, descending.
struct TEigenDecomposition {
  Tensor3 U, S;
  std::vector<double> eigenvalues;
};

/// Blockwise Hermitian eigendecomposition. Only self-conjugate blocks and one
/// block per conjugate pair are factored; the mate reuses conjugated vectors
/// so that U and S reconstruct as real tensors. Eigenvalues are ordered
/// descending inside each block.
inline TEigenDecomposition t_eig(const Tensor3& a) {
  Tensor3 sym = detail::require_symmetric(a, "t_eig");
  const int n = a.n(), p = a.p();
  FourierBlocks fb = fourier_blocks(sym);
  FourierBlocks ub{n, n, p, std::vector<Eigen::MatrixXcd>(static_cast<size_t>(p))};
  FourierBlocks sb{n, n, p, std::vector<Eigen::MatrixXcd>(static_cast<size_t>(p))};
  std::vector<double> ev;
  ev.reserve(static_cast<size_t>(n) * p);
  for (int j = 0; j <= p / 2; ++j) {
    Eigen::MatrixXcd h = 0.5 * (fb.blocks[static_cast<size_t>(j)] + fb.blocks[static_cast<size_t>(j)].adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    // descending order
    Eigen::VectorXd lam = es.eigenvalues().reverse();
    Eigen::MatrixXcd q = es.eigenvectors().rowwise().reverse();
    ub.blocks[static_cast<size_t>(j)] = q.adjoint();
    sb.blocks[static_cast<size_t>(j)] = lam.cast<Cplx>().asDiagonal();
    const int mate = (p - j) % p;
    if (mate != j) {
      ub.blocks[static_cast<size_t>(mate)] = q.adjoint().conjugate();
      sb.blocks[static_cast<size_t>(mate)] = sb.blocks[static_cast<size_t>(j)];
    }
  }
  for (int j = 0; j < p; ++j) {
    Eigen::VectorXcd d = sb.blocks[static_cast<size_t>(j)].diagonal();
    for (Eigen::Index i = 0; i < d.size(); ++i) ev.push_back(d(i).real());
  }
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return {inverse_fourier_blocks(ub), inverse_fourier_blocks(sb), std::move(ev)};
}

/// Unique T-PSD k-th root via blockwise Hermitian roots (eigenvalues floored
/// at zero within the PSD tolerance).
inline Tensor3 t_root(const Tensor3& a, int k) {
  if (k < 1) throw std::invalid_argument("t_root: k must be >= 1");
  if (!is_t_psd(a)) throw std::invalid_argument("t_root: tensor is not T-PSD");
  if (k == 1) return symmetrize(a);
  Tensor3 sym = detail::require_symmetric(a, "t_root");
  const int n = a.n(), p = a.p();
  FourierBlocks fb = fourier_blocks(sym);
  FourierBlocks rb{n, n, p, std::vector<Eigen::MatrixXcd>(static_cast<size_t>(p))};
  for (int j = 0; j <= p / 2; ++j) {
    Eigen::MatrixXcd h = 0.5 * (fb.blocks[static_cast<size_t>(j)] + fb.blocks[static_cast<size_t>(j)].adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    Eigen::VectorXd root = lam.array().pow(1.0 / k);
    rb.blocks[static_cast<size_t>(j)] =
        es.eigenvectors() * root.cast<Cplx>().asDiagonal() * es.eigenvectors().adjoint();
    const int mate = (p - j) % p;
    if (mate != j) rb.blocks[static_cast<size_t>(mate)] = rb.blocks[static_cast<size_t>(j)].conjugate();
  }
  return inverse_fourier_blocks(rb);
}

/// C - B^T * A^{-1} * B for T-PD A. The assembled block tensor
/// [[A, B], [B^T, C]] is T-PSD exactly when the returned complement is.
inline Tensor3 t_schur_complement(const Tensor3& a, const Tensor3& b, const Tensor3& c) {
  if (!is_t_pd(a)) throw std::invalid_argument("t_schur_complement: pivot block is not T-PD");
  if (a.p() != b.p() || a.p() != c.p() || a.n() != b.m() || b.n() != c.m() || c.m() != c.n())
    throw std::invalid_argument("t_schur_complement: incompatible shapes");
  Tensor3 bt = ttranspose(b);
  return c - tprod(tprod(bt, tinv(a)), b);
}

/// Slice-wise block-diagonal assembly of square tensors sharing p.
inline Tensor3 block_diag_tensor(const std::vector<Tensor3>& blocks) {
  if (blocks.empty()) throw std::invalid_argument("block_diag_tensor: empty list");
  const int p = blocks[0].p();
  int total = 0;
  for (const auto& blk : blocks) {
    if (blk.p() != p) throw std::invalid_argument("block_diag_tensor: p mismatch");
    if (blk.m() != blk.n()) throw std::invalid_argument("block_diag_tensor: blocks must be square");
    total += blk.n();
  }
  Tensor3 out(total, total, p);
  for (int k = 0; k < p; ++k) {
    int off = 0;
    for (const auto& blk : blocks) {
      out.slice(k).block(off, off, blk.n(), blk.n()) = blk.slice(k);
      off += blk.n();
    }
  }
  return out;
}

/// Two-by-two symmetric block tensor [[A, B], [B^T, C]].
inline Tensor3 block2x2_tensor(const Tensor3& a, const Tensor3& b, const Tensor3& c) {
  if (a.p() != b.p() || a.p() != c.p() || a.m() != a.n() || c.m() != c.n() || b.m() != a.n() || b.n() != c.n())
    throw std::invalid_argument("block2x2_tensor: incompatible shapes");
  const int m = a.n(), n = c.n(), p = a.p();
  Tensor3 bt = ttranspose(b);
  Tensor3 out(m + n, m + n, p);
  for (int k = 0; k < p; ++k) {
    out.slice(k).topLeftCorner(m, m) = a.slice(k);
    out.slice(k).topRightCorner(m, n) = b.slice(k);
    out.slice(k).bottomLeftCorner(n, m) = bt.slice(k);
    out.slice(k).bottomRightCorner(n, n) = c.slice(k);
  }
  return out;
}

/// Summary used by the CLI: full spectrum plus PSD verdicts.
struct SpectralReport {
  std::vector<double> eigenvalues;
  double lambda_max = 0, lambda_min = 0, trace = 0;
  bool is_psd = false, is_pd = false;
  double atol = kPsdAtol, rtol = kPsdRtol;
};

inline SpectralReport spectral_report(const Tensor3& a, double atol = kPsdAtol, double rtol = kPsdRtol) {
  SpectralReport r;
  r.eigenvalues = t_eigenvalues(a);
  r.lambda_max = r.eigenvalues.front();
  r.lambda_min = r.eigenvalues.back();
  r.trace = t_trace(a);
  r.atol = atol;
  r.rtol = rtol;
  const double scale = std::max(std::abs(r.lambda_min), std::abs(r.lambda_max));
  r.is_psd = r.lambda_min >= -(atol + rtol * scale);
  r.is_pd = r.lambda_min > (atol + rtol * scale);
  return r;
}

}  // namespace tsdp
