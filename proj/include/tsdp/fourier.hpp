#pragma once

#include <complex>

#include "tsdp/tensor.hpp"

/// Fourier diagonalization of the block-circulant embedding. With the unitary
/// DFT F_p[j,k] = w^{jk}/sqrt(p), w = exp(2*pi*i/p) (zero-based indices),
/// bcirc(A) = (F_p^H kron I_m) Diag(Ahat_1..Ahat_p) (F_p kron I_n), where the
/// blocks come from an unnormalized tube transform:
///   Ahat_j = sum_k A^(k) w^{(j-1)(k-1)}   (1-based j,k).
/// Real tensors give conjugate-symmetric blocks: Ahat_j = conj(Ahat_{p+2-j}).
namespace tsdp {

using Cplx = std::complex<double>;

/// The p Fourier blocks of an m x n x p tensor, in natural DFT order.
struct FourierBlocks {
  int m = 0, n = 0, p = 0;
  std::vector<Eigen::MatrixXcd> blocks;
};

/// Unitary DFT matrix F_p.
inline Eigen::MatrixXcd dft_matrix(int p) {
  Eigen::MatrixXcd f(p, p);
  const double scale = 1.0 / std::sqrt(static_cast<double>(p));
  for (int j = 0; j < p; ++j)
    for (int k = 0; k < p; ++k)
      f(j, k) = std::polar(scale, 2.0 * M_PI * ((static_cast<long long>(j) * k) % p) / p);
  return f;
}

/// Table of the p-th roots of unity w^0..w^{p-1}.
inline std::vector<Cplx> unit_roots(int p) {
  std::vector<Cplx> w(static_cast<size_t>(p));
  for (int t = 0; t < p; ++t) w[static_cast<size_t>(t)] = std::polar(1.0, 2.0 * M_PI * t / p);
  return w;
}

/// Direct O(p^2) tube DFT; desk-scale p makes fast transforms unnecessary.
inline FourierBlocks fourier_blocks(const Tensor3& t) {
  const int p = t.p();
  FourierBlocks fb{t.m(), t.n(), p, {}};
  fb.blocks.reserve(static_cast<size_t>(p));
  const auto w = unit_roots(p);
  for (int j = 0; j < p; ++j) {
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(t.m(), t.n());
    for (int k = 0; k < p; ++k) acc += t.slice(k) * w[static_cast<size_t>((static_cast<long long>(j) * k) % p)];
    fb.blocks.push_back(std::move(acc));
  }
  return fb;
}

/// Max violation of the real-tensor conjugate pairing blocks[j] = conj(blocks[p-j]).
inline double conjugate_symmetry_violation(const FourierBlocks& fb) {
  double v = 0.0;
  for (int j = 0; j < fb.p; ++j) {
    const int mate = (fb.p - j) % fb.p;
    v = std::max(v, (fb.blocks[static_cast<size_t>(j)] - fb.blocks[static_cast<size_t>(mate)].conjugate())
                        .cwiseAbs()
                        .maxCoeff());
  }
  return v;
}

struct ConjugateSymmetryError : std::runtime_error {
  explicit ConjugateSymmetryError(double v)
      : std::runtime_error("inverse_fourier_blocks: conjugate symmetry violated by " + std::to_string(v)),
        violation(v) {}
  double violation;
};

/// Inverse tube transform back to the unique real tensor. Blocks must satisfy
/// the conjugate pairing within imag_tol * (1 + max block magnitude); the
/// imaginary residue of the reconstruction is checked against the same bound
/// before being stripped.
inline Tensor3 inverse_fourier_blocks(const FourierBlocks& fb, double imag_tol = kImagTol) {
  const int p = fb.p;
  double scale = 0.0;
  for (const auto& b : fb.blocks) scale = std::max(scale, b.cwiseAbs().maxCoeff());
  const double bound = imag_tol * (1.0 + scale);
  if (double v = conjugate_symmetry_violation(fb); v > bound) throw ConjugateSymmetryError(v);
  const auto w = unit_roots(p);
  Tensor3 out(fb.m, fb.n, p);
  for (int k = 0; k < p; ++k) {
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(fb.m, fb.n);
    for (int j = 0; j < p; ++j)
      acc += fb.blocks[static_cast<size_t>(j)] *
             std::conj(w[static_cast<size_t>((static_cast<long long>(j) * k) % p)]);
    acc /= static_cast<double>(p);
    if (double res = acc.imag().cwiseAbs().maxCoeff(); res > bound) throw ConjugateSymmetryError(res);
    out.slice(k) = acc.real();
  }
  return out;
}

/// T-product via the Fourier path (blockwise products, inverse transform).
/// p = 1 degenerates to the plain matrix product exactly.
inline Tensor3 tprod(const Tensor3& a, const Tensor3& b) {
  if (a.n() != b.m() || a.p() != b.p())
    throw std::invalid_argument("tprod: inner dimensions or p mismatch");
  if (a.p() == 1) return Tensor3({a.slice(0) * b.slice(0)});
  FourierBlocks fa = fourier_blocks(a), fbk = fourier_blocks(b);
  FourierBlocks fc{a.m(), b.n(), a.p(), {}};
  fc.blocks.reserve(static_cast<size_t>(a.p()));
  for (int j = 0; j < a.p(); ++j)
    fc.blocks.push_back(fa.blocks[static_cast<size_t>(j)] * fbk.blocks[static_cast<size_t>(j)]);
  return inverse_fourier_blocks(fc);
}

struct SingularTensorError : std::runtime_error {
  explicit SingularTensorError(double cond)
      : std::runtime_error("tinv: a Fourier block is numerically singular (condition estimate " +
                           std::to_string(cond) + ")"),
        condition(cond) {}
  double condition;
};

/// T-inverse computed blockwise; every Fourier block must be invertible.
/// Throws SingularTensorError when any block's condition exceeds cond_max.
inline Tensor3 tinv(const Tensor3& a, double cond_max = 1e13) {
  if (a.m() != a.n()) throw std::invalid_argument("tinv: tensor must be n x n x p");
  FourierBlocks fb = fourier_blocks(a);
  for (auto& blk : fb.blocks) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(blk, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    const double cond = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
    if (!(cond < cond_max)) throw SingularTensorError(cond);
    blk = svd.solve(Eigen::MatrixXcd::Identity(a.n(), a.n()));
  }
  return inverse_fourier_blocks(fb);
}

}  // namespace tsdp
