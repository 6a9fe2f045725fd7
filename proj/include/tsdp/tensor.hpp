#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <utility>
#include <vector>

/// Third-order tensor algebra built on the T-product: a real m x n x p tensor
/// is a stack of p frontal slices, multiplied through the block-circulant
/// embedding bcirc(). All operations here are pure; tensors are cheap value
/// types backed by Eigen matrices.
namespace tsdp {

/// Default relative tolerance for algebraic identity checks.
inline constexpr double kAlgebraTol = 1e-10;
/// Default tolerance for stripping imaginary residue after Fourier round trips.
inline constexpr double kImagTol = 1e-8;

class Tensor3 {
 public:
  Tensor3() = default;

  /// Zero tensor of shape m x n x p.
  Tensor3(int m, int n, int p) {
    if (m < 1 || n < 1 || p < 1) throw std::invalid_argument("Tensor3: dimensions must be positive");
    slices_.assign(static_cast<size_t>(p), Eigen::MatrixXd::Zero(m, n));
  }

  /// Wraps existing frontal slices; all must share dimensions.
  explicit Tensor3(std::vector<Eigen::MatrixXd> slices) : slices_(std::move(slices)) {
    if (slices_.empty()) throw std::invalid_argument("Tensor3: needs at least one slice");
    for (const auto& s : slices_)
      if (s.rows() != slices_[0].rows() || s.cols() != slices_[0].cols())
        throw std::invalid_argument("Tensor3: slices must share dimensions");
  }

  int m() const { return static_cast<int>(slices_[0].rows()); }
  int n() const { return static_cast<int>(slices_[0].cols()); }
  int p() const { return static_cast<int>(slices_.size()); }

  /// Frontal slice, 0-based (slice k holds A^(k+1) in 1-based notation).
  const Eigen::MatrixXd& slice(int k) const { return slices_.at(static_cast<size_t>(k)); }
  Eigen::MatrixXd& slice(int k) { return slices_.at(static_cast<size_t>(k)); }

  double& operator()(int i, int j, int k) { return slices_.at(static_cast<size_t>(k))(i, j); }
  double operator()(int i, int j, int k) const { return slices_.at(static_cast<size_t>(k))(i, j); }

  bool same_shape(const Tensor3& o) const { return m() == o.m() && n() == o.n() && p() == o.p(); }

  Tensor3& operator+=(const Tensor3& o) {
    require_same_shape(o);
    for (int k = 0; k < p(); ++k) slices_[static_cast<size_t>(k)] += o.slice(k);
    return *this;
  }
  Tensor3& operator-=(const Tensor3& o) {
    require_same_shape(o);
    for (int k = 0; k < p(); ++k) slices_[static_cast<size_t>(k)] -= o.slice(k);
    return *this;
  }
  Tensor3& operator*=(double a) {
    for (auto& s : slices_) s *= a;
    return *this;
  }

  friend Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
  friend Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
  friend Tensor3 operator*(double a, Tensor3 t) { return t *= a; }
  friend Tensor3 operator*(Tensor3 t, double a) { return t *= a; }
  friend Tensor3 operator-(Tensor3 t) { return t *= -1.0; }

 private:
  void require_same_shape(const Tensor3& o) const {
    if (!same_shape(o)) throw std::invalid_argument("Tensor3: shape mismatch");
  }
  std::vector<Eigen::MatrixXd> slices_;
};

/// <A,B> = sum over all entries a_ijk * b_ijk.
inline double inner(const Tensor3& a, const Tensor3& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("inner: shape mismatch");
  double s = 0.0;
  for (int k = 0; k < a.p(); ++k) s += a.slice(k).cwiseProduct(b.slice(k)).sum();
  return s;
}

/// Frobenius norm sqrt(<A,A>).
inline double norm(const Tensor3& a) { return std::sqrt(inner(a, a)); }

/// Stacks the frontal slices vertically: mp x n matrix [A^(1); ...; A^(p)].
inline Eigen::MatrixXd unfold(const Tensor3& t) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(t.m()) * t.p(), t.n());
  for (int k = 0; k < t.p(); ++k) out.middleRows(static_cast<Eigen::Index>(k) * t.m(), t.m()) = t.slice(k);
  return out;
}

/// Inverse of unfold; M must have m*p rows and n columns.
inline Tensor3 fold(const Eigen::MatrixXd& mat, int m, int n, int p) {
  if (mat.rows() != static_cast<Eigen::Index>(m) * p || mat.cols() != n)
    throw std::invalid_argument("fold: matrix is not mp x n");
  std::vector<Eigen::MatrixXd> slices(static_cast<size_t>(p));
  for (int k = 0; k < p; ++k) slices[static_cast<size_t>(k)] = mat.middleRows(static_cast<Eigen::Index>(k) * m, m);
  return Tensor3(std::move(slices));
}

/// Block-circulant matrix of a tensor: block (i,j) is slice (i-j mod p), so
/// the first block column is unfold(T).
inline Eigen::MatrixXd bcirc(const Tensor3& t) {
  const int m = t.m(), n = t.n(), p = t.p();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(m) * p, static_cast<Eigen::Index>(n) * p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      out.block(static_cast<Eigen::Index>(i) * m, static_cast<Eigen::Index>(j) * n, m, n) =
          t.slice(((i - j) % p + p) % p);
  return out;
}

struct NotBlockCirculantError : std::runtime_error {
  explicit NotBlockCirculantError(double dev)
      : std::runtime_error("bcirc_inv: input is not block-circulant (max block deviation " +
                           std::to_string(dev) + ")"),
        deviation(dev) {}
  double deviation;
};

/// Reads the first block column of an mp x np matrix back into a tensor.
/// With check_circulant set, every block diagonal must agree with the first
/// block column within tol * max(1, ||M||); otherwise throws with the
/// measured deviation.
inline Tensor3 bcirc_inv(const Eigen::MatrixXd& mat, int m, int n, int p, bool check_circulant = false,
                         double tol = kAlgebraTol) {
  if (mat.rows() != static_cast<Eigen::Index>(m) * p || mat.cols() != static_cast<Eigen::Index>(n) * p)
    throw std::invalid_argument("bcirc_inv: matrix is not mp x np");
  std::vector<Eigen::MatrixXd> slices(static_cast<size_t>(p));
  for (int k = 0; k < p; ++k) slices[static_cast<size_t>(k)] = mat.block(static_cast<Eigen::Index>(k) * m, 0, m, n);
  Tensor3 t(std::move(slices));
  if (check_circulant) {
    double dev = 0.0;
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) {
        const auto& ref = t.slice(((i - j) % p + p) % p);
        dev = std::max(dev, (mat.block(static_cast<Eigen::Index>(i) * m, static_cast<Eigen::Index>(j) * n, m, n) - ref)
                                .cwiseAbs()
                                .maxCoeff());
      }
    if (dev > tol * std::max(1.0, mat.norm())) throw NotBlockCirculantError(dev);
  }
  return t;
}

/// Tensor transpose: slice 1 transposed, slices 2..p transposed and reversed;
/// satisfies bcirc(ttranspose(A)) = bcirc(A)^T exactly.
inline Tensor3 ttranspose(const Tensor3& t) {
  const int p = t.p();
  std::vector<Eigen::MatrixXd> slices(static_cast<size_t>(p));
  slices[0] = t.slice(0).transpose();
  for (int k = 1; k < p; ++k) slices[static_cast<size_t>(k)] = t.slice(p - k).transpose();
  return Tensor3(std::move(slices));
}

/// Identity tensor: slice 1 = I_n, other slices zero; neutral for the T-product.
inline Tensor3 identity(int n, int p) {
  Tensor3 t(n, n, p);
  t.slice(0) = Eigen::MatrixXd::Identity(n, n);
  return t;
}

inline bool is_symmetric(const Tensor3& t, double tol = 1e-8) {
  if (t.m() != t.n()) return false;
  return norm(t - ttranspose(t)) <= tol * std::max(1.0, norm(t));
}

/// (A + A^T)/2 in the tensor-transpose sense.
inline Tensor3 symmetrize(const Tensor3& t) {
  Tensor3 s = ttranspose(t);
  s += t;
  s *= 0.5;
  return s;
}

}  // namespace tsdp
