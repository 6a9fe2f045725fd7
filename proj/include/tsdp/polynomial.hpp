#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

/// Sparse real polynomials with exact integer exponent bookkeeping, plus the
/// one-term-per-line text format "coeff x1^a1 x2^a2 ...".
namespace tsdp {

class Polynomial {
 public:
  using Exponent = std::vector<int>;

  Polynomial() = default;
  explicit Polynomial(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("Polynomial: need at least one variable");
  }

  static Polynomial constant(int n, double value) {
    Polynomial f(n);
    f.add_term(Exponent(static_cast<size_t>(n), 0), value);
    return f;
  }

  static Polynomial variable(int n, int i) {
    if (i < 0 || i >= n) throw std::invalid_argument("Polynomial::variable: index out of range");
    Polynomial f(n);
    Exponent e(static_cast<size_t>(n), 0);
    e[static_cast<size_t>(i)] = 1;
    f.add_term(e, 1.0);
    return f;
  }

  int n() const { return n_; }
  const std::map<Exponent, double>& terms() const { return terms_; }

  /// Accumulates; zero results are erased so no zero coefficients are stored.
  void add_term(const Exponent& alpha, double coeff) {
    if (static_cast<int>(alpha.size()) != n_) throw std::invalid_argument("Polynomial: exponent length mismatch");
    for (int e : alpha)
      if (e < 0) throw std::invalid_argument("Polynomial: negative exponent");
    auto it = terms_.find(alpha);
    if (it == terms_.end()) {
      if (coeff != 0.0) terms_.emplace(alpha, coeff);
    } else {
      it->second += coeff;
      if (it->second == 0.0) terms_.erase(it);
    }
  }

  double coeff(const Exponent& alpha) const {
    auto it = terms_.find(alpha);
    return it == terms_.end() ? 0.0 : it->second;
  }

  double constant_term() const { return coeff(Exponent(static_cast<size_t>(n_), 0)); }

  int degree() const {
    int d = 0;
    for (const auto& [alpha, c] : terms_) {
      int s = 0;
      for (int e : alpha) s += e;
      d = std::max(d, s);
    }
    return d;
  }

  double operator()(const Eigen::VectorXd& x) const {
    if (x.size() != n_) throw std::invalid_argument("Polynomial: evaluation point has wrong dimension");
    double v = 0;
    for (const auto& [alpha, c] : terms_) {
      double t = c;
      for (int i = 0; i < n_; ++i)
        for (int e = 0; e < alpha[static_cast<size_t>(i)]; ++e) t *= x(i);
      v += t;
    }
    return v;
  }

  Polynomial& operator+=(const Polynomial& o) {
    require_same(o);
    for (const auto& [alpha, c] : o.terms_) add_term(alpha, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    require_same(o);
    for (const auto& [alpha, c] : o.terms_) add_term(alpha, -c);
    return *this;
  }
  Polynomial& operator*=(double s) {
    if (s == 0.0) {
      terms_.clear();
    } else {
      for (auto& [alpha, c] : terms_) c *= s;
    }
    return *this;
  }
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.require_same(b);
    Polynomial out(a.n_);
    for (const auto& [alpha, ca] : a.terms_)
      for (const auto& [beta, cb] : b.terms_) {
        Exponent sum = alpha;
        for (size_t i = 0; i < sum.size(); ++i) sum[i] += beta[i];
        out.add_term(sum, ca * cb);
      }
    return out;
  }

  Polynomial pow(int k) const {
    if (k < 0) throw std::invalid_argument("Polynomial::pow: negative power");
    Polynomial out = constant(n_, 1.0);
    for (int i = 0; i < k; ++i) out = out * (*this);
    return out;
  }

  /// One term per line: "coeff x1^a1 x2^a2 ..." (exponent ^1 may be omitted,
  /// a bare coefficient line is a constant term, '#' starts a comment).
  /// The variable count is the largest index seen, at least n_min.
  static Polynomial parse(const std::string& text, int n_min = 1);

 private:
  void require_same(const Polynomial& o) const {
    if (n_ != o.n_) throw std::invalid_argument("Polynomial: variable count mismatch");
  }

  int n_ = 1;
  std::map<Exponent, double> terms_;
};

inline Polynomial Polynomial::parse(const std::string& text, int n_min) {
  struct RawTerm {
    double coeff;
    std::map<int, int> powers;  // variable index (1-based) -> exponent
  };
  std::vector<RawTerm> raw;
  int nvars = std::max(n_min, 1);
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream toks(line);
    std::string tok;
    if (!(toks >> tok)) continue;
    auto fail = [lineno](const std::string& msg) {
      throw std::invalid_argument("polynomial parse error at line " + std::to_string(lineno) + ": " + msg);
    };
    RawTerm term;
    try {
      size_t used = 0;
      term.coeff = std::stod(tok, &used);
      if (used != tok.size()) fail("invalid coefficient '" + tok + "'");
    } catch (const std::logic_error&) {
      fail("invalid coefficient '" + tok + "'");
    }
    while (toks >> tok) {
      if (tok.size() < 2 || tok[0] != 'x') fail("expected x<i>[^<e>], got '" + tok + "'");
      const std::string body = tok.substr(1);
      const size_t caret = body.find('^');
      const std::string istr = body.substr(0, caret);
      const std::string estr = caret == std::string::npos ? "1" : body.substr(caret + 1);
      int vi = 0, ve = 0;
      try {
        size_t ui = 0, ue = 0;
        vi = std::stoi(istr, &ui);
        ve = std::stoi(estr, &ue);
        if (ui != istr.size() || ue != estr.size()) throw std::invalid_argument("trailing");
      } catch (const std::logic_error&) {
        fail("malformed variable token '" + tok + "'");
      }
      if (vi < 1) fail("variable indices start at 1");
      if (ve < 0) fail("negative exponent");
      term.powers[vi] += ve;
      nvars = std::max(nvars, vi);
    }
    raw.push_back(std::move(term));
  }
  Polynomial f(nvars);
  for (const RawTerm& term : raw) {
    Exponent alpha(static_cast<size_t>(nvars), 0);
    for (const auto& [vi, ve] : term.powers) alpha[static_cast<size_t>(vi - 1)] = ve;
    f.add_term(alpha, term.coeff);
  }
  return f;
}

}  // namespace tsdp
