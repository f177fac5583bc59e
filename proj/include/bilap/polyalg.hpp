#pragma once

// Exact sparse multivariate polynomials over the rationals, plus the
// differential operators (Laplacian, Euler operator, gradients, Hessian)
// and the reduction modulo the sphere ideal (|x|^2 - R^2).

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bilap {

using Rational = mpq_class;

inline constexpr int kMaxDim = 8;
inline constexpr int kMaxDegree = 16;

/// Exponent vector of a monomial x1^a1 ... xn^an.
class MultiIndex {
 public:
  MultiIndex() = default;

  explicit MultiIndex(int dim) : dim_(static_cast<std::uint8_t>(dim)) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("MultiIndex: dimension out of range");
  }

  MultiIndex(std::initializer_list<int> exps) : MultiIndex(static_cast<int>(exps.size())) {
    int i = 0;
    for (int e : exps) set(i++, e);
  }

  static MultiIndex from(std::span<const int> exps) {
    MultiIndex m(static_cast<int>(exps.size()));
    for (std::size_t i = 0; i < exps.size(); ++i) m.set(static_cast<int>(i), exps[i]);
    return m;
  }

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  int operator[](int i) const { return exps_[static_cast<std::size_t>(i)]; }

  void set(int i, int value) {
    if (value < 0 || value > 255) throw std::invalid_argument("MultiIndex: exponent out of range");
    degree_ = static_cast<std::uint16_t>(degree_ - exps_[static_cast<std::size_t>(i)] + value);
    exps_[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(value);
  }

  MultiIndex operator+(const MultiIndex& other) const {
    MultiIndex r(*this);
    for (int i = 0; i < dim_; ++i) r.set(i, exps_[static_cast<std::size_t>(i)] + other[i]);
    return r;
  }

  /// Bit i set iff the exponent of x_{i+1} is odd.
  unsigned parity_mask() const {
    unsigned mask = 0;
    for (int i = 0; i < dim_; ++i)
      if (exps_[static_cast<std::size_t>(i)] & 1u) mask |= 1u << i;
    return mask;
  }

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) {
    return a.dim_ == b.dim_ && a.exps_ == b.exps_;
  }

  // Graded lexicographic: total degree first, then x1's exponent, x2's, ...
  friend bool operator<(const MultiIndex& a, const MultiIndex& b) {
    if (a.degree_ != b.degree_) return a.degree_ < b.degree_;
    return a.exps_ < b.exps_;
  }

  std::size_t hash() const {
    std::size_t h = dim_;
    for (auto e : exps_) h = h * 131u + e;
    return h;
  }

 private:
  std::array<std::uint8_t, kMaxDim> exps_{};
  std::uint8_t dim_ = 0;
  std::uint16_t degree_ = 0;
};

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& m) const { return m.hash(); }
};

/// All exponent vectors of total degree exactly `degree` in `dim` variables,
/// in descending graded-lex order (x1^degree first).
inline std::vector<MultiIndex> monomials_of_degree(int dim, int degree) {
  std::vector<MultiIndex> out;
  if (degree < 0) return out;
  std::vector<int> e(static_cast<std::size_t>(dim), 0);
  // recursive fill: exponent of x1 from high to low
  auto rec = [&](auto&& self, int var, int remaining) -> void {
    if (var == dim - 1) {
      e[static_cast<std::size_t>(var)] = remaining;
      out.push_back(MultiIndex::from(e));
      return;
    }
    for (int a = remaining; a >= 0; --a) {
      e[static_cast<std::size_t>(var)] = a;
      self(self, var + 1, remaining - a);
    }
  };
  rec(rec, 0, degree);
  return out;
}

class MultiPoly {
 public:
  using Terms = std::map<MultiIndex, Rational>;

  MultiPoly() = default;

  explicit MultiPoly(int dim) : dim_(dim) {
    if (dim < 2 || dim > kMaxDim) throw std::invalid_argument("MultiPoly: dimension must lie in [2, 8]");
  }

  static MultiPoly constant(int dim, const Rational& c) {
    MultiPoly p(dim);
    p.add_term(MultiIndex(dim), c);
    return p;
  }

  /// The coordinate function x_{i+1}.
  static MultiPoly variable(int dim, int i) {
    MultiIndex m(dim);
    m.set(i, 1);
    return monomial(m);
  }

  static MultiPoly monomial(const MultiIndex& m, const Rational& c = 1) {
    MultiPoly p(m.dim());
    p.add_term(m, c);
    return p;
  }

  /// |x|^2 = x1^2 + ... + xn^2.
  static MultiPoly norm_sq(int dim) {
    MultiPoly p(dim);
    for (int i = 0; i < dim; ++i) {
      MultiIndex m(dim);
      m.set(i, 2);
      p.add_term(m, 1);
    }
    return p;
  }

  int dim() const { return dim_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  /// Highest total degree; -1 for the zero polynomial.
  int degree() const { return terms_.empty() ? -1 : terms_.rbegin()->first.degree(); }

  int min_degree() const { return terms_.empty() ? -1 : terms_.begin()->first.degree(); }

  bool is_homogeneous() const { return terms_.empty() || degree() == min_degree(); }

  Rational coeff(const MultiIndex& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  /// Accumulates c * x^m; zero results are erased.
  void add_term(const MultiIndex& m, Rational c) {
    if (m.dim() != dim_) throw std::invalid_argument("MultiPoly: term dimension mismatch");
    if (m.degree() > kMaxDegree)
      throw std::length_error("MultiPoly: degree cap " + std::to_string(kMaxDegree) + " exceeded");
    c.canonicalize();  // mpq_class(num, den) is not reduced on construction
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  MultiPoly homogeneous_part(int d) const {
    MultiPoly out(dim_);
    for (const auto& [m, c] : terms_)
      if (m.degree() == d) out.terms_.emplace_hint(out.terms_.end(), m, c);
    return out;
  }

  /// Parity mask shared by every term, or -1 if terms disagree (or p = 0).
  int parity_class() const {
    if (terms_.empty()) return -1;
    const unsigned mask = terms_.begin()->first.parity_mask();
    for (const auto& [m, c] : terms_)
      if (m.parity_mask() != mask) return -1;
    return static_cast<int>(mask);
  }

  double evaluate(std::span<const double> x) const {
    double sum = 0.0;
    for (const auto& [m, c] : terms_) {
      double t = c.get_d();
      for (int i = 0; i < dim_; ++i)
        for (int k = 0; k < m[i]; ++k) t *= x[static_cast<std::size_t>(i)];
      sum += t;
    }
    return sum;
  }

  MultiPoly& operator+=(const MultiPoly& o) {
    check_dim(o);
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  MultiPoly& operator-=(const MultiPoly& o) {
    check_dim(o);
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  MultiPoly& operator*=(const Rational& s) {
    if (s == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }

  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
  friend MultiPoly operator-(MultiPoly a) { return a *= Rational(-1); }
  friend MultiPoly operator*(MultiPoly a, const Rational& s) { return a *= s; }
  friend MultiPoly operator*(const Rational& s, MultiPoly a) { return a *= s; }

  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    a.check_dim(b);
    MultiPoly out(a.dim_);
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) out.add_term(ma + mb, ca * cb);
    return out;
  }

  friend bool operator==(const MultiPoly& a, const MultiPoly& b) {
    return a.dim_ == b.dim_ && a.terms_ == b.terms_;
  }

  /// Partial derivative with respect to x_{i+1}.
  MultiPoly derivative(int i) const {
    MultiPoly out(dim_);
    for (const auto& [m, c] : terms_) {
      const int a = m[i];
      if (a == 0) continue;
      MultiIndex r(m);
      r.set(i, a - 1);
      out.add_term(r, c * a);
    }
    return out;
  }

 private:
  void check_dim(const MultiPoly& o) const {
    if (o.dim_ != dim_) throw std::invalid_argument("MultiPoly: dimension mismatch");
  }

  int dim_ = 2;
  Terms terms_;
};

inline MultiPoly laplacian(const MultiPoly& p) {
  MultiPoly out(p.dim());
  for (const auto& [m, c] : p.terms()) {
    for (int i = 0; i < p.dim(); ++i) {
      const int a = m[i];
      if (a < 2) continue;
      MultiIndex r(m);
      r.set(i, a - 2);
      out.add_term(r, c * (a * (a - 1)));
    }
  }
  return out;
}

/// Euler operator sum_i x_i d/dx_i: scales each degree-d term by d.
inline MultiPoly euler(const MultiPoly& p) {
  MultiPoly out(p.dim());
  for (const auto& [m, c] : p.terms()) out.add_term(m, c * m.degree());
  return out;
}

/// |x|^2 * p without going through the general product.
inline MultiPoly multiply_norm_sq(const MultiPoly& p) {
  MultiPoly out(p.dim());
  for (const auto& [m, c] : p.terms()) {
    for (int i = 0; i < p.dim(); ++i) {
      MultiIndex r(m);
      r.set(i, m[i] + 2);
      out.add_term(r, c);
    }
  }
  return out;
}

inline MultiPoly grad_dot(const MultiPoly& p, const MultiPoly& q) {
  if (p.dim() != q.dim()) throw std::invalid_argument("grad_dot: dimension mismatch");
  MultiPoly out(p.dim());
  for (int i = 0; i < p.dim(); ++i) out += p.derivative(i) * q.derivative(i);
  return out;
}

/// Squared Frobenius norm of the Hessian, sum_{i,j} (d_i d_j p)^2.
inline MultiPoly hessian_norm_sq(const MultiPoly& p) {
  MultiPoly out(p.dim());
  for (int i = 0; i < p.dim(); ++i) {
    const MultiPoly di = p.derivative(i);
    for (int j = 0; j < p.dim(); ++j) {
      const MultiPoly dij = di.derivative(j);
      out += dij * dij;
    }
  }
  return out;
}

/// Replaces x by scale * x: the coefficient of x^a is multiplied by scale^|a|.
inline MultiPoly rescale(const MultiPoly& p, const Rational& scale) {
  MultiPoly out(p.dim());
  std::vector<Rational> pow{Rational(1)};
  for (const auto& [m, c] : p.terms()) {
    while (static_cast<int>(pow.size()) <= m.degree()) pow.push_back(pow.back() * scale);
    out.add_term(m, c * pow[static_cast<std::size_t>(m.degree())]);
  }
  return out;
}

namespace detail {

// Solves c*s + |x|^2 * Lap(s) = f for homogeneous s of the same degree as f.
// Applying the Laplacian gives an equation of the same shape for Lap(s) with
// a larger positive constant, so the recursion terminates at degree < 2.
inline MultiPoly solve_shifted_norm_sq(const Rational& c, const MultiPoly& f) {
  if (c == 0) throw std::logic_error("sphere reduction: singular shifted system");
  if (f.is_zero()) return f;
  const int m = f.degree();
  if (m < 2) return f * (1 / c);
  const MultiPoly g = solve_shifted_norm_sq(c + 2 * f.dim() + 4 * m - 8, laplacian(f));
  MultiPoly s = f - multiply_norm_sq(g);
  s *= 1 / c;
  return s;
}

}  // namespace detail

/// Fischer decomposition of a homogeneous p of degree d:
/// p = sum_j |x|^{2j} h_{d-2j} with each h harmonic homogeneous.
/// Returns the list (h_d, h_{d-2}, ...), indexed by j.
inline std::vector<MultiPoly> fischer_decompose(const MultiPoly& p) {
  if (!p.is_homogeneous()) throw std::invalid_argument("fischer_decompose: polynomial is not homogeneous");
  std::vector<MultiPoly> parts;
  MultiPoly rest = p;
  int d = p.degree();
  while (d >= 0) {
    if (rest.is_zero()) {
      parts.emplace_back(p.dim());
    } else if (d < 2) {
      parts.push_back(rest);
      rest = MultiPoly(p.dim());
    } else {
      const Rational c = 2 * p.dim() + 4 * d - 8;
      MultiPoly s = detail::solve_shifted_norm_sq(c, laplacian(rest));
      parts.push_back(rest - multiply_norm_sq(s));
      rest = std::move(s);
    }
    d -= 2;
  }
  return parts;
}

/// Canonical representative modulo (|x|^2 - 1): components[j] is harmonic
/// homogeneous of degree j.
struct SphereReduced {
  int dim = 2;
  std::vector<MultiPoly> components;

  MultiPoly sum() const {
    MultiPoly out(dim);
    for (const auto& h : components) out += h;
    return out;
  }

  bool is_zero() const {
    for (const auto& h : components)
      if (!h.is_zero()) return false;
    return true;
  }

  friend bool operator==(const SphereReduced& a, const SphereReduced& b) { return a.sum() == b.sum(); }
};

/// Reduction modulo (|x|^2 - R^2). Components are harmonic homogeneous of
/// degree j and agree with p on the sphere of radius R.
inline SphereReduced sphere_reduce(const MultiPoly& p, const Rational& radius = 1) {
  const bool unit = radius == 1;
  const MultiPoly q = unit ? p : rescale(p, radius);
  SphereReduced out;
  out.dim = p.dim();
  const int deg = std::max(q.degree(), 0);
  out.components.assign(static_cast<std::size_t>(deg + 1), MultiPoly(p.dim()));
  for (int d = 0; d <= q.degree(); ++d) {
    const MultiPoly part = q.homogeneous_part(d);
    if (part.is_zero()) continue;
    auto pieces = fischer_decompose(part);
    for (std::size_t j = 0; j < pieces.size(); ++j)
      out.components[static_cast<std::size_t>(d) - 2 * j] += pieces[j];
  }
  if (!unit) {
    const Rational inv = 1 / radius;
    for (auto& h : out.components) h = rescale(h, inv);
  }
  while (!out.components.empty() && out.components.back().is_zero()) out.components.pop_back();
  return out;
}

/// Exact division by (|x|^2 - R^2). Returns the quotient; throws if the
/// remainder is nonzero.
inline MultiPoly divide_by_sphere(const MultiPoly& p, const Rational& radius = 1) {
  MultiPoly rest = p;
  MultiPoly quotient(p.dim());
  const Rational r2 = radius * radius;
  // Peel off the top-degree part: its |x|^2 factor must account for all of it.
  while (!rest.is_zero()) {
    const int d = rest.degree();
    const MultiPoly top = rest.homogeneous_part(d);
    if (d < 2) throw std::domain_error("divide_by_sphere: nonzero remainder");
    auto parts = fischer_decompose(top);
    if (!parts[0].is_zero()) throw std::domain_error("divide_by_sphere: nonzero remainder");
    // top = |x|^2 * s with s = sum_{j>=1} |x|^{2j-2} h_{d-2j}
    MultiPoly s(p.dim());
    MultiPoly pw = MultiPoly::constant(p.dim(), 1);
    for (std::size_t j = 1; j < parts.size(); ++j) {
      s += pw * parts[j];
      pw = multiply_norm_sq(pw);
    }
    quotient += s;
    rest -= multiply_norm_sq(s) - s * r2;
  }
  return quotient;
}

// ---------------------------------------------------------------------------
// Canonical text form: "c * x1^a1 x3^a3 + ..." in descending graded-lex
// order; zero exponents are omitted, the zero polynomial prints as "0".

inline std::string to_string(const MultiPoly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    if (!out.empty()) out += " + ";
    out += it->second.get_str();
    if (it->first.degree() == 0) continue;
    out += " *";
    for (int i = 0; i < p.dim(); ++i) {
      if (it->first[i] == 0) continue;
      out += " x" + std::to_string(i + 1) + "^" + std::to_string(it->first[i]);
    }
  }
  return out;
}

inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  const auto dot = s.find('.');
  const auto exp = s.find_first_of("eE");
  if (dot == std::string::npos && exp == std::string::npos) {
    Rational r(s, 10);
    r.canonicalize();
    return r;
  }
  // Decimal literal: convert exactly, e.g. "0.3" -> 3/10.
  std::string mantissa = exp == std::string::npos ? s : s.substr(0, exp);
  long exponent = exp == std::string::npos ? 0 : std::stol(s.substr(exp + 1));
  const auto d = mantissa.find('.');
  if (d != std::string::npos) {
    exponent -= static_cast<long>(mantissa.size() - d - 1);
    mantissa.erase(d, 1);
  }
  if (mantissa.empty() || mantissa == "-" || mantissa == "+") throw std::invalid_argument("parse_rational: bad number");
  if (mantissa[0] == '+') mantissa.erase(0, 1);
  Rational r(mpz_class(mantissa, 10));
  mpz_class ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  if (exponent < 0) r /= ten_pow;
  else r *= ten_pow;
  r.canonicalize();
  return r;
}

inline MultiPoly parse_poly(std::string_view text, int dim) {
  MultiPoly p(dim);
  std::string s(text);
  if (s == "0") return p;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    auto next = s.find(" + ", pos);
    const std::string term = s.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    MultiIndex m(dim);
    std::string coeff = term;
    const auto star = term.find(" *");
    if (star != std::string::npos) {
      coeff = term.substr(0, star);
      std::istringstream vars(term.substr(star + 2));
      std::string tok;
      while (vars >> tok) {
        const auto caret = tok.find('^');
        if (tok.size() < 2 || tok[0] != 'x' || caret == std::string::npos)
          throw std::invalid_argument("parse_poly: bad factor '" + tok + "'");
        const int var = std::stoi(tok.substr(1, caret - 1)) - 1;
        if (var < 0 || var >= dim) throw std::invalid_argument("parse_poly: variable out of range");
        m.set(var, m[var] + std::stoi(tok.substr(caret + 1)));
      }
    }
    p.add_term(m, parse_rational(coeff));
    if (next == std::string::npos) break;
    pos = next + 3;
  }
  return p;
}

}  // namespace bilap
