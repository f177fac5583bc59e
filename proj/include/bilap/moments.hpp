#pragma once

// Exact integrals of polynomials over balls B_R and spheres S_R in R^n, and
// assembly of the bilinear forms used by the Rayleigh-Ritz solver.
//
// Every monomial moment in dimension n is a rational multiple of
// pi^floor(n/2), so values are carried as (rational, pi power) pairs and
// only turned into floating point at the very end.

#include "bilap/polyalg.hpp"

#include <cmath>
#include <numbers>
#include <unordered_map>

namespace bilap {

/// coeff * pi^pi_power.
struct PiMultiple {
  Rational coeff = 0;
  int pi_power = 0;

  double value() const { return coeff.get_d() * std::pow(std::numbers::pi, pi_power); }

  PiMultiple& operator+=(const PiMultiple& o) {
    if (o.coeff == 0) return *this;
    if (coeff == 0) {
      *this = o;
      return *this;
    }
    if (o.pi_power != pi_power) throw std::logic_error("PiMultiple: mismatched pi powers");
    coeff += o.coeff;
    return *this;
  }
  friend PiMultiple operator+(PiMultiple a, const PiMultiple& b) { return a += b; }
  friend PiMultiple operator-(PiMultiple a, PiMultiple b) {
    b.coeff = -b.coeff;
    return a += b;
  }
  friend PiMultiple operator*(const Rational& s, PiMultiple a) {
    a.coeff *= s;
    return a;
  }
  friend bool operator==(const PiMultiple& a, const PiMultiple& b) {
    if (a.coeff == 0 || b.coeff == 0) return a.coeff == b.coeff;
    return a.coeff == b.coeff && a.pi_power == b.pi_power;
  }
};

inline int pi_power_for_dim(int n) { return n / 2; }

namespace detail {

// Gamma(m/2) / sqrt(pi)^(m odd) for a positive integer m, as a rational.
inline Rational gamma_half_rational(int m) {
  Rational g = 1;
  if (m % 2 == 0) {
    for (int k = 2; k < m / 2; ++k) g *= k;  // (m/2 - 1)!
    return g;
  }
  // Gamma(j + 1/2) = (2j-1)!! / 2^j * sqrt(pi), with m = 2j + 1
  const int j = (m - 1) / 2;
  for (int k = 1; k <= j; ++k) g *= Rational(2 * k - 1, 2);
  return g;
}

}  // namespace detail

/// Integral of x^alpha over the unit sphere S^{n-1}.
inline PiMultiple sphere_moment(const MultiIndex& alpha) {
  const int n = alpha.dim();
  PiMultiple out{Rational(0), pi_power_for_dim(n)};
  for (int i = 0; i < n; ++i)
    if (alpha[i] % 2 != 0) return out;

  thread_local std::unordered_map<MultiIndex, Rational, MultiIndexHash> cache;
  if (auto it = cache.find(alpha); it != cache.end()) {
    out.coeff = it->second;
    return out;
  }
  // 2 prod Gamma((a_i+1)/2) / Gamma((|a|+n)/2); each Gamma of a half-integer
  // carries one sqrt(pi), the denominator carries one iff n is odd.
  Rational c = 2;
  for (int i = 0; i < n; ++i) c *= detail::gamma_half_rational(alpha[i] + 1);
  c /= detail::gamma_half_rational(alpha.degree() + n);
  cache.emplace(alpha, c);
  out.coeff = c;
  return out;
}

inline Rational rational_pow(const Rational& base, int e) {
  Rational r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

/// Integral of x^alpha over the ball of radius R.
inline PiMultiple ball_moment(const MultiIndex& alpha, const Rational& radius = 1) {
  if (radius <= 0) throw std::invalid_argument("ball_moment: radius must be positive");
  PiMultiple s = sphere_moment(alpha);
  const int k = alpha.dim() + alpha.degree();
  s.coeff *= rational_pow(radius, k) / k;
  return s;
}

namespace detail {

// sum_{a in p, b in q} p_a q_b * weight(|a+b|) * sphere_moment(a+b), where
// the radial weight depends only on the total degree.
template <class Weight>
PiMultiple paired_moment(const MultiPoly& p, const MultiPoly& q, Weight&& weight) {
  Rational acc = 0;
  Rational term;
  for (const auto& [ma, ca] : p.terms()) {
    for (const auto& [mb, cb] : q.terms()) {
      const MultiIndex sum = ma + mb;
      const PiMultiple m = sphere_moment(sum);
      if (m.coeff == 0) continue;
      term = ca * cb;
      term *= m.coeff;
      term *= weight(sum.degree());
      acc += term;
    }
  }
  return {acc, pi_power_for_dim(p.dim())};
}

class RadialWeights {
 public:
  RadialWeights(int dim, const Rational& radius, bool ball) : dim_(dim), radius_(radius), ball_(ball) {}

  const Rational& operator()(int degree) {
    while (static_cast<int>(cache_.size()) <= degree) {
      const int d = static_cast<int>(cache_.size());
      // ball: R^{n+d}/(n+d); sphere: R^{n-1+d}
      Rational w = ball_ ? rational_pow(radius_, dim_ + d) / (dim_ + d) : rational_pow(radius_, dim_ - 1 + d);
      cache_.push_back(std::move(w));
    }
    return cache_[static_cast<std::size_t>(degree)];
  }

 private:
  int dim_;
  Rational radius_;
  bool ball_;
  std::vector<Rational> cache_;
};

}  // namespace detail

/// Integral of p*q over B_R.
inline PiMultiple ball_inner(const MultiPoly& p, const MultiPoly& q, const Rational& radius = 1) {
  detail::RadialWeights w(p.dim(), radius, true);
  return detail::paired_moment(p, q, w);
}

/// Integral of p*q over S_R (surface measure).
inline PiMultiple sphere_inner(const MultiPoly& p, const MultiPoly& q, const Rational& radius = 1) {
  detail::RadialWeights w(p.dim(), radius, false);
  return detail::paired_moment(p, q, w);
}

inline PiMultiple ball_integral(const MultiPoly& p, const Rational& radius = 1) {
  return ball_inner(p, MultiPoly::constant(p.dim(), 1), radius);
}

inline PiMultiple sphere_integral(const MultiPoly& p, const Rational& radius = 1) {
  return sphere_inner(p, MultiPoly::constant(p.dim(), 1), radius);
}

// ---------------------------------------------------------------------------
// Bilinear forms

enum class FormTag { VolMass, VolDirichlet, VolBilap, BdryMass, BdryNormal, BdryTangent };

inline const char* to_string(FormTag t) {
  switch (t) {
    case FormTag::VolMass: return "VOL_MASS";
    case FormTag::VolDirichlet: return "VOL_DIRICHLET";
    case FormTag::VolBilap: return "VOL_BILAP";
    case FormTag::BdryMass: return "BDRY_MASS";
    case FormTag::BdryNormal: return "BDRY_NORMAL";
    case FormTag::BdryTangent: return "BDRY_TANGENT";
  }
  return "?";
}

struct FormKind {
  FormTag tag = FormTag::VolMass;
  Rational radius = 1;
};

/// Dense symmetric matrix of exact values, all sharing one pi power.
struct ExactForm {
  std::size_t size = 0;
  int pi_power = 0;
  std::vector<Rational> entries;  // row-major

  ExactForm() = default;
  ExactForm(std::size_t n, int pi) : size(n), pi_power(pi), entries(n * n) {}

  Rational& operator()(std::size_t i, std::size_t j) { return entries[i * size + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return entries[i * size + j]; }

  double value(std::size_t i, std::size_t j) const {
    return (*this)(i, j).get_d() * std::pow(std::numbers::pi, pi_power);
  }

  bool is_symmetric() const {
    for (std::size_t i = 0; i < size; ++i)
      for (std::size_t j = i + 1; j < size; ++j)
        if ((*this)(i, j) != (*this)(j, i)) return false;
    return true;
  }
};

namespace detail {

// One integrand contribution: sign * integral of (T u)(T v) over the ball or
// the sphere, for each transformed factor list T.
struct FormPieces {
  bool boundary = false;
  std::vector<std::vector<MultiPoly>> factors;  // factors[f][basis index]
  std::vector<int> signs;
};

inline FormPieces form_pieces(const FormKind& kind, std::span<const MultiPoly> basis) {
  FormPieces fp;
  const std::size_t m = basis.size();
  auto push = [&](auto&& make, int sign) {
    std::vector<MultiPoly> f;
    f.reserve(m);
    for (const auto& b : basis) f.push_back(make(b));
    fp.factors.push_back(std::move(f));
    fp.signs.push_back(sign);
  };
  const int n = basis.empty() ? 2 : basis.front().dim();
  const Rational inv_r = 1 / kind.radius;
  switch (kind.tag) {
    case FormTag::VolMass:
      push([](const MultiPoly& b) { return b; }, 1);
      break;
    case FormTag::VolDirichlet:
      for (int i = 0; i < n; ++i) push([i](const MultiPoly& b) { return b.derivative(i); }, 1);
      break;
    case FormTag::VolBilap:
      push([](const MultiPoly& b) { return laplacian(b); }, 1);
      break;
    case FormTag::BdryMass:
      fp.boundary = true;
      push([](const MultiPoly& b) { return b; }, 1);
      break;
    case FormTag::BdryNormal:
      fp.boundary = true;
      push([&](const MultiPoly& b) { return euler(b) * inv_r; }, 1);
      break;
    case FormTag::BdryTangent:
      // <grad u, grad v> - (d_nu u)(d_nu v) restricted to S_R
      fp.boundary = true;
      for (int i = 0; i < n; ++i) push([i](const MultiPoly& b) { return b.derivative(i); }, 1);
      push([&](const MultiPoly& b) { return euler(b) * inv_r; }, -1);
      break;
  }
  return fp;
}

}  // namespace detail

/// Exact Gram matrix of the form `kind` over `basis`.
///
/// Pairs whose parity classes differ vanish by odd symmetry and are skipped.
/// If `orthogonality_class` is non-empty, pairs with different labels are
/// also set to zero without evaluation; callers use this for labels that are
/// known to be orthogonal under every rotation-invariant form (harmonic
/// degree).
inline ExactForm assemble(const FormKind& kind, std::span<const MultiPoly> basis,
                          std::span<const int> orthogonality_class = {}) {
  if (kind.radius <= 0) throw std::invalid_argument("assemble: radius must be positive");
  const std::size_t m = basis.size();
  const int n = m == 0 ? 2 : basis.front().dim();
  for (const auto& b : basis)
    if (b.dim() != n) throw std::invalid_argument("assemble: dimension mismatch in basis");
  if (!orthogonality_class.empty() && orthogonality_class.size() != m)
    throw std::invalid_argument("assemble: orthogonality labels do not match basis size");

  ExactForm out(m, pi_power_for_dim(n));
  const auto pieces = detail::form_pieces(kind, basis);
  std::vector<int> parity(m);
  for (std::size_t i = 0; i < m; ++i) parity[i] = basis[i].parity_class();
  detail::RadialWeights weights(n, kind.radius, !pieces.boundary);

  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      if (!orthogonality_class.empty() && orthogonality_class[i] != orthogonality_class[j]) continue;
      if (parity[i] >= 0 && parity[j] >= 0 && parity[i] != parity[j]) continue;
      Rational acc = 0;
      for (std::size_t f = 0; f < pieces.factors.size(); ++f) {
        const PiMultiple v = detail::paired_moment(pieces.factors[f][i], pieces.factors[f][j], weights);
        if (pieces.signs[f] > 0) acc += v.coeff;
        else acc -= v.coeff;
      }
      out(i, j) = acc;
      if (i != j) out(j, i) = acc;
    }
  }
  return out;
}

inline PiMultiple form_value(const FormKind& kind, const MultiPoly& u, const MultiPoly& v) {
  const MultiPoly pair[2] = {u, v};
  const ExactForm f = assemble(kind, std::span<const MultiPoly>(pair, 2));
  return {f(0, 1), f.pi_power};
}

// ---------------------------------------------------------------------------
// Reilly's integral identity on the flat ball B_R (Ric = 0, H = 1/R,
// II = (1/R) * identity on tangent vectors).

struct ReillyTerms {
  PiMultiple lhs;  // int_B (Lap f)^2 - |Hess f|^2
  PiMultiple rhs;  // boundary side
};

inline ReillyTerms reilly_terms(const MultiPoly& f, const Rational& radius = 1) {
  const int n = f.dim();
  const Rational inv_r = 1 / radius;
  const MultiPoly one = MultiPoly::constant(n, 1);
  const MultiPoly lap = laplacian(f);

  ReillyTerms t;
  t.lhs = ball_inner(lap, lap, radius);
  for (int i = 0; i < n; ++i) {
    const MultiPoly di = f.derivative(i);
    for (int j = 0; j < n; ++j) {
      const MultiPoly dij = di.derivative(j);
      t.lhs = t.lhs - ball_inner(dij, dij, radius);
    }
  }

  // h = d_nu f, Hess f(nu, nu) = (E^2 f - E f)/R^2, on S_R.
  const MultiPoly ef = euler(f);
  const MultiPoly h = ef * inv_r;
  const MultiPoly hess_nn = (euler(ef) - ef) * (inv_r * inv_r);
  const Rational mean_curv = inv_r;
  // Tangential Laplacian of z = f|_S: Lap f - Hess f(nu,nu) - (n-1) H d_nu f.
  const MultiPoly lap_bar = lap - hess_nn - h * (mean_curv * (n - 1));
  // |grad_bar z|^2 = |grad f|^2 - h^2.
  const MultiPoly integrand_a = h * (mean_curv * (n - 1)) + lap_bar * Rational(2);
  t.rhs = sphere_inner(integrand_a, h, radius);
  PiMultiple tangential = sphere_inner(grad_dot(f, f), one, radius) - sphere_inner(h, h, radius);
  t.rhs = t.rhs + mean_curv * tangential;
  return t;
}

/// LHS - RHS of Reilly's identity; vanishes exactly for every polynomial f.
inline double reilly_residual(const MultiPoly& f, const Rational& radius = 1) {
  const auto t = reilly_terms(f, radius);
  return (t.lhs - t.rhs).value();
}

}  // namespace bilap
