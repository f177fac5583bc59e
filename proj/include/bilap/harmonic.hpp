#pragma once

// Bases of D_k, the harmonic homogeneous polynomials of degree k in R^n.

#include "bilap/polyalg.hpp"

#include <cstdint>

namespace bilap {

inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

/// dim D_k = C(n+k-1, k) - C(n+k-3, k-2).
inline std::uint64_t mu(int n, int k) {
  if (n < 2) throw std::invalid_argument("mu: dimension must be >= 2");
  if (k < 0) return 0;
  return binomial(n + k - 1, k) - (k >= 2 ? binomial(n + k - 3, k - 2) : 0);
}

struct HarmonicBasis {
  int dim = 2;
  int degree = 0;
  std::vector<MultiPoly> elements;
};

/// Reduced-echelon kernel basis of the Laplacian on homogeneous degree-k
/// polynomials, with monomials ordered graded-lex (x1 leading).
///
/// Pivot columns are the monomials with x1-exponent >= 2; the free columns
/// (x1-exponent 0 or 1) are the seeds. Writing h = sum_j x1^j g_j(x2..xn),
/// Lap h = 0 is the recursion g_{j+2} = -Lap'(g_j) / ((j+1)(j+2)), so each
/// seed extends to a unique kernel vector with unit coefficient on its seed
/// and zeros on every other seed.
inline HarmonicBasis basis(int n, int k) {
  if (n < 2 || n > kMaxDim) throw std::invalid_argument("harmonic basis: dimension must lie in [2, 8]");
  if (k < 0) throw std::invalid_argument("harmonic basis: negative degree");
  if (k > kMaxDegree) throw std::length_error("harmonic basis: degree cap exceeded");

  HarmonicBasis out{n, k, {}};
  for (const MultiIndex& seed : monomials_of_degree(n, k)) {
    if (seed[0] > 1) continue;
    // Coefficients by x1-power, each a polynomial in the remaining variables
    // (stored with x1-exponent 0).
    std::vector<MultiPoly> g(static_cast<std::size_t>(k + 1), MultiPoly(n));
    MultiIndex rest(seed);
    rest.set(0, 0);
    g[static_cast<std::size_t>(seed[0])] = MultiPoly::monomial(rest);
    for (int j = seed[0]; j + 2 <= k; j += 2) {
      // Lap' excludes d^2/dx1^2; g_j has no x1 so the full Laplacian works.
      g[static_cast<std::size_t>(j + 2)] = laplacian(g[static_cast<std::size_t>(j)]) * Rational(-1, (j + 1) * (j + 2));
    }
    MultiPoly h(n);
    for (int j = 0; j <= k; ++j) {
      for (const auto& [m, c] : g[static_cast<std::size_t>(j)].terms()) {
        MultiIndex t(m);
        t.set(0, j);
        h.add_term(t, c);
      }
    }
    out.elements.push_back(std::move(h));
  }
  return out;
}

}  // namespace bilap
