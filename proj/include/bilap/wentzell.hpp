#pragma once

// Closed-form spectrum of the Wentzell bi-Laplace problem on the unit ball
//
//   Lap^2 u = 0 in B,   d_nu u = 0,   d_nu(Lap u) + beta Lap_S u + sigma u = 0 on S,
//
// with exact residual certificates and the Almansi splitting u = g + |x|^2 h.

#include "bilap/harmonic.hpp"

#include <json.hpp>

namespace bilap {

/// k^2 (n + 2k) + beta k (k + n - 2).
inline Rational wentzell_eigenvalue(int n, const Rational& beta, int k) {
  if (n < 2) throw std::invalid_argument("wentzell_eigenvalue: dimension must be >= 2");
  if (beta < 0) throw std::invalid_argument("wentzell_eigenvalue: beta must be non-negative");
  if (k < 0) throw std::invalid_argument("wentzell_eigenvalue: negative mode index");
  return Rational(k * k * (n + 2 * k)) + beta * (k * (k + n - 2));
}

struct WentzellEigenpair {
  int n = 2;
  Rational beta = 0;
  int k = 0;
  Rational value = 0;
  std::uint64_t multiplicity = 0;
  std::vector<MultiPoly> eigenfunctions;  // unnormalized
};

/// -2w + k(|x|^2 - 1)w for w in the degree-k harmonic basis.
inline MultiPoly wentzell_eigenfunction(const MultiPoly& w, int k) {
  const MultiPoly bump = multiply_norm_sq(w) - w;
  return w * Rational(-2) + bump * Rational(k);
}

inline WentzellEigenpair wentzell_eigenspace(int n, const Rational& beta, int k) {
  WentzellEigenpair e;
  e.n = n;
  e.beta = beta;
  e.k = k;
  e.value = wentzell_eigenvalue(n, beta, k);
  e.multiplicity = mu(n, k);
  for (const auto& w : basis(n, k).elements) e.eigenfunctions.push_back(wentzell_eigenfunction(w, k));
  return e;
}

struct Certificate {
  int n = 2;
  Rational beta = 0;
  Rational sigma = 0;
  MultiPoly u;
  MultiPoly pde_residual;            // Lap^2 u
  SphereReduced neumann_residual;    // E u on S
  SphereReduced wentzell_residual;   // d_nu Lap u + beta Lap_S u + sigma u on S

  bool valid() const {
    return pde_residual.is_zero() && neumann_residual.is_zero() && wentzell_residual.is_zero();
  }
};

/// Tangential Laplacian of u on the unit sphere, as an ambient polynomial:
/// Lap u - Hess u(nu,nu) - (n-1) d_nu u with Hess u(nu,nu) = E^2 u - E u.
inline MultiPoly sphere_laplacian_ambient(const MultiPoly& u) {
  const MultiPoly eu = euler(u);
  return laplacian(u) - euler(eu) - eu * Rational(u.dim() - 2);
}

inline Certificate certificate(const MultiPoly& u, const Rational& beta, const Rational& sigma) {
  Certificate c;
  c.n = u.dim();
  c.beta = beta;
  c.sigma = sigma;
  c.u = u;
  const MultiPoly lap = laplacian(u);
  c.pde_residual = laplacian(lap);
  c.neumann_residual = sphere_reduce(euler(u));
  const MultiPoly boundary = euler(lap) + sphere_laplacian_ambient(u) * beta + u * sigma;
  c.wentzell_residual = sphere_reduce(boundary);
  return c;
}

struct AlmansiPair {
  MultiPoly g;
  MultiPoly h;
};

/// u = g + |x|^2 h with g, h harmonic; throws if u is not biharmonic.
inline AlmansiPair almansi(const MultiPoly& u) {
  if (!laplacian(laplacian(u)).is_zero()) throw std::invalid_argument("almansi: input is not biharmonic");
  AlmansiPair out{MultiPoly(u.dim()), MultiPoly(u.dim())};
  for (int d = 0; d <= u.degree(); ++d) {
    const MultiPoly part = u.homogeneous_part(d);
    if (part.is_zero()) continue;
    const auto pieces = fischer_decompose(part);
    for (std::size_t j = 2; j < pieces.size(); ++j)
      if (!pieces[j].is_zero()) throw std::logic_error("almansi: biharmonic input with |x|^4 component");
    out.g += pieces[0];
    if (pieces.size() > 1) out.h += pieces[1];
  }
  return out;
}

inline nlohmann::ordered_json to_json(const Certificate& c, int k) {
  nlohmann::ordered_json j;
  j["n"] = c.n;
  j["beta"] = c.beta.get_str();
  j["k"] = k;
  j["sigma"] = c.sigma.get_str();
  j["u"] = to_string(c.u);
  j["pde_residual"] = to_string(c.pde_residual);
  j["neumann_residual"] = to_string(c.neumann_residual.sum());
  j["wentzell_residual"] = to_string(c.wentzell_residual.sum());
  j["valid"] = c.valid();
  return j;
}

/// Re-derives validity from a serialized certificate without trusting the
/// stored residual fields.
inline bool recheck_certificate(const nlohmann::ordered_json& j) {
  const int n = j.at("n").get<int>();
  const MultiPoly u = parse_poly(j.at("u").get<std::string>(), n);
  const Rational beta = parse_rational(j.at("beta").get<std::string>());
  const Rational sigma = parse_rational(j.at("sigma").get<std::string>());
  return certificate(u, beta, sigma).valid();
}

}  // namespace bilap
