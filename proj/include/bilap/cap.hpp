#pragma once

// Chebyshev collocation for the separated radial problems on geodesic balls
// of the space forms (round sphere, Euclidean space, hyperbolic space):
//
//   L_l T = T'' + (n-1) ct(r) T' - l(l+n-2)/sn(r)^2 T,   0 < r <= Theta,
//
// with Dirichlet (-L T = lambda T), Navier bi-Laplace (L^2 T = Gamma T) and
// Navier buckling (L^2 T = -Lambda L T) boundary conditions at r = Theta.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace bilap::cap {

// Extended precision: fourth-order collocation loses roughly N^4 eps.
using Scalar = long double;
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

struct CapSpec {
  int n = 2;
  int curvature = 1;  // +1 sphere, 0 Euclidean, -1 hyperbolic
  double theta = std::numbers::pi / 2;
  int ell = 0;
  int nodes = 64;
};

inline void validate(const CapSpec& s) {
  if (s.n < 2) throw std::invalid_argument("CapSpec: dimension must be >= 2");
  if (s.curvature < -1 || s.curvature > 1) throw std::invalid_argument("CapSpec: curvature must be -1, 0 or +1");
  if (!(s.theta > 0)) throw std::invalid_argument("CapSpec: theta must be positive");
  if (s.curvature == 1 && !(s.theta < std::numbers::pi)) throw std::invalid_argument("CapSpec: theta must be < pi");
  if (s.ell < 0) throw std::invalid_argument("CapSpec: ell must be non-negative");
  if (s.nodes < 16) throw std::invalid_argument("CapSpec: at least 16 nodes required");
}

struct Grid {
  Vector r;    // r_0 = 0 (pole), r_N = theta
  Matrix d1, d2, d3;
};

/// Chebyshev-Gauss-Lobatto grid on [0, theta]. The pole node only carries
/// regularity rows, so the singular coefficients are never evaluated there.
inline Grid make_grid(double theta, int nodes) {
  const int n = nodes;
  Vector x(n + 1);
  for (int j = 0; j <= n; ++j) x(j) = std::cos(std::numbers::pi_v<Scalar> * j / n);
  Matrix d(n + 1, n + 1);
  auto c = [&](int i) -> Scalar { return ((i == 0 || i == n) ? 2.0L : 1.0L) * ((i % 2) ? -1.0L : 1.0L); };
  for (int i = 0; i <= n; ++i) {
    Scalar rowsum = 0;
    for (int j = 0; j <= n; ++j) {
      if (i == j) continue;
      d(i, j) = c(i) / c(j) / (x(i) - x(j));
      rowsum += d(i, j);
    }
    d(i, i) = -rowsum;
  }
  Grid g;
  const Scalar half = static_cast<Scalar>(theta) / 2;
  g.r = (half * (1.0L - x.array())).matrix();
  g.d1 = d * (-1 / half);
  g.d2 = g.d1 * g.d1;
  g.d3 = g.d2 * g.d1;
  return g;
}

inline Scalar sn(int curvature, Scalar r) {
  return curvature > 0 ? std::sin(r) : curvature < 0 ? std::sinh(r) : r;
}
inline Scalar ct(int curvature, Scalar r) {
  return curvature > 0 ? std::cos(r) / std::sin(r) : curvature < 0 ? std::cosh(r) / std::sinh(r) : 1 / r;
}

/// Collocation matrix of L_l on the grid (no boundary rows applied).
inline Matrix radial_operator(const CapSpec& s, const Grid& g) {
  const auto m = g.r.size();
  Matrix l = g.d2;
  const Scalar ang = static_cast<Scalar>(s.ell) * (s.ell + s.n - 2);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Scalar ri = g.r(i);
    if (ri == 0.0) {
      l.row(i).setZero();  // pole row; always replaced by a regularity condition
      continue;
    }
    l.row(i) += (s.n - 1) * ct(s.curvature, ri) * g.d1.row(i);
    const Scalar snr = sn(s.curvature, ri);
    l(i, i) -= ang / (snr * snr);
  }
  return l;
}

inline Matrix radial_operator(const CapSpec& s) {
  validate(s);
  return radial_operator(s, make_grid(s.theta, s.nodes));
}

struct ModeSpectrum {
  std::vector<double> eigenvalues;  // ascending, real positive, filtered
  int spurious = 0;
};

namespace detail {

// Solves A x = lambda B x after eliminating the unknowns `bidx` with the
// boundary rows `bc` (row replacement followed by static condensation).
inline ModeSpectrum condensed_eigs(const Matrix& a, const Matrix* b, const Matrix& bc,
                                   const std::vector<Eigen::Index>& bidx) {
  const Eigen::Index m = a.rows();
  std::vector<Eigen::Index> iidx;
  for (Eigen::Index i = 0; i < m; ++i)
    if (std::find(bidx.begin(), bidx.end(), i) == bidx.end()) iidx.push_back(i);
  const auto nb = static_cast<Eigen::Index>(bidx.size());
  const auto ni = static_cast<Eigen::Index>(iidx.size());

  Matrix bbb(nb, nb), bbi(nb, ni);
  for (Eigen::Index r = 0; r < nb; ++r) {
    for (Eigen::Index c = 0; c < nb; ++c) bbb(r, c) = bc(r, bidx[c]);
    for (Eigen::Index c = 0; c < ni; ++c) bbi(r, c) = bc(r, iidx[c]);
  }
  const Matrix elim = -bbb.fullPivLu().solve(bbi);  // x_b = elim * x_i

  auto condense = [&](const Matrix& op) {
    Matrix oii(ni, ni), oib(ni, nb);
    for (Eigen::Index r = 0; r < ni; ++r) {
      for (Eigen::Index c = 0; c < ni; ++c) oii(r, c) = op(iidx[r], iidx[c]);
      for (Eigen::Index c = 0; c < nb; ++c) oib(r, c) = op(iidx[r], bidx[c]);
    }
    return Matrix(oii + oib * elim);
  };
  Matrix k = condense(a);
  if (b != nullptr) k = condense(*b).partialPivLu().solve(k);

  Eigen::EigenSolver<Matrix> es(k, false);
  if (es.info() != Eigen::Success) throw std::runtime_error("cap: eigensolver failed");
  ModeSpectrum out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const auto z = es.eigenvalues()(i);
    if (std::fabs(z.imag()) > 1e-8 * std::fabs(z.real()) || std::fabs(z.real()) > 1e6 || z.real() <= 0) {
      ++out.spurious;
      continue;
    }
    out.eigenvalues.push_back(static_cast<double>(z.real()));
  }
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
  return out;
}

// Regularity rows at the pole for a smooth function r^l * (even in r).
inline void pole_rows(const Grid& g, int ell, bool fourth_order, Matrix& bc, Eigen::Index& row) {
  const Eigen::Index m = g.r.size();
  auto unit = [&](Eigen::Index j) {
    Vector e = Vector::Zero(m);
    e(j) = 1.0;
    return e;
  };
  if (ell == 0) {
    bc.row(row++) = g.d1.row(0);
    if (fourth_order) bc.row(row++) = g.d3.row(0);
  } else {
    bc.row(row++) = unit(0).transpose();
    if (fourth_order) bc.row(row++) = (ell == 1 ? g.d2.row(0) : g.d1.row(0));
  }
}

// L with its pole row replaced by the regular extrapolation of the other
// rows, so composing L twice never touches the singular coefficients at r=0.
inline Matrix regularized_operator(const CapSpec& s, const Grid& g, const Matrix& l) {
  Matrix p = l;
  const Eigen::Index m = l.rows();
  if (s.ell == 0) {
    // V'(0) = 0  =>  V_0 = -sum_{j>0} D_0j V_j / D_00
    p.row(0).setZero();
    for (Eigen::Index j = 1; j < m; ++j) p.row(0) -= g.d1(0, j) / g.d1(0, 0) * l.row(j);
  } else {
    p.row(0).setZero();  // V(0) = 0
  }
  return p;
}

}  // namespace detail

/// -L T = lambda T, T(theta) = 0.
inline ModeSpectrum dirichlet_mode(const CapSpec& s) {
  validate(s);
  const Grid g = make_grid(s.theta, s.nodes);
  const Matrix l = radial_operator(s, g);
  const Eigen::Index m = l.rows();
  Matrix bc = Matrix::Zero(2, m);
  Eigen::Index row = 0;
  detail::pole_rows(g, s.ell, false, bc, row);
  bc(row, m - 1) = 1.0;
  return detail::condensed_eigs(-l, nullptr, bc, {0, m - 1});
}

namespace detail {

inline ModeSpectrum navier_mode(const CapSpec& s, bool buckling) {
  validate(s);
  const Grid g = make_grid(s.theta, s.nodes);
  const Matrix l = radial_operator(s, g);
  const Matrix l2 = l * regularized_operator(s, g, l);
  const Eigen::Index m = l.rows();
  Matrix bc = Matrix::Zero(4, m);
  Eigen::Index row = 0;
  pole_rows(g, s.ell, true, bc, row);
  bc(row++, m - 1) = 1.0;                // T(theta) = 0
  bc.row(row++) = g.d2.row(m - 1);       // T''(theta) = 0
  const std::vector<Eigen::Index> bidx{0, 1, m - 2, m - 1};
  if (!buckling) return condensed_eigs(l2, nullptr, bc, bidx);
  const Matrix neg_l = -l;
  return condensed_eigs(l2, &neg_l, bc, bidx);
}

}  // namespace detail

/// L^2 T = Gamma T with T(theta) = T''(theta) = 0.
inline ModeSpectrum navier_mode(const CapSpec& s) { return detail::navier_mode(s, false); }

/// L^2 T = -Lambda L T with T(theta) = T''(theta) = 0.
inline ModeSpectrum buckling_navier_mode(const CapSpec& s) { return detail::navier_mode(s, true); }

struct ModeTable {
  int ell = 0;
  std::vector<double> lambda, gamma, lambda_big;
};

struct CapResult {
  CapSpec spec;  // ell field unused
  int ell_max = 3;
  std::vector<ModeTable> per_ell;
  double lambda1 = 0, gamma1 = 0, lambda_big1 = 0;
  int lambda1_ell = 0, gamma1_ell = 0, lambda_big1_ell = 0;
  double refinement_change = 0;  // max relative change under nodes -> nodes + 16
  bool converged = false;
  int spurious_filtered = 0;
};

class CapConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

struct Firsts {
  double lambda1 = std::numeric_limits<double>::infinity();
  double gamma1 = std::numeric_limits<double>::infinity();
  double lambda_big1 = std::numeric_limits<double>::infinity();
  int l1 = 0, g1 = 0, b1 = 0;
  std::vector<ModeTable> tables;
  int spurious = 0;
};

inline Firsts sweep(CapSpec s, int ell_max, std::size_t keep) {
  Firsts f;
  for (int ell = 0; ell <= ell_max; ++ell) {
    s.ell = ell;
    const auto d = dirichlet_mode(s);
    const auto g = navier_mode(s);
    const auto b = buckling_navier_mode(s);
    f.spurious += d.spurious + g.spurious + b.spurious;
    auto head = [&](const std::vector<double>& v) {
      return std::vector<double>(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(std::min(keep, v.size())));
    };
    f.tables.push_back({ell, head(d.eigenvalues), head(g.eigenvalues), head(b.eigenvalues)});
    if (!d.eigenvalues.empty() && d.eigenvalues[0] < f.lambda1) f.lambda1 = d.eigenvalues[0], f.l1 = ell;
    if (!g.eigenvalues.empty() && g.eigenvalues[0] < f.gamma1) f.gamma1 = g.eigenvalues[0], f.g1 = ell;
    if (!b.eigenvalues.empty() && b.eigenvalues[0] < f.lambda_big1) f.lambda_big1 = b.eigenvalues[0], f.b1 = ell;
  }
  return f;
}

}  // namespace detail

/// First eigenvalues minimized over 0 <= ell <= ell_max, with a refinement
/// check against nodes + 16.
inline CapResult solve_cap(const CapSpec& spec, int ell_max = 3, std::size_t keep = 4, double conv_tol = 1e-8) {
  validate(spec);
  if (ell_max < 0) throw std::invalid_argument("solve_cap: ell_max must be non-negative");
  const auto coarse = detail::sweep(spec, ell_max, keep);
  CapSpec fine_spec = spec;
  fine_spec.nodes += 16;
  const auto fine = detail::sweep(fine_spec, ell_max, keep);

  CapResult r;
  r.spec = spec;
  r.ell_max = ell_max;
  r.per_ell = coarse.tables;
  r.lambda1 = coarse.lambda1;
  r.gamma1 = coarse.gamma1;
  r.lambda_big1 = coarse.lambda_big1;
  r.lambda1_ell = coarse.l1;
  r.gamma1_ell = coarse.g1;
  r.lambda_big1_ell = coarse.b1;
  r.spurious_filtered = coarse.spurious;
  auto rel = [](double a, double b) { return std::fabs(a - b) / std::max(1.0, std::fabs(b)); };
  r.refinement_change = std::max({rel(coarse.lambda1, fine.lambda1), rel(coarse.gamma1, fine.gamma1),
                                  rel(coarse.lambda_big1, fine.lambda_big1)});
  r.converged = std::isfinite(r.refinement_change) && r.refinement_change <= conv_tol;
  return r;
}

inline nlohmann::ordered_json to_json(const CapResult& r) {
  nlohmann::ordered_json j;
  j["spec"] = {{"n", r.spec.n},
               {"curvature", r.spec.curvature},
               {"theta", r.spec.theta},
               {"nodes", r.spec.nodes},
               {"ell_max", r.ell_max}};
  auto per = nlohmann::ordered_json::array();
  for (const auto& t : r.per_ell) {
    per.push_back({{"ell", t.ell}, {"lambda", t.lambda}, {"gamma", t.gamma}, {"lambda_big", t.lambda_big}});
  }
  j["per_ell"] = per;
  j["lambda1"] = r.lambda1;
  j["gamma1"] = r.gamma1;
  j["lambda_big1"] = r.lambda_big1;
  j["argmin_ell"] = {{"lambda1", r.lambda1_ell}, {"gamma1", r.gamma1_ell}, {"lambda_big1", r.lambda_big1_ell}};
  j["spurious_filtered"] = r.spurious_filtered;
  j["refinement_change"] = r.refinement_change;
  j["converged"] = r.converged;
  return j;
}

}  // namespace bilap::cap
