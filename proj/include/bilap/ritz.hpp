#pragma once

// Rayleigh-Ritz solver for the first eigenvalues of the bi-Laplace and
// Laplace problems on the ball B_R in R^n.
//
// Trial functions are factor * |x|^{2j} h with h from the harmonic bases
// D_k (a Fischer basis: it spans exactly the polynomials of degree <= d, the
// same space as the monomials). Every form involved is rotation invariant,
// so different k never couple; the assembled exact forms split into small
// blocks that are solved independently.

#include "bilap/harmonic.hpp"
#include "bilap/linalg.hpp"
#include "bilap/moments.hpp"

#include <json.hpp>

#include <map>
#include <optional>

namespace bilap {

enum class ProblemKind {
  PSteklov,      // Lap^2 u = 0, u = Lap u - p d_nu u = 0
  QSteklov,      // Lap^2 u = 0, u = d_nu^2 u - q d_nu u = 0
  XiSteklov,     // Lap^2 u = 0, d_nu u = d_nu Lap u + xi u = 0
  Wentzell,      // ... + beta Lap_S u
  GammaNavier,   // Lap^2 u = Gamma u, u = d_nu^2 u = 0
  LambdaNavier,  // Lap^2 u = -Lambda Lap u, u = d_nu^2 u = 0
  Clamped,       // Lap^2 u = Gamma u, u = d_nu u = 0
  Buckling,      // Lap^2 u = -Lambda Lap u, u = d_nu u = 0
  LapDirichlet,
  LapNeumann,
};

inline constexpr std::array<ProblemKind, 10> kAllProblems = {
    ProblemKind::PSteklov,     ProblemKind::QSteklov, ProblemKind::XiSteklov, ProblemKind::Wentzell,
    ProblemKind::GammaNavier,  ProblemKind::LambdaNavier, ProblemKind::Clamped, ProblemKind::Buckling,
    ProblemKind::LapDirichlet, ProblemKind::LapNeumann};

inline const char* to_string(ProblemKind k) {
  switch (k) {
    case ProblemKind::PSteklov: return "p";
    case ProblemKind::QSteklov: return "q";
    case ProblemKind::XiSteklov: return "xi";
    case ProblemKind::Wentzell: return "wentzell";
    case ProblemKind::GammaNavier: return "gamma";
    case ProblemKind::LambdaNavier: return "lambda";
    case ProblemKind::Clamped: return "clamped";
    case ProblemKind::Buckling: return "buckling";
    case ProblemKind::LapDirichlet: return "dirichlet";
    case ProblemKind::LapNeumann: return "neumann";
  }
  return "?";
}

inline std::optional<ProblemKind> problem_from_string(std::string_view s) {
  for (auto k : kAllProblems)
    if (s == to_string(k)) return k;
  return std::nullopt;
}

struct ProblemSpec {
  ProblemKind kind = ProblemKind::PSteklov;
  int n = 3;
  Rational radius = 1;
  int degree = 10;
  Rational beta = 0;
};

/// Polynomial degree of the built-in boundary factor.
inline int factor_degree(ProblemKind k) {
  switch (k) {
    case ProblemKind::Clamped:
    case ProblemKind::Buckling: return 4;
    case ProblemKind::XiSteklov:
    case ProblemKind::Wentzell:
    case ProblemKind::LapNeumann: return 0;
    default: return 2;
  }
}

/// Smallest trial degree admitting a nonconstant admissible function.
inline int minimal_degree(ProblemKind k) {
  switch (k) {
    case ProblemKind::XiSteklov:
    case ProblemKind::Wentzell: return 3;  // -2x_i + (|x|^2-1) x_i
    case ProblemKind::LapNeumann: return 1;
    default: return factor_degree(k);
  }
}

inline void validate(const ProblemSpec& s) {
  if (s.n < 2 || s.n > kMaxDim) throw std::invalid_argument("ProblemSpec: dimension must lie in [2, 8]");
  if (s.radius <= 0) throw std::invalid_argument("ProblemSpec: radius must be positive");
  if (s.beta < 0) throw std::invalid_argument("ProblemSpec: beta must be non-negative");
  if (s.degree > kMaxDegree) throw std::length_error("ProblemSpec: degree cap exceeded");
  if (s.degree < minimal_degree(s.kind))
    throw std::invalid_argument(std::string("ProblemSpec: degree too small for problem ") + to_string(s.kind) +
                                " (minimum " + std::to_string(minimal_degree(s.kind)) + ")");
}

struct SparseRow {
  std::vector<std::pair<std::size_t, Rational>> entries;
};

struct TrialSpace {
  std::vector<MultiPoly> basis;
  std::vector<int> harmonic_degree;  // k of the harmonic factor, per element
  std::vector<SparseRow> constraints;
};

inline TrialSpace trial_space(const ProblemSpec& spec) {
  validate(spec);
  const int n = spec.n;
  const Rational r2 = spec.radius * spec.radius;
  const MultiPoly wall = MultiPoly::norm_sq(n) - MultiPoly::constant(n, r2);
  MultiPoly factor = MultiPoly::constant(n, 1);
  for (int i = 0; i < factor_degree(spec.kind) / 2; ++i) factor = factor * wall;
  const int inner = spec.degree - factor_degree(spec.kind);

  TrialSpace ts;
  for (int k = 0; k <= inner; ++k) {
    const auto hb = basis(n, k);
    for (int j = 0; 2 * j + k <= inner; ++j) {
      for (const auto& h : hb.elements) {
        MultiPoly radial = h;
        for (int t = 0; t < j; ++t) radial = multiply_norm_sq(radial);
        ts.basis.push_back(factor * radial);
        ts.harmonic_degree.push_back(k);
      }
    }
  }

  const auto add_functional_row = [&](auto&& functional) {
    SparseRow row;
    for (std::size_t i = 0; i < ts.basis.size(); ++i) {
      Rational v = functional(ts.basis[i]).coeff;
      if (v != 0) row.entries.emplace_back(i, std::move(v));
    }
    ts.constraints.push_back(std::move(row));
  };

  if (spec.kind == ProblemKind::XiSteklov || spec.kind == ProblemKind::Wentzell) {
    // d_nu u = 0 on S_R: every coefficient of the sphere-reduced E u vanishes.
    std::map<MultiIndex, SparseRow> rows;
    for (std::size_t i = 0; i < ts.basis.size(); ++i) {
      const SphereReduced red = sphere_reduce(euler(ts.basis[i]), spec.radius);
      for (const auto& comp : red.components)
        for (const auto& [m, c] : comp.terms()) rows[m].entries.emplace_back(i, c);
    }
    for (auto& [m, row] : rows) ts.constraints.push_back(std::move(row));
    add_functional_row([&](const MultiPoly& b) { return sphere_integral(b, spec.radius); });
  } else if (spec.kind == ProblemKind::LapNeumann) {
    add_functional_row([&](const MultiPoly& b) { return ball_integral(b, spec.radius); });
  }
  return ts;
}

struct QuadFormPair {
  ExactForm numerator;
  ExactForm denominator;
  ExactForm mass;  // VOL_MASS, used to condition the solve
  std::vector<SparseRow> constraints;
};

namespace detail {

inline ExactForm combine(const ExactForm& a, const Rational& s, const ExactForm& b) {
  ExactForm out = a;
  if (s == 0) return out;
  if (a.pi_power != b.pi_power) throw std::logic_error("combine: pi power mismatch");
  for (std::size_t i = 0; i < out.entries.size(); ++i)
    if (b.entries[i] != 0) out.entries[i] += s * b.entries[i];
  return out;
}

}  // namespace detail

inline QuadFormPair quotient_forms(const ProblemSpec& spec, const TrialSpace& ts) {
  const std::span<const MultiPoly> b(ts.basis);
  const std::span<const int> labels(ts.harmonic_degree);
  const Rational& r = spec.radius;
  auto form = [&](FormTag t) { return assemble(FormKind{t, r}, b, labels); };
  // Curvature-corrected numerator: int (Lap u)^2 - (n-1) H int_S (d_nu u)^2.
  auto navier_numerator = [&]() {
    return detail::combine(form(FormTag::VolBilap), Rational(-(spec.n - 1)) / r, form(FormTag::BdryNormal));
  };

  QuadFormPair q;
  switch (spec.kind) {
    case ProblemKind::PSteklov:
      q.numerator = form(FormTag::VolBilap);
      q.denominator = form(FormTag::BdryNormal);
      break;
    case ProblemKind::QSteklov:
      q.numerator = navier_numerator();
      q.denominator = form(FormTag::BdryNormal);
      break;
    case ProblemKind::XiSteklov:
      q.numerator = form(FormTag::VolBilap);
      q.denominator = form(FormTag::BdryMass);
      break;
    case ProblemKind::Wentzell:
      q.numerator = detail::combine(form(FormTag::VolBilap), spec.beta, form(FormTag::BdryTangent));
      q.denominator = form(FormTag::BdryMass);
      break;
    case ProblemKind::GammaNavier:
      q.numerator = navier_numerator();
      q.denominator = form(FormTag::VolMass);
      break;
    case ProblemKind::LambdaNavier:
      q.numerator = navier_numerator();
      q.denominator = form(FormTag::VolDirichlet);
      break;
    case ProblemKind::Clamped:
      q.numerator = form(FormTag::VolBilap);
      q.denominator = form(FormTag::VolMass);
      break;
    case ProblemKind::Buckling:
      q.numerator = form(FormTag::VolBilap);
      q.denominator = form(FormTag::VolDirichlet);
      break;
    case ProblemKind::LapDirichlet:
    case ProblemKind::LapNeumann:
      q.numerator = form(FormTag::VolDirichlet);
      q.denominator = form(FormTag::VolMass);
      break;
  }
  q.mass = (spec.kind == ProblemKind::GammaNavier || spec.kind == ProblemKind::Clamped ||
            spec.kind == ProblemKind::LapDirichlet || spec.kind == ProblemKind::LapNeumann)
               ? q.denominator
               : form(FormTag::VolMass);
  q.constraints = ts.constraints;
  return q;
}

struct SpectralResult {
  std::vector<double> eigenvalues;           // ascending
  std::vector<std::vector<double>> vectors;  // coefficients over the trial basis
  std::size_t basis_size = 0;
  int deflation_rank = 0;
  double constraint_residual = 0.0;
  double condition_diag = 1.0;
  std::size_t blocks = 0;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

inline ExactMatrix restrict_form(const ExactForm& f, const std::vector<std::size_t>& idx) {
  ExactMatrix m(idx.size(), idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = 0; b < idx.size(); ++b) m(a, b) = f(idx[a], idx[b]);
  return m;
}

struct BlockSolution {
  std::vector<Real> values;
  std::vector<RealVector> vectors;  // over the block's trial indices
  int deflated = 0;
  Real condition = 1;
};

constexpr Real kDeflationTol = 1e-12L;
constexpr Real kIndefiniteTol = 1e-10L;

// Constrained generalized eigenproblem A x = lambda B x on one block.
inline BlockSolution solve_block(const ExactMatrix& a, const ExactMatrix& b, const ExactMatrix& mass,
                                 const ExactMatrix& constraints) {
  BlockSolution out;
  const ExactMatrix nullsp = constraints.rows == 0 ? ExactMatrix::identity(a.rows) : null_space(constraints);
  if (nullsp.cols == 0) return out;
  const ExactMatrix nt = nullsp.transpose();
  const ExactMatrix a1 = nt * a * nullsp;
  const ExactMatrix b1 = nt * b * nullsp;
  const ExactMatrix m1 = nt * mass * nullsp;

  // Exact mass orthogonalization: m1 = L D L^T, forms pulled back by L^{-1}.
  const ExactLdlt f = ldlt(m1);
  const std::size_t r = m1.rows;
  RealVector scale(static_cast<Eigen::Index>(r));
  Real dmin = std::numeric_limits<Real>::max(), dmax = 0;
  for (std::size_t i = 0; i < r; ++i) {
    const Real d = to_real(f.diag[i]);
    scale(static_cast<Eigen::Index>(i)) = 1 / std::sqrt(d);
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
  }
  out.condition = dmax / dmin;
  const RealMatrix a3 = scale.asDiagonal() * congruence_inverse(f.lower, a1).to_real() * scale.asDiagonal();
  const RealMatrix b3 = scale.asDiagonal() * congruence_inverse(f.lower, b1).to_real() * scale.asDiagonal();

  const SymmetricEigen a_eig = jacobi_eigen(a3);
  const Real a_scale = std::max<Real>(1, a_eig.values.cwiseAbs().maxCoeff());
  if (a_eig.values(0) < -kIndefiniteTol * a_scale) throw SolverError("solve: indefinite numerator form");

  // Deflate the denominator's null space and condense it out of A.
  const SymmetricEigen b_eig = jacobi_eigen(b3);
  const Real bmax = b_eig.values.cwiseAbs().maxCoeff();
  std::vector<Eigen::Index> keep, drop;
  for (Eigen::Index i = 0; i < b_eig.values.size(); ++i)
    (b_eig.values(i) > kDeflationTol * bmax ? keep : drop).push_back(i);
  out.deflated = static_cast<int>(drop.size());
  if (keep.empty()) return out;

  const RealMatrix& q = b_eig.vectors;
  const RealMatrix ahat = q.transpose() * a3 * q;
  const auto nk = static_cast<Eigen::Index>(keep.size());
  const auto nd = static_cast<Eigen::Index>(drop.size());
  RealMatrix avv(nk, nk), avz(nk, nd), azz(nd, nd);
  for (Eigen::Index i = 0; i < nk; ++i) {
    for (Eigen::Index j = 0; j < nk; ++j) avv(i, j) = ahat(keep[i], keep[j]);
    for (Eigen::Index j = 0; j < nd; ++j) avz(i, j) = ahat(keep[i], drop[j]);
  }
  for (Eigen::Index i = 0; i < nd; ++i)
    for (Eigen::Index j = 0; j < nd; ++j) azz(i, j) = ahat(drop[i], drop[j]);

  RealMatrix elim(nd, nk);  // x_Z = -A_ZZ^{-1} A_ZV x_V
  RealMatrix aeff = avv;
  if (nd > 0) {
    Eigen::LLT<RealMatrix> llt(azz);
    if (llt.info() != Eigen::Success) throw SolverError("solve: numerator not definite on the deflated space");
    elim = -llt.solve(avz.transpose());
    aeff += avz * elim;
  }
  RealVector dinv(nk);
  for (Eigen::Index i = 0; i < nk; ++i) dinv(i) = 1 / std::sqrt(b_eig.values(keep[i]));
  RealMatrix reduced = dinv.asDiagonal() * aeff * dinv.asDiagonal();
  reduced = (reduced + reduced.transpose()) / 2;
  const SymmetricEigen eig = jacobi_eigen(reduced);

  // Back to block trial coordinates: c = N L^{-T} S Q [x_V; x_Z].
  RealMatrix lower_t = f.lower.transpose().to_real();
  const RealMatrix nreal = nullsp.to_real();
  for (Eigen::Index e = 0; e < eig.values.size(); ++e) {
    const RealVector xv = dinv.asDiagonal() * eig.vectors.col(e);
    RealVector x = RealVector::Zero(static_cast<Eigen::Index>(r));
    for (Eigen::Index i = 0; i < nk; ++i) x(keep[i]) = xv(i);
    if (nd > 0) {
      const RealVector xz = elim * xv;
      for (Eigen::Index i = 0; i < nd; ++i) x(drop[i]) = xz(i);
    }
    RealVector y = scale.asDiagonal() * (q * x);
    y = lower_t.triangularView<Eigen::UnitUpper>().solve(y);
    out.values.push_back(eig.values(e));
    out.vectors.push_back(nreal * y);
  }
  return out;
}

}  // namespace detail

/// Constrained generalized symmetric eigensolve of a quotient form pair.
inline SpectralResult solve_forms(const QuadFormPair& q) {
  const std::size_t m = q.numerator.size;
  if (q.numerator.pi_power != q.denominator.pi_power)
    throw std::logic_error("solve: numerator and denominator carry different pi powers");

  // Blocks: connected components of the joint sparsity pattern.
  detail::DisjointSets sets(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (q.numerator(i, j) != 0 || q.denominator(i, j) != 0 || q.mass(i, j) != 0) sets.unite(i, j);
  for (const auto& row : q.constraints)
    for (std::size_t t = 1; t < row.entries.size(); ++t) sets.unite(row.entries[0].first, row.entries[t].first);

  std::map<std::size_t, std::vector<std::size_t>> blocks;
  for (std::size_t i = 0; i < m; ++i) blocks[sets.find(i)].push_back(i);

  struct Pair {
    double value;
    std::vector<double> vec;
  };
  std::vector<Pair> pairs;
  SpectralResult res;
  res.basis_size = m;
  res.blocks = blocks.size();
  double cond = 1.0;
  for (const auto& [root, idx] : blocks) {
    std::map<std::size_t, std::size_t> local;
    for (std::size_t a = 0; a < idx.size(); ++a) local[idx[a]] = a;
    std::vector<const SparseRow*> rows;
    for (const auto& row : q.constraints)
      if (!row.entries.empty() && local.count(row.entries[0].first)) rows.push_back(&row);
    ExactMatrix c(rows.size(), idx.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (const auto& [col, v] : rows[r]->entries) c(r, local.at(col)) = v;

    const auto sol = detail::solve_block(detail::restrict_form(q.numerator, idx),
                                         detail::restrict_form(q.denominator, idx),
                                         detail::restrict_form(q.mass, idx), c);
    res.deflation_rank += sol.deflated;
    cond = std::max(cond, static_cast<double>(sol.condition));
    const RealMatrix creal = c.to_real();
    for (std::size_t e = 0; e < sol.values.size(); ++e) {
      Pair p{static_cast<double>(sol.values[e]), std::vector<double>(m, 0.0)};
      const RealVector& v = sol.vectors[e];
      // Sign normalization: first non-negligible coefficient positive.
      const Real vmax = v.cwiseAbs().maxCoeff();
      Real sign = 1;
      for (Eigen::Index i = 0; i < v.size(); ++i)
        if (std::fabs(v(i)) > 1e-12L * vmax) {
          sign = v(i) < 0 ? -1 : 1;
          break;
        }
      const RealVector vn = sign * v / v.norm();
      if (creal.rows() > 0)
        res.constraint_residual = std::max(res.constraint_residual, static_cast<double>((creal * vn).cwiseAbs().maxCoeff()));
      for (std::size_t a = 0; a < idx.size(); ++a) p.vec[idx[a]] = static_cast<double>(vn(static_cast<Eigen::Index>(a)));
      pairs.push_back(std::move(p));
    }
  }
  if (pairs.empty()) throw SolverError("solve: empty admissible space after deflation");
  res.condition_diag = cond;

  // Ascending eigenvalue; near-ties ordered lexicographically by vector.
  std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) { return x.value < y.value; });
  for (std::size_t s = 0; s < pairs.size();) {
    std::size_t e = s + 1;
    while (e < pairs.size() && pairs[e].value - pairs[s].value <= 1e-9 * std::max(1.0, std::fabs(pairs[s].value))) ++e;
    std::sort(pairs.begin() + static_cast<std::ptrdiff_t>(s), pairs.begin() + static_cast<std::ptrdiff_t>(e),
              [](const Pair& x, const Pair& y) { return x.vec > y.vec; });
    s = e;
  }
  for (auto& p : pairs) {
    res.eigenvalues.push_back(p.value);
    res.vectors.push_back(std::move(p.vec));
  }
  return res;
}

inline SpectralResult solve(const ProblemSpec& spec) {
  const TrialSpace ts = trial_space(spec);
  return solve_forms(quotient_forms(spec, ts));
}

/// First eigenvalues for each trial degree from the minimum up to spec.degree.
inline std::vector<std::pair<int, double>> degree_sweep(const ProblemSpec& spec) {
  std::vector<std::pair<int, double>> out;
  for (int d = minimal_degree(spec.kind); d <= spec.degree; ++d) {
    ProblemSpec s = spec;
    s.degree = d;
    out.emplace_back(d, solve(s).eigenvalues.front());
  }
  return out;
}

/// q_1 = p_1 - (n-1)/R on a ball (constant mean curvature 1/R).
inline double q_from_p(double p1, int n, double radius) { return p1 - (n - 1) / radius; }

/// sum_i c_i phi_i with each double coefficient converted exactly.
inline MultiPoly combine_basis(std::span<const MultiPoly> basis, std::span<const double> coeffs) {
  if (basis.empty()) throw std::invalid_argument("combine_basis: empty basis");
  MultiPoly out(basis.front().dim());
  for (std::size_t i = 0; i < basis.size(); ++i)
    if (coeffs[i] != 0.0) out += basis[i] * Rational(coeffs[i]);
  return out;
}

/// min_t ||u - t w|| / ||u|| in L^2(B_R).
inline double relative_l2_distance(const MultiPoly& u, const MultiPoly& w, const Rational& radius = 1) {
  const Rational uu = ball_inner(u, u, radius).coeff;
  const Rational uw = ball_inner(u, w, radius).coeff;
  const Rational ww = ball_inner(w, w, radius).coeff;
  const Rational resid = uu - uw * uw / ww;
  return std::sqrt(std::max(0.0, resid.get_d()) / uu.get_d());
}

struct SchwarzTerms {
  double hessian_sq = 0;  // int_B |Hess u|^2
  double laplace_sq = 0;  // int_B (Lap u)^2
};

inline SchwarzTerms schwarz_terms(const MultiPoly& u, const Rational& radius = 1) {
  SchwarzTerms t;
  const MultiPoly lap = laplacian(u);
  t.laplace_sq = ball_inner(lap, lap, radius).value();
  PiMultiple h{0, pi_power_for_dim(u.dim())};
  for (int i = 0; i < u.dim(); ++i) {
    const MultiPoly di = u.derivative(i);
    for (int j = 0; j < u.dim(); ++j) {
      const MultiPoly dij = di.derivative(j);
      h += ball_inner(dij, dij, radius);
    }
  }
  t.hessian_sq = h.value();
  return t;
}

inline nlohmann::ordered_json to_json(const ProblemSpec& s) {
  nlohmann::ordered_json j;
  j["problem"] = to_string(s.kind);
  j["n"] = s.n;
  j["radius"] = s.radius.get_d();
  j["degree"] = s.degree;
  j["beta"] = s.beta.get_d();
  return j;
}

}  // namespace bilap
