#pragma once

// Runs every bound and identity against the model geometries and collects
// the outcome in a BoundReport. Ball quantities come from ritz, hemisphere
// and cap quantities from the collocation solver.

#include "bilap/bessel.hpp"
#include "bilap/cap.hpp"
#include "bilap/ritz.hpp"
#include "bilap/wentzell.hpp"

#include <atomic>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

namespace bilap {

enum class Expect { Equality, Strict, Ge };

inline const char* to_string(Expect e) {
  switch (e) {
    case Expect::Equality: return "EQUALITY";
    case Expect::Strict: return "STRICT";
    case Expect::Ge: return "GE";
  }
  return "?";
}

struct Check {
  std::string id;
  std::string statement;
  double lhs = 0, rhs = 0, margin = 0;
  Expect expect = Expect::Equality;
  double tol = 0;
  bool pass = false;
  std::string lhs_source, rhs_source;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  std::string error;  // solver failure, if any
};

struct HarnessConfig {
  int degree = 10;
  int nodes = 64;
  int ell_max = 3;
  double tol_eq = 1e-5;
  double tol_strict = 1e-3;
  std::uint64_t seed = 0;
  int reilly_count = 100;
  int reilly_degree = 6;
  double reilly_tol = 1e-9;
  int jobs = 1;
};

struct BoundReport {
  std::vector<Check> checks;
  nlohmann::ordered_json environment;

  bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }
};

/// pass flag from the margin; EQUALITY and GE are relative to max(1, |rhs|).
inline void judge(Check& c) {
  c.margin = c.lhs - c.rhs;
  const double scale = std::max(1.0, std::fabs(c.rhs));
  if (!c.error.empty() || !std::isfinite(c.margin)) {
    c.pass = false;
    return;
  }
  switch (c.expect) {
    case Expect::Equality: c.pass = std::fabs(c.margin) <= c.tol * scale; break;
    case Expect::Strict: c.pass = c.margin > c.tol; break;
    case Expect::Ge: c.pass = c.margin >= -c.tol * scale; break;
  }
}

namespace detail {

inline std::string fmt_rational(const Rational& r) { return r.get_str(); }

inline std::string ritz_tag(const ProblemSpec& s) {
  std::ostringstream os;
  os << "ritz:" << to_string(s.kind) << " n=" << s.n << " R=" << s.radius.get_str() << " degree=" << s.degree;
  if (s.kind == ProblemKind::Wentzell) os << " beta=" << s.beta.get_str();
  return os.str();
}

inline std::string cap_tag(const cap::CapSpec& s, const char* what) {
  std::ostringstream os;
  os.precision(17);
  os << "cap:" << what << " n=" << s.n << " curvature=" << s.curvature << " theta=" << s.theta
     << " nodes=" << s.nodes;
  return os.str();
}

// Memoized first eigenvalues, shared by the check groups.
class Cache {
 public:
  explicit Cache(const HarnessConfig& c) : cfg_(c) {}

  const SpectralResult& ritz(ProblemKind kind, int n, const Rational& radius = 1, const Rational& beta = 0) {
    ProblemSpec s;
    s.kind = kind;
    s.n = n;
    s.radius = radius;
    s.beta = beta;
    s.degree = cfg_.degree;
    const std::string key = ritz_tag(s);
    {
      std::lock_guard lock(mu_);
      if (auto it = ritz_.find(key); it != ritz_.end()) return it->second;
    }
    SpectralResult r = solve(s);
    std::lock_guard lock(mu_);
    return ritz_.emplace(key, std::move(r)).first->second;
  }

  ProblemSpec ritz_spec(ProblemKind kind, int n, const Rational& radius = 1, const Rational& beta = 0) const {
    ProblemSpec s;
    s.kind = kind;
    s.n = n;
    s.radius = radius;
    s.beta = beta;
    s.degree = cfg_.degree;
    return s;
  }

  cap::CapResult cap(int n, int curvature, double theta) const {
    cap::CapSpec s;
    s.n = n;
    s.curvature = curvature;
    s.theta = theta;
    s.nodes = cfg_.nodes;
    auto r = cap::solve_cap(s, cfg_.ell_max);
    if (!r.converged) {
      std::ostringstream os;
      os << "cap: refinement change " << r.refinement_change << " exceeds 1e-8";
      throw cap::CapConvergenceError(os.str());
    }
    return r;
  }

  cap::CapSpec cap_spec(int n, int curvature, double theta) const {
    return cap::CapSpec{n, curvature, theta, 0, cfg_.nodes};
  }

 private:
  const HarnessConfig& cfg_;
  std::mutex mu_;
  std::map<std::string, SpectralResult> ritz_;
};

using Group = std::function<std::vector<Check>(Cache&)>;

inline Check make(std::string id, std::string statement, Expect e, double tol) {
  Check c;
  c.id = std::move(id);
  c.statement = std::move(statement);
  c.expect = e;
  c.tol = tol;
  return c;
}

// Runs `body`; a thrown solver error becomes a failing check.
inline std::vector<Check> guarded(Check proto, const std::function<std::vector<Check>(Check)>& body) {
  try {
    auto out = body(proto);
    for (auto& c : out) judge(c);
    return out;
  } catch (const std::exception& ex) {
    proto.error = ex.what();
    proto.lhs = proto.rhs = std::numeric_limits<double>::quiet_NaN();
    judge(proto);
    return {proto};
  }
}

// Random polynomial with small integer coefficients, degree <= max_degree.
inline MultiPoly random_poly(std::mt19937_64& rng, int n, int max_degree) {
  std::uniform_int_distribution<int> deg(1, max_degree);
  std::uniform_int_distribution<int> coef(-5, 5);
  std::uniform_int_distribution<int> nterms(1, 8);
  MultiPoly p(n);
  const int d = deg(rng);
  const int t = nterms(rng);
  for (int i = 0; i < t; ++i) {
    std::uniform_int_distribution<int> var(0, n - 1);
    MultiIndex m(n);
    const int dd = std::uniform_int_distribution<int>(0, d)(rng);
    for (int k = 0; k < dd; ++k) {
      const int v = var(rng);
      m.set(v, m[v] + 1);
    }
    const int c = coef(rng);
    if (c != 0) p.add_term(m, Rational(c));
  }
  if (p.is_zero()) p = MultiPoly::norm_sq(n);
  return p;
}

inline std::vector<Group> groups(const HarnessConfig& cfg) {
  std::vector<Group> g;
  const double pi = std::numbers::pi;
  const double teq = cfg.tol_eq, tst = cfg.tol_strict;

  // Navier plate and buckling bounds on hemispheres and caps (kappa = 1).
  for (double frac : {0.5, 0.4, 0.3}) {
    for (int n : {2, 3, 4}) {
      if (frac != 0.5 && n == 4) continue;
      g.push_back([=](Cache& cache) {
        const Expect e = frac == 0.5 ? Expect::Equality : Expect::Strict;
        const double tol = frac == 0.5 ? teq : tst;
        std::ostringstream where;
        where << "cap theta=" << frac << "pi, n=" << n;
        Check a = make("T1.1", "Gamma_1 >= lambda_1 (lambda_1/n + (n-1) kappa), " + where.str(), e, tol);
        Check b = make("T1.2", "Lambda_1 >= lambda_1/n + (n-1) kappa, " + where.str(), e, tol);
        auto out = guarded(a, [&](Check c) {
          const auto r = cache.cap(n, 1, frac * pi);
          const auto spec = cache.cap_spec(n, 1, frac * pi);
          c.lhs = r.gamma1;
          c.rhs = r.lambda1 * (r.lambda1 / n + (n - 1));
          c.lhs_source = cap_tag(spec, "gamma1");
          c.rhs_source = cap_tag(spec, "lambda1");
          c.inputs = {{"n", n}, {"kappa", 1}, {"theta", frac * pi}, {"lambda1", r.lambda1}};
          Check d = b;
          d.lhs = r.lambda_big1;
          d.rhs = r.lambda1 / n + (n - 1);
          d.lhs_source = cap_tag(spec, "lambda_big1");
          d.rhs_source = c.rhs_source;
          d.inputs = c.inputs;
          return std::vector<Check>{c, d};
        });
        if (out.size() == 1) {  // both checks fail together
          b.error = out.front().error;
          b.lhs = b.rhs = std::numeric_limits<double>::quiet_NaN();
          judge(b);
          out.push_back(b);
        }
        return out;
      });
    }
  }

  // Same bounds on the Euclidean unit ball (kappa = 0), strict.
  for (int n : {2, 3}) {
    g.push_back([=](Cache& cache) {
      std::vector<Check> out;
      auto one = [&](const char* id, const char* st, ProblemKind kind, bool plate) {
        Check c = make(id, std::string(st) + ", unit ball n=" + std::to_string(n), Expect::Strict, tst);
        auto v = guarded(c, [&](Check x) {
          const double l1 = cache.ritz(ProblemKind::LapDirichlet, n).eigenvalues.front();
          x.lhs = cache.ritz(kind, n).eigenvalues.front();
          x.rhs = plate ? l1 * l1 / n : l1 / n;
          x.lhs_source = ritz_tag(cache.ritz_spec(kind, n));
          x.rhs_source = ritz_tag(cache.ritz_spec(ProblemKind::LapDirichlet, n));
          x.inputs = {{"n", n}, {"kappa", 0}, {"lambda1", l1}};
          return std::vector<Check>{x};
        });
        out.insert(out.end(), v.begin(), v.end());
      };
      one("T1.1", "Gamma_1 >= lambda_1^2/n", ProblemKind::GammaNavier, true);
      one("T1.2", "Lambda_1 >= lambda_1/n", ProblemKind::LambdaNavier, false);
      return out;
    });
  }

  // Steklov relations on balls.
  for (int n : {2, 3}) {
    g.push_back([=](Cache& cache) {
      Check c = make("T1.3", "q_1 >= p_1/n, unit ball n=" + std::to_string(n), Expect::Equality, teq);
      return guarded(c, [&](Check x) {
        const double p1 = cache.ritz(ProblemKind::PSteklov, n).eigenvalues.front();
        x.lhs = cache.ritz(ProblemKind::QSteklov, n).eigenvalues.front();
        x.rhs = p1 / n;
        x.lhs_source = ritz_tag(cache.ritz_spec(ProblemKind::QSteklov, n));
        x.rhs_source = ritz_tag(cache.ritz_spec(ProblemKind::PSteklov, n));
        x.inputs = {{"n", n}, {"p1", p1}};
        return std::vector<Check>{x};
      });
    });
    for (const Rational& radius : {Rational(1), Rational(2)}) {
      g.push_back([=](Cache& cache) {
        Check c = make("T1.4", "p_1 >= n c lambda_1/(n kappa + lambda_1), ball R=" + radius.get_str() + " n=" +
                                   std::to_string(n),
                       Expect::Equality, teq);
        return guarded(c, [&](Check x) {
          const double cc = 1 / radius.get_d();
          const double l1 = (n - 1) / (radius.get_d() * radius.get_d());  // boundary sphere S_R
          const double kappa = 0;
          x.lhs = cache.ritz(ProblemKind::PSteklov, n, radius).eigenvalues.front();
          x.rhs = n * cc * l1 / (n * kappa + l1);
          x.lhs_source = ritz_tag(cache.ritz_spec(ProblemKind::PSteklov, n, radius));
          x.rhs_source = "exact: c = 1/R, lambda_1(S_R) = (n-1)/R^2, kappa = 0";
          x.inputs = {{"n", n}, {"R", radius.get_d()}, {"c", cc}, {"kappa", kappa}, {"lambda1_boundary", l1}};
          return std::vector<Check>{x};
        });
      });
    }
  }

  // Wentzell bound with mu_1 from the Neumann Ritz solve, cross-checked
  // against the Bessel oracle.
  for (int n : {2, 3}) {
    for (int beta : {0, 1, 10}) {
      g.push_back([=](Cache& cache) {
        std::vector<Check> out;
        Check c = make("T1.6",
                       "varsigma_1 > n c lambda_1 mu_1/((n-1)(mu_1 + n kappa)) + beta lambda_1, unit ball n=" +
                           std::to_string(n) + " beta=" + std::to_string(beta),
                       Expect::Strict, tst);
        auto v = guarded(c, [&](Check x) {
          const double mu1 = cache.ritz(ProblemKind::LapNeumann, n).eigenvalues.front();
          const double l1 = n - 1, cc = 1, kappa = 0;
          x.lhs = wentzell_eigenvalue(n, Rational(beta), 1).get_d();
          x.rhs = n * cc * l1 * mu1 / ((n - 1) * (mu1 + n * kappa)) + beta * l1;
          x.lhs_source = "exact: (n+2) + beta (n-1)";
          x.rhs_source = ritz_tag(cache.ritz_spec(ProblemKind::LapNeumann, n)) + "; exact lambda_1(S) = n-1";
          x.inputs = {{"n", n}, {"beta", beta}, {"mu1", mu1}, {"kappa", kappa}, {"c", cc}};
          return std::vector<Check>{x};
        });
        out.insert(out.end(), v.begin(), v.end());
        if (beta == 0) {
          Check m = make("T1.6.mu1", "mu_1 (Ritz) = mu_1 (Bessel oracle), unit ball n=" + std::to_string(n),
                         Expect::Equality, teq);
          auto w = guarded(m, [&](Check x) {
            x.lhs = cache.ritz(ProblemKind::LapNeumann, n).eigenvalues.front();
            x.rhs = bessel::neumann_first(n);
            x.lhs_source = ritz_tag(cache.ritz_spec(ProblemKind::LapNeumann, n));
            x.rhs_source = "bessel: derivative-zero bisection";
            x.inputs = {{"n", n}};
            return std::vector<Check>{x};
          });
          out.insert(out.end(), w.begin(), w.end());
        }
        return out;
      });
    }
  }

  for (int n : {2, 3}) {
    for (int beta : {0, 1, 10}) {
      g.push_back([=](Cache& cache) {
        Check c = make("REL",
                       "varsigma_{1,beta} >= xi_1 + beta lambda_1, unit ball n=" + std::to_string(n) +
                           " beta=" + std::to_string(beta),
                       Expect::Equality, teq);
        return guarded(c, [&](Check x) {
          const double xi1 = cache.ritz(ProblemKind::XiSteklov, n).eigenvalues.front();
          x.lhs = cache.ritz(ProblemKind::Wentzell, n, 1, beta).eigenvalues.front();
          x.rhs = xi1 + beta * (n - 1);
          x.lhs_source = ritz_tag(cache.ritz_spec(ProblemKind::Wentzell, n, 1, beta));
          x.rhs_source = ritz_tag(cache.ritz_spec(ProblemKind::XiSteklov, n)) + "; exact lambda_1(S) = n-1";
          x.inputs = {{"n", n}, {"beta", beta}, {"xi1", xi1}};
          return std::vector<Check>{x};
        });
      });
    }
    for (const Rational& radius : {Rational(1), Rational(2)}) {
      g.push_back([=](Cache& cache) {
        Check c = make("CONJ", "xi_1 >= (n+2) c lambda_1/(n-1), ball R=" + radius.get_str() + " n=" + std::to_string(n),
                       Expect::Equality, teq);
        return guarded(c, [&](Check x) {
          const double rr = radius.get_d();
          const double cc = 1 / rr, l1 = (n - 1) / (rr * rr);
          x.lhs = cache.ritz(ProblemKind::XiSteklov, n, radius).eigenvalues.front();
          x.rhs = (n + 2) * cc * l1 / (n - 1);
          x.lhs_source = ritz_tag(cache.ritz_spec(ProblemKind::XiSteklov, n, radius));
          x.rhs_source = "exact: c = 1/R, lambda_1(S_R) = (n-1)/R^2";
          x.inputs = {{"n", n}, {"R", rr}};
          return std::vector<Check>{x};
        });
      });
    }
  }

  // Reilly's identity on random polynomials.
  g.push_back([=](Cache&) {
    Check c = make("REILLY",
                   "max relative residual of Reilly's identity over " + std::to_string(cfg.reilly_count) +
                       " random polynomials, degree <= " + std::to_string(cfg.reilly_degree),
                   Expect::Equality, cfg.reilly_tol);
    return guarded(c, [&](Check x) {
      std::mt19937_64 rng(cfg.seed);
      double worst = 0;
      int exact_zero = 0;
      for (int i = 0; i < cfg.reilly_count; ++i) {
        const int n = 2 + i % 3;
        const Rational radius = (i % 2 == 0) ? Rational(1) : Rational(3, 2);
        const MultiPoly f = random_poly(rng, n, cfg.reilly_degree);
        const auto t = reilly_terms(f, radius);
        const PiMultiple diff = t.lhs - t.rhs;
        if (diff.coeff == 0) ++exact_zero;
        const double scale = std::max({std::fabs(t.lhs.value()), std::fabs(t.rhs.value()), 1e-300});
        worst = std::max(worst, std::fabs(diff.value()) / scale);
      }
      x.lhs = worst;
      x.rhs = 0;
      x.lhs_source = "moments:reilly_terms";
      x.rhs_source = "identity";
      x.inputs = {{"count", cfg.reilly_count}, {"max_degree", cfg.reilly_degree}, {"seed", cfg.seed},
                  {"exact_zero", exact_zero}};
      return std::vector<Check>{x};
    });
  });

  // Schwarz inequality on computed first eigenvectors.
  for (int n : {2, 3}) {
    g.push_back([=](Cache& cache) {
      std::vector<Check> out;
      for (ProblemKind kind : {ProblemKind::PSteklov, ProblemKind::XiSteklov, ProblemKind::GammaNavier,
                               ProblemKind::Clamped, ProblemKind::Buckling}) {
        Check c = make("SCHWARZ",
                       std::string("int |Hess u|^2 >= (1/n) int (Lap u)^2, first ") + to_string(kind) +
                           " eigenvector, unit ball n=" + std::to_string(n),
                       Expect::Ge, teq);
        auto v = guarded(c, [&](Check x) {
          const auto& r = cache.ritz(kind, n);
          const ProblemSpec spec = cache.ritz_spec(kind, n);
          const TrialSpace ts = trial_space(spec);
          const MultiPoly u = combine_basis(ts.basis, r.vectors.front());
          const auto t = schwarz_terms(u);
          x.lhs = t.hessian_sq / t.laplace_sq;  // normalized by int (Lap u)^2
          x.rhs = 1.0 / n;
          x.lhs_source = ritz_tag(spec) + " eigenvector 0";
          x.rhs_source = "exact: 1/n";
          x.inputs = {{"n", n}, {"hessian_sq", t.hessian_sq}, {"laplace_sq", t.laplace_sq}};
          return std::vector<Check>{x};
        });
        out.insert(out.end(), v.begin(), v.end());
      }
      return out;
    });
  }

  // Two independent discretizations of the Euclidean ball.
  for (int n : {2, 3}) {
    g.push_back([=](Cache& cache) {
      std::vector<Check> out;
      for (bool plate : {false, true}) {
        Check c = make("XORACLE",
                       std::string(plate ? "Gamma_1" : "lambda_1") + " Ritz = collocation, unit ball n=" +
                           std::to_string(n),
                       Expect::Equality, teq);
        auto v = guarded(c, [&](Check x) {
          const auto kind = plate ? ProblemKind::GammaNavier : ProblemKind::LapDirichlet;
          const auto r = cache.cap(n, 0, 1.0);
          x.lhs = cache.ritz(kind, n).eigenvalues.front();
          x.rhs = plate ? r.gamma1 : r.lambda1;
          x.lhs_source = ritz_tag(cache.ritz_spec(kind, n));
          x.rhs_source = cap_tag(cache.cap_spec(n, 0, 1.0), plate ? "gamma1" : "lambda1");
          x.inputs = {{"n", n}};
          return std::vector<Check>{x};
        });
        out.insert(out.end(), v.begin(), v.end());
      }
      return out;
    });
  }
  return g;
}

}  // namespace detail

inline BoundReport run_all(const HarnessConfig& cfg = {}) {
  const auto groups = detail::groups(cfg);
  detail::Cache cache(cfg);
  std::vector<std::vector<Check>> results(groups.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < groups.size(); i = next++) results[i] = groups[i](cache);
  };
  const int jobs = std::max(1, cfg.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }

  BoundReport rep;
  for (auto& r : results) rep.checks.insert(rep.checks.end(), r.begin(), r.end());
  std::stable_sort(rep.checks.begin(), rep.checks.end(), [](const Check& a, const Check& b) { return a.id < b.id; });
  rep.environment = {{"degree", cfg.degree},         {"nodes", cfg.nodes},
                     {"ell_max", cfg.ell_max},       {"tol_eq", cfg.tol_eq},
                     {"tol_strict", cfg.tol_strict}, {"seed", cfg.seed},
                     {"reilly_count", cfg.reilly_count}, {"reilly_degree", cfg.reilly_degree},
                     {"reilly_tol", cfg.reilly_tol}};
  return rep;
}

inline nlohmann::ordered_json to_json(const Check& c) {
  nlohmann::ordered_json j;
  j["id"] = c.id;
  j["statement"] = c.statement;
  j["lhs"] = c.lhs;
  j["rhs"] = c.rhs;
  j["margin"] = c.margin;
  j["expect"] = to_string(c.expect);
  j["tol"] = c.tol;
  j["pass"] = c.pass;
  j["lhs_source"] = c.lhs_source;
  j["rhs_source"] = c.rhs_source;
  j["inputs"] = c.inputs;
  if (!c.error.empty()) j["error"] = c.error;
  return j;
}

inline nlohmann::ordered_json to_json(const BoundReport& r) {
  nlohmann::ordered_json j;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) arr.push_back(to_json(c));
  j["checks"] = arr;
  j["environment"] = r.environment;
  j["all_pass"] = r.all_pass();
  return j;
}

namespace detail {
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}
}  // namespace detail

inline std::string to_csv(const BoundReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "id,statement,lhs,rhs,margin,expect,tol,pass,lhs_source,rhs_source\n";
  for (const auto& c : r.checks) {
    os << c.id << ',' << detail::csv_field(c.statement) << ',' << c.lhs << ',' << c.rhs << ',' << c.margin << ','
       << to_string(c.expect) << ',' << c.tol << ',' << (c.pass ? "true" : "false") << ','
       << detail::csv_field(c.lhs_source) << ',' << detail::csv_field(c.rhs_source) << '\n';
  }
  return os.str();
}

}  // namespace bilap
