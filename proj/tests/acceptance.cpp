// Acceptance run: one PASS/FAIL line per criterion.
//
// usage: acceptance <path-to-bilap-cli> <scratch-dir>

#include "bilap/harness.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace bilap;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ProblemSpec spec(ProblemKind k, int n, int degree, Rational radius = 1, Rational beta = 0) {
  ProblemSpec s;
  s.kind = k;
  s.n = n;
  s.degree = degree;
  s.radius = radius;
  s.beta = beta;
  return s;
}

double first(const ProblemSpec& s) { return solve(s).eigenvalues.front(); }

std::string g(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

int run(const std::string& cmd, std::string* out = nullptr) {
  std::string full = cmd + " 2>&1";
  FILE* p = popen(full.c_str(), "r");
  if (!p) return -1;
  std::string text;
  char buf[4096];
  while (std::size_t k = fread(buf, 1, sizeof buf, p)) text.append(buf, k);
  const int status = pclose(p);
  if (out) *out = text;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome criterion1(const std::string& cli, const fs::path& scratch) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t files = 0, valid = 0;
  for (int n : {2, 3, 4})
    for (int beta : {0, 1, 5}) {
      const fs::path dir = scratch / ("certs_n" + std::to_string(n) + "_b" + std::to_string(beta));
      fs::remove_all(dir);
      const int rc = run(cli + " certify --n " + std::to_string(n) + " --beta " + std::to_string(beta) +
                         " --kmax 5 --out " + dir.string());
      o.require(rc == 0, "certify exit code n=" + std::to_string(n));
      std::vector<std::size_t> per_k(6, 0);
      for (const auto& e : fs::directory_iterator(dir)) {
        std::ifstream f(e.path());
        const auto j = nlohmann::ordered_json::parse(f);
        ++files;
        const int k = j["k"].get<int>();
        ++per_k[static_cast<std::size_t>(k)];
        const bool ok = j["valid"].get<bool>() && recheck_certificate(j) && j["pde_residual"] == "0" &&
                        j["neumann_residual"] == "0" && j["wentzell_residual"] == "0";
        valid += ok ? 1 : 0;
        const Rational sigma = parse_rational(j["sigma"].get<std::string>());
        o.require(sigma == Rational(k * k * (n + 2 * k) + beta * k * (k + n - 2)), "eigenvalue formula");
      }
      for (int k = 0; k <= 5; ++k) o.require(per_k[static_cast<std::size_t>(k)] == mu(n, k), "multiplicity");
    }
  const double t = since(t0);
  o.require(valid == files && files > 0, "residual certificate");
  o.require(t < 30, "runtime");
  o.detail << valid << "/" << files << " certificates exact, multiplicities = mu(n,k), " << g(t) << " s";
  return o;
}

Outcome criterion2() {
  Outcome o;
  double worst_p = 0, worst_q = 0, worst_xi = 0, worst_w = 0, l2 = 0;
  for (int n : {2, 3}) {
    const auto ps = spec(ProblemKind::PSteklov, n, 8);
    const auto pr = solve(ps);
    worst_p = std::max(worst_p, std::fabs(pr.eigenvalues.front() - n));
    worst_q = std::max(worst_q, std::fabs(first(spec(ProblemKind::QSteklov, n, 8)) - 1));
    worst_xi = std::max(worst_xi, std::fabs(first(spec(ProblemKind::XiSteklov, n, 10)) - (n + 2)));
    for (int beta : {0, 1, 10})
      worst_w = std::max(worst_w, std::fabs(first(spec(ProblemKind::Wentzell, n, 10, 1, beta)) - ((n + 2) + beta * (n - 1))));
    const MultiPoly u = combine_basis(trial_space(ps).basis, pr.vectors.front());
    const MultiPoly bump = MultiPoly::constant(n, 1) - MultiPoly::norm_sq(n);
    l2 = std::max(l2, relative_l2_distance(u, bump));
  }
  o.require(worst_p <= 1e-8, "p1");
  o.require(worst_q <= 1e-8, "q1");
  o.require(worst_xi <= 1e-6, "xi1");
  o.require(worst_w <= 1e-6, "varsigma1");
  o.require(l2 <= 1e-7, "eigenvector");
  o.detail << "|p1-n| " << g(worst_p) << ", |q1-1| " << g(worst_q) << ", |xi1-(n+2)| " << g(worst_xi)
           << ", |varsigma-closed form| " << g(worst_w) << ", L2(u, 1-|x|^2) " << g(l2);
  return o;
}

Outcome criterion3() {
  Outcome o;
  const double pi = std::numbers::pi;
  const double j01 = bessel::dirichlet_eigenvalue(2);
  const double l2 = first(spec(ProblemKind::LapDirichlet, 2, 12));
  const double l3 = first(spec(ProblemKind::LapDirichlet, 3, 12));
  const double m3 = first(spec(ProblemKind::LapNeumann, 3, 10));
  const double m3o = bessel::neumann_first(3);
  o.require(std::fabs(l2 - j01) <= 1e-6, "lambda1(B2)");
  o.require(std::fabs(j01 - 5.7831860) <= 1e-7, "Bessel oracle vs tabulated j01^2");
  o.require(std::fabs(l3 - pi * pi) <= 1e-6, "lambda1(B3)");
  o.require(std::fabs(m3 - m3o) <= 1e-5, "mu1(B3)");
  o.detail.precision(10);
  o.detail << "lambda1(B2) " << l2 << " (oracle " << j01 << "), lambda1(B3) " << l3 << ", mu1(B3) " << m3
           << " (oracle " << m3o << ")";
  return o;
}

cap::CapResult cap_solve(int n, int curvature, double theta) {
  return cap::solve_cap(cap::CapSpec{n, curvature, theta, 0, 64});
}

Outcome criterion4() {
  Outcome o;
  double el = 0, eg = 0, eb = 0, conv = 0;
  for (int n : {2, 3, 4}) {
    const auto r = cap_solve(n, 1, std::numbers::pi / 2);
    el = std::max(el, std::fabs(r.lambda1 - n));
    eg = std::max(eg, std::fabs(r.gamma1 - n * n));
    eb = std::max(eb, std::fabs(r.lambda_big1 - n));
    conv = std::max(conv, r.refinement_change);
  }
  o.require(el <= 1e-8, "lambda1");
  o.require(eg <= 1e-6, "Gamma1");
  o.require(eb <= 1e-6, "Lambda1");
  o.require(conv <= 1e-8, "N -> N+16 convergence");
  o.detail << "|lambda1-n| " << g(el) << ", |Gamma1-n^2| " << g(eg) << ", |Lambda1-n| " << g(eb)
           << ", refinement change " << g(conv);
  return o;
}

Outcome criterion5() {
  Outcome o;
  double min_g = 1e300, min_b = 1e300, conv = 0;
  for (double frac : {0.3, 0.4})
    for (int n : {2, 3, 4}) {
      const auto r = cap_solve(n, 1, frac * std::numbers::pi);
      min_g = std::min(min_g, r.gamma1 - r.lambda1 * (r.lambda1 / n + (n - 1)));
      min_b = std::min(min_b, r.lambda_big1 - (r.lambda1 / n + (n - 1)));
      conv = std::max(conv, r.refinement_change);
    }
  double min_ball = 1e300;
  for (int n : {2, 3}) {
    const double l1 = first(spec(ProblemKind::LapDirichlet, n, 12));
    min_ball = std::min(min_ball, first(spec(ProblemKind::GammaNavier, n, 12)) - l1 * l1 / n);
  }
  o.require(min_g > 0, "cap Gamma margin");
  o.require(min_b > 0, "cap Lambda margin");
  o.require(conv <= 1e-8, "N -> N+16 convergence");
  o.require(min_ball > 1e-2, "ball margin");
  o.detail << "min cap margins Gamma " << g(min_g) << ", Lambda " << g(min_b) << "; ball Gamma1 - lambda1^2/n "
           << g(min_ball);
  return o;
}

Outcome criterion6(const std::string& cli) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  std::string a, b;
  const int rc = run(cli + " verify --format json --seed 0", &a);
  const double t = since(t0);
  run(cli + " verify --format json --seed 0 --jobs 4", &b);
  o.require(rc == 0, "exit code");
  o.require(a == b, "determinism");
  o.require(t < 120, "runtime");
  std::size_t npass = 0, ntotal = 0;
  std::vector<std::string> missing;
  try {
    const auto j = nlohmann::ordered_json::parse(a);
    for (const auto& c : j["checks"]) {
      ++ntotal;
      npass += c["pass"].get<bool>() ? 1 : 0;
      if (c["id"] == "REILLY") {
        o.require(c["lhs"].get<double>() <= 1e-9, "Reilly residual");
        o.require(c["inputs"]["count"].get<int>() == 100 && c["inputs"]["max_degree"].get<int>() == 6, "Reilly batch");
      }
    }
    for (const char* id : {"T1.1", "T1.2", "T1.3", "T1.4", "T1.6", "REL", "CONJ", "REILLY", "SCHWARZ"}) {
      bool seen = false;
      for (const auto& c : j["checks"]) seen = seen || c["id"] == id;
      if (!seen) missing.emplace_back(id);
    }
  } catch (const std::exception& e) {
    o.require(false, std::string("report parse: ") + e.what());
  }
  o.require(missing.empty() && ntotal > 0 && npass == ntotal, "all checks");
  o.detail << npass << "/" << ntotal << " checks pass, " << g(t) << " s, byte-identical rerun " << (a == b ? "yes" : "no");
  return o;
}

Outcome criterion7() {
  Outcome o;
  struct Law {
    ProblemKind kind;
    int power;
  };
  double worst = 0;
  for (const Law law : {Law{ProblemKind::PSteklov, 1}, Law{ProblemKind::QSteklov, 1},
                        Law{ProblemKind::LapDirichlet, 2}, Law{ProblemKind::XiSteklov, 3},
                        Law{ProblemKind::GammaNavier, 4}})
    for (int n : {2, 3}) {
      std::vector<double> v;
      for (const Rational& r : {Rational(1, 2), Rational(1), Rational(2)})
        v.push_back(first(spec(law.kind, n, 10, r)) * std::pow(r.get_d(), law.power));
      for (double x : v) worst = std::max(worst, std::fabs(x - v[1]) / std::fabs(v[1]));
    }
  o.require(worst <= 1e-5, "scaling");
  o.detail << "max relative spread " << g(worst);
  return o;
}

Outcome criterion8() {
  Outcome o;
  double worst = 0;
  for (int n : {2, 3}) {
    const auto c = cap_solve(n, 0, 1.0);
    const double l = first(spec(ProblemKind::LapDirichlet, n, 12));
    const double gm = first(spec(ProblemKind::GammaNavier, n, 12));
    worst = std::max({worst, std::fabs(l - c.lambda1), std::fabs(gm - c.gamma1)});
  }
  o.require(worst <= 1e-5, "agreement");
  o.detail << "max |ritz - collocation| " << g(worst);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance <bilap-cli> <scratch-dir>\n";
    return 2;
  }
  const std::string cli = argv[1];
  const fs::path scratch = argv[2];
  fs::create_directories(scratch);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"closed-form Wentzell spectrum, exact certificates", [&] { return criterion1(cli, scratch); }},
      {"ball Steklov values", criterion2},
      {"Laplace oracles", criterion3},
      {"hemisphere equalities", criterion4},
      {"strictness sweeps", criterion5},
      {"bound harness", [&] { return criterion6(cli); }},
      {"scaling laws", criterion7},
      {"cross-oracle", criterion8},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    failed += o.pass ? 0 : 1;
    std::cout << "criterion " << i + 1 << " " << (o.pass ? "PASS" : "FAIL") << "  " << criteria[i].first << ": "
              << o.detail.str() << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
