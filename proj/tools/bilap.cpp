// bilap: command-line front end for the solvers and the bound harness.
//
// exit codes: 0 ok, 1 a check failed, 2 usage error, 3 solver did not converge

#include "bilap/harness.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kUsage = 2, kNoConvergence = 3 };

struct Options {
  int n = 3;
  int degree = 10;
  std::string beta = "0";
  std::string radius = "1";
  double theta = std::numbers::pi / 2;
  int curvature = 1;
  int ell_max = 3;
  int nodes = 64;
  int kmax = 5;
  std::string problem = "p";
  std::string format = "table";
  std::string out;
  std::string config;
  double tol_eq = 1e-5;
  double tol_strict = 1e-3;
  std::uint64_t seed = 0;
  int jobs = 1;
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw UsageError("cannot open " + o.out);
  f << text;
}

std::string num(double v, int prec = 12) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

int cmd_spectrum(const Options& o) {
  const bilap::Rational beta = bilap::parse_rational(o.beta);
  std::ostringstream os;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  if (o.format == "csv") os << "k,value,multiplicity\n";
  if (o.format == "table") os << std::setw(4) << "k" << std::setw(16) << "varsigma_k" << std::setw(14) << "mu_k" << '\n';
  for (int k = 0; k <= o.kmax; ++k) {
    const auto v = bilap::wentzell_eigenvalue(o.n, beta, k).get_str();
    const auto m = bilap::mu(o.n, k);
    if (o.format == "json") rows.push_back({{"k", k}, {"value", v}, {"multiplicity", m}});
    else if (o.format == "csv") os << k << ',' << v << ',' << m << '\n';
    else os << std::setw(4) << k << std::setw(16) << v << std::setw(14) << m << '\n';
  }
  if (o.format == "json") os << nlohmann::ordered_json{{"n", o.n}, {"beta", beta.get_str()}, {"rows", rows}}.dump(2) << '\n';
  emit(o, os.str());
  return kOk;
}

int cmd_solve(const Options& o) {
  const auto kind = bilap::problem_from_string(o.problem);
  if (!kind) throw UsageError("unknown problem '" + o.problem + "'");
  bilap::ProblemSpec s;
  s.kind = *kind;
  s.n = o.n;
  s.degree = o.degree;
  s.radius = bilap::parse_rational(o.radius);
  s.beta = bilap::parse_rational(o.beta);
  bilap::validate(s);
  const auto r = bilap::solve(s);
  const auto sweep = bilap::degree_sweep(s);
  const std::size_t shown = std::min<std::size_t>(static_cast<std::size_t>(std::max(o.kmax, 1)), r.eigenvalues.size());

  std::ostringstream os;
  if (o.format == "json") {
    nlohmann::ordered_json j;
    j["spec"] = bilap::to_json(s);
    j["eigenvalues"] = std::vector<double>(r.eigenvalues.begin(), r.eigenvalues.begin() + static_cast<std::ptrdiff_t>(shown));
    j["first_vector"] = r.vectors.front();
    j["basis_size"] = r.basis_size;
    j["deflation_rank"] = r.deflation_rank;
    j["constraint_residual"] = r.constraint_residual;
    j["condition_diag"] = r.condition_diag;
    j["blocks"] = r.blocks;
    auto sw = nlohmann::ordered_json::array();
    for (const auto& [d, v] : sweep) sw.push_back({{"degree", d}, {"first", v}});
    j["degree_sweep"] = sw;
    os << j.dump(2) << '\n';
  } else if (o.format == "csv") {
    os << "index,eigenvalue\n";
    for (std::size_t i = 0; i < shown; ++i) os << i << ',' << num(r.eigenvalues[i], 17) << '\n';
  } else {
    os << "problem " << o.problem << "  n=" << s.n << "  R=" << s.radius.get_str() << "  degree=" << s.degree;
    if (s.kind == bilap::ProblemKind::Wentzell) os << "  beta=" << s.beta.get_str();
    os << "\nbasis " << r.basis_size << "  blocks " << r.blocks << "  deflated " << r.deflation_rank
       << "  constraint residual " << num(r.constraint_residual, 3) << "\n\n";
    for (std::size_t i = 0; i < shown; ++i) os << std::setw(4) << i << "  " << num(r.eigenvalues[i], 15) << '\n';
    os << "\ndegree  first eigenvalue\n";
    for (const auto& [d, v] : sweep) os << std::setw(6) << d << "  " << num(v, 15) << '\n';
  }
  emit(o, os.str());
  return kOk;
}

int cmd_cap(const Options& o) {
  bilap::cap::CapSpec s{o.n, o.curvature, o.theta, 0, o.nodes};
  const auto r = bilap::cap::solve_cap(s, o.ell_max);
  std::ostringstream os;
  if (o.format == "json") {
    os << bilap::cap::to_json(r).dump(2) << '\n';
  } else if (o.format == "csv") {
    os << "quantity,value,ell\n";
    os << "lambda1," << num(r.lambda1, 17) << ',' << r.lambda1_ell << '\n';
    os << "gamma1," << num(r.gamma1, 17) << ',' << r.gamma1_ell << '\n';
    os << "lambda_big1," << num(r.lambda_big1, 17) << ',' << r.lambda_big1_ell << '\n';
  } else {
    os << "cap  n=" << s.n << "  curvature=" << s.curvature << "  theta=" << num(s.theta) << "  nodes=" << s.nodes
       << "\n\n";
    os << "ell  lambda            Gamma             Lambda\n";
    for (const auto& t : r.per_ell)
      os << std::setw(3) << t.ell << "  " << std::setw(16) << (t.lambda.empty() ? "-" : num(t.lambda[0])) << "  "
         << std::setw(16) << (t.gamma.empty() ? "-" : num(t.gamma[0])) << "  " << std::setw(16)
         << (t.lambda_big.empty() ? "-" : num(t.lambda_big[0])) << '\n';
    os << "\nlambda_1 = " << num(r.lambda1, 15) << "\nGamma_1  = " << num(r.gamma1, 15)
       << "\nLambda_1 = " << num(r.lambda_big1, 15) << "\nrefinement change " << num(r.refinement_change, 3)
       << (r.converged ? " (converged)" : " (NOT converged)") << '\n';
  }
  emit(o, os.str());
  return r.converged ? kOk : kNoConvergence;
}

// key=value lines; '#' starts a comment.
std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read config " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

int cmd_verify(Options o, const CLI::App& sub) {
  if (!o.config.empty()) {
    for (const auto& [k, v] : read_config(o.config)) {
      const std::string flag = "--" + k;
      const CLI::Option* opt = nullptr;
      try {
        opt = sub.get_option(flag);
      } catch (const CLI::OptionNotFound&) {
        throw UsageError("unknown config key '" + k + "'");
      }
      if (opt->count() > 0) continue;  // flag wins
      try {
        if (k == "degree") o.degree = std::stoi(v);
        else if (k == "nodes") o.nodes = std::stoi(v);
        else if (k == "ell-max") o.ell_max = std::stoi(v);
        else if (k == "tol-eq") o.tol_eq = std::stod(v);
        else if (k == "tol-strict") o.tol_strict = std::stod(v);
        else if (k == "seed") o.seed = std::stoull(v);
        else if (k == "jobs") o.jobs = std::stoi(v);
        else if (k == "format") o.format = v;
        else if (k == "out") o.out = v;
        else throw UsageError("config key '" + k + "' not valid for verify");
      } catch (const std::logic_error&) {
        throw UsageError("bad value for config key '" + k + "'");
      }
    }
    if (o.format != "table" && o.format != "json" && o.format != "csv") throw UsageError("bad format " + o.format);
  }
  bilap::HarnessConfig cfg;
  cfg.degree = o.degree;
  cfg.nodes = o.nodes;
  cfg.ell_max = o.ell_max;
  cfg.tol_eq = o.tol_eq;
  cfg.tol_strict = o.tol_strict;
  cfg.seed = o.seed;
  cfg.jobs = o.jobs;
  const auto rep = bilap::run_all(cfg);

  std::ostringstream os;
  if (o.format == "json") {
    os << bilap::to_json(rep).dump(2) << '\n';
  } else if (o.format == "csv") {
    os << bilap::to_csv(rep);
  } else {
    for (const auto& c : rep.checks) {
      os << (c.pass ? "PASS " : "FAIL ") << std::left << std::setw(9) << c.id << std::right << std::setw(9)
         << bilap::to_string(c.expect) << "  lhs " << std::setw(14) << num(c.lhs, 10) << "  rhs " << std::setw(14)
         << num(c.rhs, 10) << "  margin " << std::setw(10) << num(c.margin, 3) << "  " << c.statement;
      if (!c.error.empty()) os << "  [" << c.error << "]";
      os << '\n';
    }
    const auto npass = std::count_if(rep.checks.begin(), rep.checks.end(), [](const auto& c) { return c.pass; });
    os << npass << "/" << rep.checks.size() << " checks passed\n";
  }
  emit(o, os.str());
  for (const auto& c : rep.checks)
    if (!c.error.empty() && c.error.rfind("cap: refinement", 0) == 0) return kNoConvergence;
  return rep.all_pass() ? kOk : kCheckFailed;
}

int cmd_certify(const Options& o) {
  const bilap::Rational beta = bilap::parse_rational(o.beta);
  if (!o.out.empty()) std::filesystem::create_directories(o.out);
  bool ok = true;
  for (int k = 0; k <= o.kmax; ++k) {
    const auto space = bilap::wentzell_eigenspace(o.n, beta, k);
    for (std::size_t i = 0; i < space.eigenfunctions.size(); ++i) {
      const auto cert = bilap::certificate(space.eigenfunctions[i], beta, space.value);
      ok = ok && cert.valid();
      auto j = bilap::to_json(cert, k);
      j["index"] = i;
      j["multiplicity"] = space.multiplicity;
      if (o.out.empty()) {
        std::cout << j.dump() << '\n';
      } else {
        std::string b = beta.get_str();
        std::replace(b.begin(), b.end(), '/', '_');
        const auto name = "cert_n" + std::to_string(o.n) + "_beta" + b + "_k" + std::to_string(k) + "_" +
                          std::to_string(i) + ".json";
        std::ofstream f(std::filesystem::path(o.out) / name);
        if (!f) throw UsageError("cannot write into " + o.out);
        f << j.dump(2) << '\n';
      }
    }
  }
  return ok ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bi-Laplace eigenvalue solvers and bound checks"};
  app.require_subcommand(1);
  Options o;

  auto formats = CLI::IsMember({"table", "json", "csv"});
  auto common = [&](CLI::App* s) {
    s->add_option("--n", o.n, "dimension")->check(CLI::Range(2, 8));
    s->add_option("--format", o.format, "table, json or csv")->check(formats);
    s->add_option("--out", o.out, "output file (directory for certify)");
  };

  auto* spectrum = app.add_subcommand("spectrum", "closed-form Wentzell spectrum of the unit ball");
  common(spectrum);
  spectrum->add_option("--beta", o.beta, "beta >= 0 (exact rational)");
  spectrum->add_option("--kmax", o.kmax, "largest mode index")->check(CLI::NonNegativeNumber);

  auto* solve = app.add_subcommand("solve", "Rayleigh-Ritz solve on a ball");
  common(solve);
  solve->add_option("--problem", o.problem, "p, q, xi, wentzell, gamma, lambda, clamped, buckling, dirichlet, neumann");
  solve->add_option("--degree", o.degree, "trial polynomial degree");
  solve->add_option("--radius", o.radius, "ball radius (exact rational)");
  solve->add_option("--beta", o.beta, "Wentzell beta (exact rational)");
  solve->add_option("--kmax", o.kmax, "number of eigenvalues printed");

  auto* capcmd = app.add_subcommand("cap", "collocation solve on a geodesic ball");
  common(capcmd);
  capcmd->add_option("--curvature", o.curvature, "+1 sphere, 0 Euclidean, -1 hyperbolic")->check(CLI::Range(-1, 1));
  capcmd->add_option("--theta", o.theta, "geodesic radius");
  capcmd->add_option("--nodes", o.nodes, "collocation nodes")->check(CLI::Range(16, 4096));
  capcmd->add_option("--ell-max", o.ell_max, "largest angular mode")->check(CLI::NonNegativeNumber);

  auto* verify = app.add_subcommand("verify", "run every bound and identity check");
  verify->add_option("--format", o.format, "table, json or csv")->check(formats);
  verify->add_option("--out", o.out, "output file");
  verify->add_option("--config", o.config, "key=value file; flags take precedence");
  verify->add_option("--degree", o.degree, "Ritz trial degree");
  verify->add_option("--nodes", o.nodes, "collocation nodes")->check(CLI::Range(16, 4096));
  verify->add_option("--ell-max", o.ell_max, "largest angular mode")->check(CLI::NonNegativeNumber);
  verify->add_option("--tol-eq", o.tol_eq, "relative tolerance for equalities");
  verify->add_option("--tol-strict", o.tol_strict, "margin required for strict inequalities");
  verify->add_option("--seed", o.seed, "seed for the random polynomial batch");
  verify->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);

  auto* certify = app.add_subcommand("certify", "exact residual certificates for the Wentzell eigenfunctions");
  common(certify);
  certify->add_option("--beta", o.beta, "beta >= 0 (exact rational)");
  certify->add_option("--kmax", o.kmax, "largest mode index")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*spectrum) return cmd_spectrum(o);
    if (*solve) return cmd_solve(o);
    if (*capcmd) return cmd_cap(o);
    if (*verify) return cmd_verify(o, *verify);
    if (*certify) return cmd_certify(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::length_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const bilap::SolverError& e) {
    std::cerr << "solver failed: " << e.what() << '\n';
    return kNoConvergence;
  } catch (const bilap::cap::CapConvergenceError& e) {
    std::cerr << "solver failed: " << e.what() << '\n';
    return kNoConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNoConvergence;
  }
  return kUsage;
}
