#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wgq/assembly.hpp"
#include "wgq/io.hpp"
#include "wgq/oracle.hpp"
#include "wgq/rules.hpp"
#include "wgq/validation.hpp"

namespace {

using wgq::format_double;
using nlohmann::json;

enum Exit { kOk = 0, kTolerance = 2, kSolver = 3, kConfig = 4 };

struct DeriveOptions {
  int degree = 2;
  std::string kind = "both";
  std::string family = "gaussian";
  double omega1 = 1.0;
  double residual_tol = 1e-12;
  bool unsafe_newton = false;
  std::string start = "poor-guess";
  std::string out = ".";
};

struct AssembleOptions {
  int d = 1;
  int p = 2;
  int mesh = 10;
  std::string strategy = "gauss-weighted";
  std::string kind = "both";
  std::string format = "mtx";
  std::vector<double> scale;
  bool check_oracle = false;
  double oracle_tol = 1e-12;
  bool count_ratios = false;
  int threads = 1;
  std::string out = ".";
};

struct StudyOptions {
  int d = 1;
  int p = 2;
  int index = 1;
  int mesh = 1000;
  std::vector<int> meshes{8, 16, 32};
  std::string strategy = "gauss-weighted";
  std::string solution = "sine";
  double rate_tol = -1.0;
  double curve_tol = 1e-9;
  std::string out = ".";
};

std::string path_in(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / name).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw wgq::IoError("cannot open " + path);
  os << text;
}

std::vector<wgq::RuleKind> kinds_from(const std::string& kind) {
  if (kind == "mass") return {wgq::RuleKind::Mass};
  if (kind == "stiffness") return {wgq::RuleKind::Stiffness};
  return {wgq::RuleKind::Mass, wgq::RuleKind::Stiffness};
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? " " : "") + format_double(v[k]);
  return out;
}

// ---------------------------------------------------------------------------

int report_failure_mode(const DeriveOptions& o) {
  if (o.degree != 3) throw wgq::RuleError("--unsafe-newton reproduces the cubic mass system; use --degree 3");
  const std::vector<double> start(std::begin(wgq::kCubicMassPoorStart), std::end(wgq::kCubicMassPoorStart));
  const std::vector<double> ref(std::begin(wgq::kCubicMassOutOfBracketRoot),
                                std::end(wgq::kCubicMassOutOfBracketRoot));
  const wgq::FailureModeReport r = wgq::cubic_mass_failure_mode(start, ref);

  auto attempt = [](const wgq::NewtonAttempt& a) {
    return json{{"params", a.params},          {"iterations", a.iterations}, {"converged", a.converged},
                {"in_brackets", a.in_brackets}, {"residual", a.residual}};
  };
  std::cout << "start (tau1, tau2, omega1, omega2): " << join(start) << '\n';
  std::cout << "unsafe newton: " << (r.unsafe.converged ? "converged" : "did not converge") << " after "
            << r.unsafe.iterations << " iterations, params " << join(r.unsafe.params) << ", residual "
            << format_double(r.unsafe.residual) << '\n';
  std::cout << "out-of-bracket root: " << join(r.polished.params) << ", residual "
            << format_double(r.polished.residual) << (r.reference_is_root ? " (root)" : " (not a root)")
            << (r.reference_rejected ? ", rejected by bracket filter" : ", inside brackets") << '\n';
  std::cout << "bracketed solver: " << join(r.bracketed.params) << ", residual "
            << format_double(r.bracketed.residual) << '\n';

  wgq::write_json_file(path_in(o.out, "failure_mode_p3_mass.json"),
                       json{{"start", start},
                            {"unsafe", attempt(r.unsafe)},
                            {"out_of_bracket_root", attempt(r.polished)},
                            {"reference_is_root", r.reference_is_root},
                            {"reference_rejected", r.reference_rejected},
                            {"bracketed", attempt(r.bracketed)}});
  if (!(r.bracketed.converged && r.bracketed.in_brackets)) return kSolver;
  return kOk;
}

int cmd_derive_rules(const DeriveOptions& o) {
  if (o.unsafe_newton) return report_failure_mode(o);
  int status = kOk;
  for (wgq::RuleKind kind : kinds_from(o.kind)) {
    wgq::WeightedRule rule;
    if (o.family == "newton-cotes") rule = wgq::cardinal_newton_cotes_rule(o.degree, kind);
    else if (o.degree == 3 && kind == wgq::RuleKind::Stiffness) rule = wgq::cubic_stiffness_rule(o.omega1);
    else rule = wgq::gaussian_rule(o.degree, kind);

    json j = wgq::rule_json(rule);
    j["family"] = o.family;
    if (o.degree == 3 && kind == wgq::RuleKind::Stiffness && o.family == "gaussian") j["omega1"] = o.omega1;
    const std::string name = "rule_p" + std::to_string(o.degree) + "_" + o.family + "_" + wgq::to_string(kind) + ".json";
    wgq::write_json_file(path_in(o.out, name), j);

    std::cout << wgq::to_string(kind) << " p=" << o.degree << " " << o.family << '\n';
    for (std::size_t k = 0; k < rule.size(); ++k)
      std::cout << "  tau_" << k + 1 << " = " << format_double(rule.nodes[k]) << "  omega_" << k + 1 << " = "
                << format_double(rule.weights[k]) << '\n';
    std::cout << "  residual_max = " << format_double(rule.residual_max) << '\n';
    if (!(rule.residual_max <= o.residual_tol)) {
      std::cerr << "residual exceeds " << format_double(o.residual_tol) << '\n';
      status = kTolerance;
    }
  }
  return status;
}

// ---------------------------------------------------------------------------

int cmd_assemble(const AssembleOptions& o) {
  const wgq::TensorSpace space = wgq::TensorSpace::uniform(o.d, o.p, o.mesh);
  std::vector<double> scale = o.scale.empty() ? std::vector<double>(o.d, 1.0) : o.scale;
  if (static_cast<int>(scale.size()) != o.d) throw wgq::AssemblyError("--scale needs one value per direction");
  wgq::AffineMap map{scale, std::vector<double>(o.d, 0.0)};
  map.validate(o.d);

  const wgq::Strategy strategy = wgq::strategy_from_string(o.strategy);
  const wgq::RuleSource rules = wgq::RuleSource::for_strategy(strategy, space.degrees());
  wgq::EvalCounter counter;
  wgq::AssemblyOptions options;
  options.threads = o.threads;
  int status = kOk;

  for (wgq::RuleKind kind : kinds_from(o.kind)) {
    const wgq::SparseMatrix m = strategy == wgq::Strategy::StandardGauss
                                    ? wgq::assemble_standard_gauss(space, map, kind, &counter)
                                    : wgq::assemble_rowwise(space, map, kind, rules, &counter, options);
    const std::string base = wgq::to_string(kind);
    if (o.format == "mtx" || o.format == "both")
      wgq::write_matrix_market_file(path_in(o.out, base + ".mtx"), m,
                                    base + " matrix, d=" + std::to_string(o.d) + " p=" + std::to_string(o.p) +
                                        " mesh=" + std::to_string(o.mesh) + " strategy=" + o.strategy);
    if (o.format == "band" || o.format == "both")
      wgq::write_json_file(path_in(o.out, base + "_bands.json"), wgq::band_json(m, space));
    std::cout << base << ": " << m.rows() << "x" << m.rows() << ", nnz " << m.nnz() << '\n';

    if (o.check_oracle) {
      const double dev = m.max_abs_diff(wgq::assemble_oracle(space, map, kind));
      std::cout << base << " oracle deviation: " << format_double(dev) << '\n';
      if (!(dev <= o.oracle_tol)) {
        std::cerr << base << " deviation exceeds " << format_double(o.oracle_tol) << '\n';
        status = kTolerance;
      }
    }
  }
  wgq::write_json_file(path_in(o.out, "counters.json"), wgq::counter_json(counter));

  if (o.count_ratios) {
    json all = json::array();
    const double ceiling = std::pow((2.0 * o.p + 1.0) / (o.p + 1.0), o.d);
    for (wgq::RuleKind kind : kinds_from(o.kind)) {
      const wgq::CountRatios r = wgq::count_ratio(space, kind);
      std::cout << wgq::to_string(kind) << " count ratios: standard/gauss-weighted "
                << format_double(r.standard_over_gauss) << ", nc-weighted/gauss-weighted "
                << format_double(r.nc_over_gauss) << " (ceiling " << format_double(ceiling) << ")\n";
      all.push_back({{"kind", wgq::to_string(kind)},
                     {"standard_over_gauss_weighted", r.standard_over_gauss},
                     {"nc_over_gauss_weighted", r.nc_over_gauss},
                     {"ceiling", ceiling}});
      if (!(r.nc_over_gauss < ceiling)) status = kTolerance;
    }
    wgq::write_json_file(path_in(o.out, "count_ratios.json"), all);
  }
  return status;
}

// ---------------------------------------------------------------------------

int finish_report(const wgq::ConvergenceReport& r, const std::string& out, const std::string& stem) {
  write_text(path_in(out, stem + ".csv"), r.to_csv());
  wgq::write_json_file(path_in(out, stem + ".json"), r.to_json());
  for (std::size_t k = 0; k < r.meshes.size(); ++k)
    std::cout << "  mesh " << r.meshes[k] << "  h " << format_double(r.h[k]) << "  error "
              << format_double(r.errors[k]) << '\n';
  std::cout << r.study << " d=" << r.d << " p=" << r.degree << ": rate " << format_double(r.fit.rate)
            << " (expected " << format_double(r.expected_rate) << " +/- " << format_double(r.rate_tolerance)
            << ") " << (r.passed ? "PASS" : "FAIL") << '\n';
  return r.passed ? kOk : kTolerance;
}

int cmd_eig(const StudyOptions& o) {
  const auto r = wgq::run_eigen_convergence(o.d, o.p, o.index, o.meshes, wgq::strategy_from_string(o.strategy),
                                            o.rate_tol);
  return finish_report(r, o.out, "eig_convergence_d" + std::to_string(o.d) + "_p" + std::to_string(o.p));
}

int cmd_poisson(const StudyOptions& o) {
  const auto r = wgq::run_poisson_convergence(o.d, o.p, o.meshes, o.solution, wgq::strategy_from_string(o.strategy),
                                              o.rate_tol);
  return finish_report(r, o.out, "poisson_d" + std::to_string(o.d) + "_p" + std::to_string(o.p));
}

int cmd_spectrum(const StudyOptions& o) {
  const auto s = wgq::run_spectrum_comparison(o.p, o.mesh, wgq::strategy_from_string(o.strategy), o.curve_tol);
  const std::string stem = "spectrum_p" + std::to_string(o.p) + "_N" + std::to_string(o.mesh);
  write_text(path_in(o.out, stem + ".csv"), s.to_csv());
  wgq::write_json_file(path_in(o.out, stem + ".json"), s.to_json());
  std::cout << "spectrum p=" << o.p << " N=" << o.mesh << ": max curve difference "
            << format_double(s.max_curve_difference) << ", max matrix difference "
            << format_double(s.max_matrix_difference) << " " << (s.passed ? "PASS" : "FAIL") << '\n';
  return s.passed ? kOk : kTolerance;
}

// ---------------------------------------------------------------------------
// JSON config: keys are long option names of the selected subcommand.

std::string config_path(int argc, char** argv) {
  for (int k = 1; k < argc; ++k) {
    const std::string a = argv[k];
    if (a == "--config" && k + 1 < argc) return argv[k + 1];
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return {};
}

std::string config_value(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_array()) {
    std::string out;
    for (const auto& e : v) out += (out.empty() ? "" : ",") + config_value(e);
    return out;
  }
  return v.dump();
}

// Returns the argument list (without argv[0]) with config entries merged in;
// command-line values win.
std::vector<std::string> merge_config(CLI::App& app, int argc, char** argv) {
  std::vector<std::string> args;
  for (int k = 1; k < argc; ++k) {
    const std::string arg = argv[k];
    if (arg == "--config") {
      ++k;
      continue;
    }
    if (arg.rfind("--config=", 0) != 0) args.push_back(arg);
  }
  const std::string path = config_path(argc, argv);
  if (path.empty()) return args;
  std::ifstream is(path);
  if (!is) throw CLI::ValidationError("--config", "cannot open " + path);
  json cfg;
  try {
    cfg = json::parse(is);
  } catch (const json::exception& e) {
    throw CLI::ValidationError("--config", e.what());
  }
  if (!cfg.is_object()) throw CLI::ValidationError("--config", "config must be a JSON object");

  std::vector<std::string> chain;
  CLI::App* sub = &app;
  for (const auto& a : args) {
    CLI::App* next = nullptr;
    for (CLI::App* s : sub->get_subcommands({})) {
      if (s->get_name() == a) next = s;
    }
    if (next) sub = next;
  }
  if (sub == &app && cfg.contains("command")) {
    std::istringstream words(cfg["command"].get<std::string>());
    for (std::string w; words >> w;) {
      sub = sub->get_subcommand(w);
      chain.push_back(w);
    }
  }
  std::vector<std::string> extra;
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    if (it.key() == "command") continue;
    const std::string flag = "--" + it.key();
    CLI::Option* opt = sub->get_option_no_throw(flag);
    if (!opt || flag == "--config") throw CLI::ValidationError("--config", "unknown config key '" + it.key() + "'");
    bool given = false;
    for (const auto& a : args) given |= a == flag || a.rfind(flag + "=", 0) == 0;
    if (given) continue;
    if (it.value().is_boolean()) {
      if (it.value().get<bool>()) extra.push_back(flag);
      continue;
    }
    extra.push_back(flag);
    extra.push_back(config_value(it.value()));
  }
  args.insert(args.begin(), chain.begin(), chain.end());
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted Gaussian quadrature for uniform B-spline spaces: rule derivation, row-wise assembly, studies"};
  app.require_subcommand(1);
  std::string config;
  app.add_option("--config", config,
                 "JSON file whose keys are long option names of the subcommand (plus \"command\", e.g. "
                 "\"study poisson\"); unknown keys are rejected; may appear anywhere on the line");

  DeriveOptions derive;
  auto* d = app.add_subcommand("derive-rules", "Solve the exactness systems and write rule tables");
  d->add_option("--degree,-p", derive.degree, "Spline degree")->check(CLI::IsMember({2, 3}))->capture_default_str();
  d->add_option("--kind", derive.kind, "Rule kind")->check(CLI::IsMember({"mass", "stiffness", "both"}))->capture_default_str();
  d->add_option("--family", derive.family, "gaussian (p+1 free nodes) or newton-cotes (knots and midpoints)")
      ->check(CLI::IsMember({"gaussian", "newton-cotes"}))
      ->capture_default_str();
  d->add_option("--omega1", derive.omega1, "Free weight of the cubic stiffness family")->capture_default_str();
  d->add_option("--residual-tol", derive.residual_tol, "Maximum exactness residual")->capture_default_str();
  d->add_flag("--unsafe-newton", derive.unsafe_newton,
              "Run plain Newton on the cubic mass system from --start and report the roots found");
  d->add_option("--start", derive.start,
                "Initial guess for --unsafe-newton: (1/3, 5/3, 1, 1); paper-eq26 is an alias")
      ->check(CLI::IsMember({"poor-guess", "paper-eq26"}))
      ->capture_default_str();
  d->add_option("--out", derive.out, "Output directory")->capture_default_str();

  AssembleOptions assemble;
  auto* a = app.add_subcommand("assemble", "Assemble mass/stiffness matrices and evaluation counters");
  a->add_option("--d", assemble.d, "Dimension")->check(CLI::Range(1, 3))->capture_default_str();
  a->add_option("--p", assemble.p, "Spline degree (2 or 3 for weighted strategies)")->check(CLI::Range(1, 9))->capture_default_str();
  a->add_option("--mesh", assemble.mesh, "Elements per direction")->check(CLI::PositiveNumber)->capture_default_str();
  a->add_option("--strategy", assemble.strategy, "standard | nc-weighted | gauss-weighted")
      ->check(CLI::IsMember({"standard", "nc-weighted", "gauss-weighted"}))
      ->capture_default_str();
  a->add_option("--kind", assemble.kind, "Matrix kind")->check(CLI::IsMember({"mass", "stiffness", "both"}))->capture_default_str();
  a->add_option("--format", assemble.format, "Matrix output format")->check(CLI::IsMember({"mtx", "band", "both"}))->capture_default_str();
  a->add_option("--scale", assemble.scale, "Affine scale per direction (default 1)")->delimiter(',');
  a->add_flag("--check-oracle", assemble.check_oracle, "Compare against exact-integration assembly");
  a->add_option("--oracle-tol", assemble.oracle_tol, "Maximum entry deviation from the oracle")->capture_default_str();
  a->add_flag("--count-ratios", assemble.count_ratios, "Run all three strategies and report evaluation-count ratios");
  a->add_option("--threads", assemble.threads, "Assembly worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  a->add_option("--out", assemble.out, "Output directory")->capture_default_str();

  auto* s = app.add_subcommand("study", "Validation studies");
  s->require_subcommand(1);
  StudyOptions eig, spectrum, poisson;
  auto common = [](CLI::App* c, StudyOptions& o) {
    c->add_option("--strategy", o.strategy, "standard | nc-weighted | gauss-weighted")
        ->check(CLI::IsMember({"standard", "nc-weighted", "gauss-weighted"}))
        ->capture_default_str();
    c->add_option("--out", o.out, "Output directory")->capture_default_str();
  };
  auto rate_opts = [](CLI::App* c, StudyOptions& o) {
    c->add_option("--d", o.d, "Dimension")->check(CLI::Range(1, 3))->capture_default_str();
    c->add_option("--p", o.p, "Spline degree")->check(CLI::IsMember({2, 3}))->capture_default_str();
    c->add_option("--meshes", o.meshes, "Increasing elements per direction")->delimiter(',')->capture_default_str();
    c->add_option("--rate-tol", o.rate_tol,
                  "Allowed deviation of the fitted rate (default 0.3 for p=2, 0.4 for p=3)");
  };
  auto* se = s->add_subcommand("eig-convergence", "Relative error of one Dirichlet eigenvalue; expected rate 2p");
  rate_opts(se, eig);
  se->add_option("--index", eig.index, "Eigenvalue index (1-based, with multiplicity)")->check(CLI::PositiveNumber)->capture_default_str();
  common(se, eig);
  auto* ss = s->add_subcommand("spectrum", "1D spectrum, weighted rules against standard Gauss");
  ss->add_option("--p", spectrum.p, "Spline degree")->check(CLI::IsMember({2, 3}))->capture_default_str();
  ss->add_option("--mesh", spectrum.mesh, "Elements (at most 1200)")->check(CLI::Range(1, 1200))->capture_default_str();
  ss->add_option("--tol", spectrum.curve_tol, "Maximum relative eigenvalue difference between the curves")->capture_default_str();
  common(ss, spectrum);
  auto* sp = s->add_subcommand("poisson", "L2 error of a manufactured Poisson solution; expected rate p+1");
  rate_opts(sp, poisson);
  sp->add_option("--solution", poisson.solution, "Manufactured solution")->check(CLI::IsMember({"sine", "zero"}))->capture_default_str();
  common(sp, poisson);

  try {
    std::vector<std::string> args = merge_config(app, argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*d) return cmd_derive_rules(derive);
    if (*a) return cmd_assemble(assemble);
    if (*se) return cmd_eig(eig);
    if (*ss) return cmd_spectrum(spectrum);
    if (*sp) return cmd_poisson(poisson);
  } catch (const wgq::SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    for (const auto& at : e.diagnostics.attempts)
      std::cerr << "  start " << join(at.start) << " -> residual " << format_double(at.residual)
                << (at.in_brackets ? "" : " (outside brackets)") << '\n';
    return kSolver;
  } catch (const wgq::LinearSolveError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
  return kConfig;
}
