#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "wgq/assembly.hpp"
#include "wgq/io.hpp"
#include "wgq/rules.hpp"
#include "wgq/validation.hpp"

using namespace wgq;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Published rule components (tau1, tau2, omega1, omega2), 20 digits.
struct Published {
  const char* name;
  WeightedRule (*make)();
  double values[4];
};

const Published kPublished[] = {
    {"quadratic mass", [] { return quadratic_mass_rule(); },
     {0.71241440095955149482, 1.5, 0.79410713110801847176, 0.79595121334251753503}},
    {"cubic mass", [] { return cubic_mass_rule(); },
     {0.72289886179270511319, 1.58789880583487289415, 0.88863704203309628490, 0.83494225417405959060}},
    {"quadratic stiffness", [] { return quadratic_stiffness_rule(); }, {0.75, 1.5, 8.0 / 9.0, 8.0 / 9.0}},
    {"cubic stiffness", [] { return cubic_stiffness_rule(1.0); },
     {0.24033518882038592858, 1.16015740029939774803, 1.0, 0.86030876544418464920}},
};

constexpr double kCubicMassRoot[] = {0.72289886179270511319, 1.58789880583487289415, 0.88863704203309628490,
                                     0.83494225417405959060};

Outcome rule_regression() {
  double worst = 0.0;
  for (const Published& p : kPublished) {
    const WeightedRule r = p.make();
    const double got[] = {r.nodes[0], r.nodes[1], r.weights[0], r.weights[1]};
    for (int k = 0; k < 4; ++k) worst = std::max(worst, std::abs(got[k] - p.values[k]));
  }
  return {worst <= 1e-12, "max component deviation " + fmt(worst) + " (tol 1e-12)"};
}

Outcome exactness_suite() {
  std::vector<WeightedRule> rules;
  for (int p : {2, 3})
    for (RuleKind kind : {RuleKind::Mass, RuleKind::Stiffness}) {
      rules.push_back(gaussian_rule(p, kind));
      rules.push_back(cardinal_newton_cotes_rule(p, kind));
    }
  for (double w : {0.9, 1.0, 1.1}) rules.push_back(cubic_stiffness_rule(w));
  double worst = 0.0;
  bool complete = true;
  for (const WeightedRule& r : rules) {
    const std::vector<double> res = exactness_residuals(r);
    complete &= res.size() == static_cast<std::size_t>(2 * r.degree + 1);
    worst = std::max(worst, max_abs(res));
  }
  return {complete && worst <= 1e-12,
          std::to_string(rules.size()) + " rules, max residual " + fmt(worst) + " (tol 1e-12)"};
}

Outcome matrix_equivalence() {
  double worst = 0.0;
  for (int p : {2, 3})
    for (auto [d, n] : {std::pair{1, 1000}, std::pair{2, 64}}) {
      const TensorSpace s = TensorSpace::uniform(d, p, n);
      const AffineMap map = AffineMap::identity(d);
      for (RuleKind kind : {RuleKind::Mass, RuleKind::Stiffness}) {
        const SparseMatrix w = assemble_rowwise(s, map, kind, RuleSource::gaussian(s.degrees()));
        worst = std::max(worst, w.max_abs_diff(assemble_oracle(s, map, kind)));
      }
    }
  return {worst <= 1e-12, "1D N=1000 and 2D 64x64, p=2,3: max entry difference " + fmt(worst) + " (tol 1e-12)"};
}

Outcome spectrum_overlay() {
  double curve = 0.0, matrix = 0.0;
  for (int p : {2, 3}) {
    const SpectrumComparison s = run_spectrum_comparison(p, 1000);
    curve = std::max(curve, s.max_curve_difference);
    matrix = std::max(matrix, s.max_matrix_difference);
  }
  return {curve <= 1e-9, "1D N=1000, p=2,3: max relative eigenvalue difference " + fmt(curve) +
                             " (tol 1e-9), max matrix difference " + fmt(matrix)};
}

Outcome eigen_convergence() {
  bool ok = true;
  std::string detail;
  for (int p : {2, 3}) {
    const double tol = p == 2 ? 0.3 : 0.4;
    const ConvergenceReport r1 = run_eigen_convergence(1, p, 1, {8, 16, 32, 64});
    const ConvergenceReport r2 = run_eigen_convergence(2, p, 10, {8, 16, 32, 64});
    const ConvergenceReport r3 = run_eigen_convergence(3, p, 10, {6, 8, 10, 12});
    const bool a = std::abs(r1.fit.rate - 2 * p) <= tol;
    const bool b = std::abs(r2.fit.rate - 2 * p) <= tol;
    const bool c = r3.monotone && r3.fit.rate >= 2 * p - 1;
    ok &= a && b && c;
    detail += "p=" + std::to_string(p) + ": 1D " + fmt(r1.fit.rate) + ", 2D " + fmt(r2.fit.rate) + " (2p+/-" +
              fmt(tol) + "), 3D " + fmt(r3.fit.rate) + (r3.monotone ? " monotone" : " NOT monotone") + "; ";
  }
  return {ok, detail};
}

Outcome count_ratios_check() {
  bool ok = true;
  std::string detail;
  const double lo[] = {1.93, 2.29}, hi[] = {2.23, 2.59};
  for (int p : {2, 3}) {
    const CountRatios r = count_ratio(TensorSpace::uniform(2, p, 100), RuleKind::Mass);
    const double ceiling = std::pow((2.0 * p + 1) / (p + 1), 2);
    const bool in = r.nc_over_gauss >= lo[p - 2] && r.nc_over_gauss <= hi[p - 2] && r.nc_over_gauss < ceiling;
    ok &= in;
    detail += "p=" + std::to_string(p) + ": " + fmt(r.nc_over_gauss) + " in [" + fmt(lo[p - 2]) + ", " +
              fmt(hi[p - 2]) + "], ceiling " + fmt(ceiling) + "; ";
  }
  return {ok, detail};
}

Outcome failure_mode() {
  const std::vector<double> start(std::begin(kCubicMassPoorStart), std::end(kCubicMassPoorStart));
  const std::vector<double> ref(std::begin(kCubicMassOutOfBracketRoot), std::end(kCubicMassOutOfBracketRoot));
  const FailureModeReport r = cubic_mass_failure_mode(start, ref);

  auto dist = [](const std::vector<double>& x, const double* y) {
    double m = 0.0;
    for (int k = 0; k < 4; ++k) m = std::max(m, std::abs(x[k] - y[k]));
    return m;
  };
  // (a) plain Newton from the poor guess lands on the out-of-bracket root.
  const double da = dist(r.unsafe.params, kCubicMassOutOfBracketRoot);
  const bool a = r.unsafe.converged && !r.unsafe.in_brackets && da <= 1e-9;
  // (b) that root is genuine, the bracket filter rejects it, and the
  // bracketed solver still finds the in-bracket rule from the same guess.
  const double dref = dist(r.polished.params, kCubicMassOutOfBracketRoot);
  const double db = dist(r.bracketed.params, kCubicMassRoot);
  const bool b = r.reference_is_root && r.reference_rejected && dref <= 1e-9 && r.bracketed.converged &&
                 r.bracketed.in_brackets && db <= 1e-12;
  std::string detail = std::string("(a) plain Newton ") + (r.unsafe.converged ? "converged" : "diverged") +
                       ", tau2 " + fmt(r.unsafe.params[1]) + ", distance " + fmt(da) + (a ? " PASS" : " FAIL") +
                       "; (b) out-of-bracket root residual " + fmt(r.polished.residual) +
                       (r.reference_rejected ? ", rejected" : ", accepted") + ", bracketed solver distance " +
                       fmt(db) + (b ? " PASS" : " FAIL");
  return {a && b, detail};
}

Outcome quartic_family() {
  const WeightedRule r = cubic_stiffness_rule(1.0);
  const double x = r.nodes[0];
  const double poly = std::abs(30 * std::pow(x, 4) - 60 * std::pow(x, 3) + 30 * x * x - 1);
  const double closed = 0.5 - std::sqrt(225 - 30 * std::sqrt(30.0)) / 30;
  const double dev = std::abs(x - closed);
  return {poly <= 1e-12 && dev <= 1e-12,
          "quartic residual " + fmt(poly) + ", closed-form deviation " + fmt(dev) + " (tol 1e-12)"};
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "rule regression", rule_regression},
      {2, "exactness suite", exactness_suite},
      {3, "matrix equivalence", matrix_equivalence},
      {4, "spectrum overlay", spectrum_overlay},
      {5, "eigenvalue convergence", eigen_convergence},
      {6, "evaluation-count ratios", count_ratios_check},
      {7, "failure-mode reproduction", failure_mode},
      {8, "quartic family", quartic_family},
  };
  std::vector<int> selected;
  for (int k = 1; k < argc; ++k) selected.push_back(std::atoi(argv[k]));

  bool ok = true;
  for (const Criterion& c : all) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d %s: %s (%s) [%.1fs]\n", c.id, c.title, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    ok &= o.pass;
  }
  return ok ? 0 : 1;
}
