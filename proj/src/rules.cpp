#include "wgq/rules.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace wgq {

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Central-difference step for node columns of the Jacobian. The residual is
// piecewise polynomial of degree <= 2p in each node, so the truncation error
// stays near 1e-11 while roundoff stays below 1e-10; Newton still converges
// to machine precision with such a Jacobian.
constexpr double kNodeFdStep = 1e-5;

// Zero test for weight-function values at candidate nodes, relative to the
// largest value on the support.
constexpr double kVanishTol = 1e-13;

struct FixedNodeSolution {
  std::vector<double> weights;
  double residual = 0.0;
  Eigen::Index rank = 0;
};

// Solves A w = rhs in the minimum-norm least-squares sense, with
// A(i, k) = basis(i, k) * weight_fn(k).
FixedNodeSolution solve_fixed_nodes(int rows, int cols,
                                    const std::function<double(int, int)>& basis,
                                    const std::function<double(int)>& weight_fn,
                                    const std::vector<double>& rhs) {
  Eigen::MatrixXd a(rows, cols);
  Eigen::VectorXd b(rows);
  for (int k = 0; k < cols; ++k) {
    const double w = weight_fn(k);
    for (int i = 0; i < rows; ++i) a(i, k) = basis(i, k) * w;
  }
  for (int i = 0; i < rows; ++i) b(i) = rhs[i];
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
  const Eigen::VectorXd w = cod.solve(b);
  FixedNodeSolution out;
  out.weights.assign(w.data(), w.data() + w.size());
  out.residual = (a * w - b).cwiseAbs().maxCoeff();
  out.rank = cod.rank();
  return out;
}

struct NodeCandidate {
  int element;
  double local;
};

std::vector<NodeCandidate> knot_midpoint_candidates(int first, int end, bool quarters) {
  std::vector<NodeCandidate> out;
  for (int e = first; e < end; ++e) {
    out.push_back({e, 0.0});
    if (quarters) out.push_back({e, 0.25});
    out.push_back({e, 0.5});
    if (quarters) out.push_back({e, 0.75});
  }
  out.push_back({end - 1, 1.0});
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

CardinalModel::CardinalModel(int p)
    : degree(p),
      space(SplineSpace::uniform(p, 3 * p + 1)),
      weight(2 * p),
      first_element(p),
      spacing(1.0 / (3 * p + 1)) {
  if (p != 2 && p != 3) throw RuleError("weighted Gaussian rules exist for p = 2, 3 only");
}

double CardinalModel::value(int i, int elem, double t) const {
  return space.eval_piece(i, first_element + elem, t);
}

double CardinalModel::deriv(int i, int elem, double t) const {
  return space.eval_piece_deriv(i, first_element + elem, t) * spacing;
}

double CardinalModel::basis_fn(RuleKind kind, int i, int elem, double t) const {
  return kind == RuleKind::Mass ? value(i, elem, t) : deriv(i, elem, t);
}

double CardinalModel::weight_fn(RuleKind kind, int elem, double t) const {
  return basis_fn(kind, weight, elem, t);
}

std::vector<double> CardinalModel::moments(RuleKind kind) const {
  std::vector<double> m = exact_moment_vector(space, weight, kind);
  const double scale = kind == RuleKind::Mass ? 1.0 / spacing : spacing;
  for (double& v : m) v *= scale;
  return m;
}

// ---------------------------------------------------------------------------

std::vector<double> effective_weights(const WeightedRule& rule) {
  if (!rule.is_cardinal()) throw RuleError("rule is bound to a space; pass the space");
  const CardinalModel model(rule.degree);
  std::vector<double> out(rule.size());
  for (std::size_t k = 0; k < rule.size(); ++k)
    out[k] = rule.weights[k] * model.weight_fn(rule.kind, rule.node_elements[k], rule.node_locals[k]);
  return out;
}

std::vector<double> effective_weights(const WeightedRule& rule, const SplineSpace& space) {
  if (rule.is_cardinal()) return effective_weights(rule);
  const int j = *rule.weight_index;
  std::vector<double> out(rule.size());
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const int e = rule.node_elements[k];
    const double t = rule.node_locals[k];
    const double w = rule.kind == RuleKind::Mass ? space.eval_piece(j, e, t)
                                                 : space.eval_piece_deriv(j, e, t);
    out[k] = rule.weights[k] * w;
  }
  return out;
}

std::vector<double> exactness_residuals(const WeightedRule& rule) {
  if (!rule.is_cardinal()) throw RuleError("rule is bound to a space; pass the space");
  const CardinalModel model(rule.degree);
  const std::vector<double> rhs = model.moments(rule.kind);
  const std::vector<double> eff = effective_weights(rule);
  std::vector<double> out;
  for (int r = 0; r < 2 * rule.degree + 1; ++r) {
    const int i = model.weight - rule.degree + r;
    double sum = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k)
      sum += eff[k] * model.basis_fn(rule.kind, i, rule.node_elements[k], rule.node_locals[k]);
    out.push_back(sum - rhs[r]);
  }
  return out;
}

std::vector<double> exactness_residuals(const WeightedRule& rule, const SplineSpace& space) {
  if (rule.is_cardinal()) return exactness_residuals(rule);
  const int j = *rule.weight_index;
  const std::vector<double> eff = effective_weights(rule, space);
  std::vector<double> out;
  for (int i : space.interacting_indices(j)) {
    double sum = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k) {
      const int e = rule.node_elements[k];
      const double t = rule.node_locals[k];
      const double b = rule.kind == RuleKind::Mass ? space.eval_piece(i, e, t)
                                                   : space.eval_piece_deriv(i, e, t);
      sum += eff[k] * b;
    }
    out.push_back(sum - exact_entry(space, rule.kind, i, j));
  }
  return out;
}

WeightedRule map_to_space(const WeightedRule& cardinal, const SplineSpace& space, int j) {
  if (!cardinal.is_cardinal()) throw RuleError("map_to_space expects a cardinal rule");
  if (cardinal.degree != space.degree()) throw RuleError("rule degree does not match the space");
  if (!space.is_cardinal(j)) throw RuleError("weight index is not an interior uniform function");
  const int e0 = j - space.degree();
  const auto& br = space.knots().breakpoints();
  WeightedRule out = cardinal;
  out.weight_index = j;
  for (std::size_t k = 0; k < cardinal.size(); ++k) {
    const int e = e0 + cardinal.node_elements[k];
    const double h = space.knots().element_width(e);
    out.node_elements[k] = e;
    out.nodes[k] = br[e] + cardinal.node_locals[k] * h;
    out.weights[k] = cardinal.weights[k] * h;
  }
  out.residual_max = max_abs(exactness_residuals(out, space));
  return out;
}

// ---------------------------------------------------------------------------

ResidualSystem ResidualSystem::gaussian(RuleKind kind, int degree) {
  ResidualSystem sys;
  sys.kind = kind;
  sys.degree = degree;
  sys.symmetric = true;
  sys.rhs = CardinalModel(degree).moments(kind);
  sys.fixed.assign(sys.parameter_count(), std::nullopt);
  const int m = degree + 1;
  if (m % 2 == 1) sys.fixed[sys.independent_nodes() - 1] = 0.5 * m;
  return sys;
}

int ResidualSystem::independent_nodes() const {
  const int m = degree + 1;
  return symmetric ? (m + 1) / 2 : m;
}

WeightedRule ResidualSystem::expand(const std::vector<double>& params) const {
  const int m = degree + 1;
  const int h = independent_nodes();
  WeightedRule rule;
  rule.kind = kind;
  rule.degree = degree;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  rule.node_elements.resize(m);
  rule.node_locals.resize(m);
  for (int k = 0; k < m; ++k) {
    double tau, omega;
    if (k < h) {
      tau = fixed[k].value_or(params[k]);
      omega = fixed[h + k].value_or(params[h + k]);
    } else {
      const int mirror = m - 1 - k;
      tau = (m - fixed[mirror].value_or(params[mirror]));
      omega = fixed[h + mirror].value_or(params[h + mirror]);
    }
    rule.nodes[k] = tau;
    rule.weights[k] = omega;
    rule.node_elements[k] = k;
    rule.node_locals[k] = tau - k;
  }
  return rule;
}

namespace {

std::vector<double> rule_residual(const ResidualSystem& sys, const CardinalModel& model,
                                  const WeightedRule& rule, int constraints) {
  std::vector<double> r(constraints);
  std::vector<double> eff(rule.size());
  for (std::size_t k = 0; k < rule.size(); ++k)
    eff[k] = rule.weights[k] * model.weight_fn(sys.kind, rule.node_elements[k], rule.node_locals[k]);
  for (int c = 0; c < constraints; ++c) {
    const int i = model.weight - sys.degree + c;
    double sum = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k)
      sum += eff[k] * model.basis_fn(sys.kind, i, rule.node_elements[k], rule.node_locals[k]);
    r[c] = sum - sys.rhs[c];
  }
  return r;
}

}  // namespace

std::vector<double> ResidualSystem::residual(const CardinalModel& model,
                                             const std::vector<double>& params) const {
  return rule_residual(*this, model, expand(params), symmetric ? degree + 1 : 2 * degree + 1);
}

std::vector<double> ResidualSystem::full_residual(const CardinalModel& model,
                                                  const std::vector<double>& params) const {
  return rule_residual(*this, model, expand(params), 2 * degree + 1);
}

NewtonAttempt newton_solve(const ResidualSystem& sys, const std::vector<double>& start,
                           const NewtonOptions& options) {
  if (static_cast<int>(start.size()) != sys.parameter_count())
    throw RuleError("start vector has the wrong length");
  if (sys.rhs.size() != static_cast<std::size_t>(2 * sys.degree + 1))
    throw RuleError("residual system needs 2p+1 moments");
  const CardinalModel model(sys.degree);
  const int nodes = sys.independent_nodes();

  std::vector<int> free;
  for (int s = 0; s < sys.parameter_count(); ++s)
    if (!sys.fixed[s]) free.push_back(s);

  std::vector<double> x = start;
  for (int s = 0; s < sys.parameter_count(); ++s)
    if (sys.fixed[s]) x[s] = *sys.fixed[s];

  auto project = [&](std::vector<double>& v) {
    if (!options.project_to_brackets) return;
    for (int s = 0; s < nodes; ++s)
      if (!sys.fixed[s]) v[s] = std::clamp(v[s], static_cast<double>(s), static_cast<double>(s + 1));
  };
  project(x);

  NewtonAttempt at;
  at.start = start;
  std::vector<double> r = sys.residual(model, x);
  const int rows = static_cast<int>(r.size());
  const int cols = static_cast<int>(free.size());

  for (int it = 0; it < options.max_iterations; ++it) {
    at.iterations = it + 1;
    Eigen::MatrixXd jac(rows, cols);
    for (int c = 0; c < cols; ++c) {
      const int s = free[c];
      std::vector<double> xp = x, xm = x;
      const double step = s < nodes ? kNodeFdStep : 1.0;
      xp[s] += step;
      xm[s] -= step;
      const std::vector<double> rp = sys.residual(model, xp);
      const std::vector<double> rm = sys.residual(model, xm);
      for (int q = 0; q < rows; ++q) jac(q, c) = (rp[q] - rm[q]) / (2.0 * step);
    }
    Eigen::VectorXd rv = Eigen::Map<const Eigen::VectorXd>(r.data(), rows);
    const Eigen::VectorXd dx = -jac.completeOrthogonalDecomposition().solve(rv);
    if (!dx.allFinite()) break;

    const double rnorm = max_abs(r);
    double scale = 1.0;
    for (int c = 0; c < cols; ++c) scale = std::max(scale, std::abs(x[free[c]]));
    if (rnorm <= options.residual_tol && dx.cwiseAbs().maxCoeff() <= options.step_tol * scale) {
      at.converged = true;
      break;
    }

    double lambda = 1.0;
    std::vector<double> trial;
    std::vector<double> rt;
    for (int halving = 0;; ++halving) {
      trial = x;
      for (int c = 0; c < cols; ++c) trial[free[c]] += lambda * dx(c);
      project(trial);
      rt = sys.residual(model, trial);
      if (!options.damped || max_abs(rt) < rnorm || halving >= options.max_halvings) break;
      lambda *= 0.5;
    }
    bool moved = false;
    for (int c = 0; c < cols; ++c) moved |= trial[free[c]] != x[free[c]];
    x = std::move(trial);
    r = std::move(rt);
    if (!moved) {
      at.converged = max_abs(r) <= options.residual_tol;
      break;
    }
  }

  at.params = x;
  at.rule = sys.expand(x);
  at.residual = max_abs(sys.full_residual(model, x));
  at.rule.residual_max = at.residual;
  at.converged = at.converged && at.residual <= options.residual_tol;
  at.in_brackets = true;
  for (std::size_t k = 0; k < at.rule.size(); ++k) {
    const double t = at.rule.node_locals[k];
    if (!(t > 0.0 && t < 1.0)) at.in_brackets = false;
  }
  for (double w : at.rule.weights)
    if (!(w > 0.0)) at.positive_weights = false;
  return at;
}

std::vector<std::vector<double>> default_starts(const ResidualSystem& sys) {
  const int nodes = sys.independent_nodes();
  std::vector<int> free_nodes;
  for (int s = 0; s < nodes; ++s)
    if (!sys.fixed[s]) free_nodes.push_back(s);
  std::vector<double> base(sys.parameter_count(), 1.0);
  for (int s = 0; s < nodes; ++s) base[s] = s + 0.5;

  constexpr int kOffsets = static_cast<int>(std::size(kStartOffsets));
  int total = 1;
  for (std::size_t q = 0; q < free_nodes.size(); ++q) total *= kOffsets;
  std::vector<std::vector<double>> starts;
  for (int code = 0; code < total; ++code) {
    std::vector<double> s = base;
    int rest = code;
    for (int q = static_cast<int>(free_nodes.size()) - 1; q >= 0; --q) {
      s[free_nodes[q]] += kStartOffsets[rest % kOffsets];
      rest /= kOffsets;
    }
    starts.push_back(std::move(s));
  }
  return starts;
}

WeightedRule solve_residual_system(const ResidualSystem& sys,
                                   const std::vector<std::vector<double>>& starts,
                                   SolveDiagnostics* diagnostics) {
  SolveDiagnostics diag;
  diag.best_residual = std::numeric_limits<double>::infinity();
  for (const auto& start : starts) {
    NewtonAttempt at = newton_solve(sys, start);
    diag.best_residual = std::min(diag.best_residual, at.residual);
    const bool accepted = at.converged && at.in_brackets &&
                          (sys.kind != RuleKind::Mass || at.positive_weights);
    diag.attempts.push_back(at);
    if (accepted) {
      if (diagnostics) *diagnostics = diag;
      return at.rule;
    }
  }
  if (diagnostics) *diagnostics = diag;
  std::ostringstream msg;
  msg.precision(3);
  msg << "no bracket-respecting root for the " << to_string(sys.kind) << " system, p = "
      << sys.degree << ", after " << starts.size() << " starts; best residual "
      << diag.best_residual;
  throw SolverFailure(msg.str(), std::move(diag));
}

// ---------------------------------------------------------------------------

WeightedRule quadratic_mass_rule() {
  const CardinalModel model(2);
  const std::vector<double> m = model.moments(RuleKind::Mass);
  const double m0 = m[0], m1 = m[1], m2 = m[2];

  // Node tau in element 0 sees B_{j-2} = (1-tau)^2/2, B_{j-1} = (-2tau^2+2tau+1)/2,
  // B_j = tau^2/2; the pinned middle node sees B_j = a, B_{j-1} = b. Eliminating
  // the weights leaves a quadratic in tau.
  const CardinalPatch patch(2);
  const double a = patch.value(1.5);
  const double b = patch.value(2.5);
  const double r = b / a;
  const double big = m1 - r * m2;
  const double c2 = big + m0 * (2.0 + 2.0 * r);
  const double c1 = -2.0 * big - 2.0 * m0;
  const double c0 = big - m0;
  const double disc = c1 * c1 - 4.0 * c2 * c0;
  if (disc < 0.0) throw RuleError("quadratic mass elimination has no real root");
  const double q = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
  double tau = 2.0;
  for (double root : {q / c2, c0 / q})
    if (root > 0.0 && root < 1.0) tau = std::min(tau, root);
  if (tau >= 1.0) throw RuleError("quadratic mass elimination has no root in (0, 1)");

  const double one_minus = 1.0 - tau;
  const double omega1 = 4.0 * m0 / (tau * tau * one_minus * one_minus);
  const double omega2 = (m2 - 0.5 * omega1 * tau * tau * tau * tau) / (a * a);

  ResidualSystem sys = ResidualSystem::gaussian(RuleKind::Mass, 2);
  const std::vector<double> params = {tau, 1.5, omega1, omega2};
  WeightedRule rule = sys.expand(params);
  rule.residual_max = max_abs(sys.full_residual(model, params));
  return rule;
}

WeightedRule cubic_mass_rule(SolveDiagnostics* diagnostics) {
  const ResidualSystem sys = ResidualSystem::gaussian(RuleKind::Mass, 3);
  return solve_residual_system(sys, default_starts(sys), diagnostics);
}

WeightedRule quadratic_stiffness_rule() {
  const CardinalModel model(2);
  const std::vector<double> s = model.moments(RuleKind::Stiffness);
  // In element 0: B'_{j-2} = -(1-tau), B'_{j-1} = 1-2tau, B'_j = tau, and only
  // the first node touches B_{j-2}, B_{j-1}. The two constraints fix tau by
  // their ratio. The middle node sits where B'_j vanishes, so its weight is
  // free; it takes the outer weight as in the published rule.
  const double q = s[1] / s[0];
  const double tau = (q + 1.0) / (q + 2.0);
  const double omega = -s[0] / (tau * (1.0 - tau));

  ResidualSystem sys = ResidualSystem::gaussian(RuleKind::Stiffness, 2);
  const std::vector<double> params = {tau, 1.5, omega, omega};
  WeightedRule rule = sys.expand(params);
  rule.residual_max = max_abs(sys.full_residual(model, params));
  return rule;
}

std::vector<double> cubic_stiffness_quartic_roots(double omega1) {
  // 30 w x^2 (1-x)^2 = 1  <=>  x (1-x) = 1 / sqrt(30 w) for the roots in (0, 1).
  if (!(omega1 > 0.0)) return {};
  const double s = 1.0 / std::sqrt(30.0 * omega1);
  const double disc = 1.0 - 4.0 * s;
  if (disc < 0.0) return {};
  const double root = std::sqrt(disc);
  // Smaller root via s / larger root to avoid cancellation.
  const double larger = 0.5 * (1.0 + root);
  return {s / larger, larger};
}

WeightedRule cubic_stiffness_rule(double omega1) {
  const std::vector<double> roots = cubic_stiffness_quartic_roots(omega1);
  if (roots.empty()) {
    std::ostringstream msg;
    msg << "quartic 30x^4 w - 60x^3 w + 30x^2 w - 1 has no root in (0, 1) for w = " << omega1
        << " (need w >= 8/15)";
    throw RuleError(msg.str());
  }
  ResidualSystem sys = ResidualSystem::gaussian(RuleKind::Stiffness, 3);
  sys.fixed[0] = roots.front();
  sys.fixed[sys.independent_nodes()] = omega1;
  return solve_residual_system(sys, default_starts(sys));
}

WeightedRule gaussian_rule(int degree, RuleKind kind) {
  if (degree == 2) return kind == RuleKind::Mass ? quadratic_mass_rule() : quadratic_stiffness_rule();
  if (degree == 3) return kind == RuleKind::Mass ? cubic_mass_rule() : cubic_stiffness_rule();
  throw RuleError("weighted Gaussian rules exist for p = 2, 3 only");
}

// ---------------------------------------------------------------------------

WeightedRule newton_cotes_weighted_rule(const SplineSpace& space, int j, RuleKind kind) {
  if (!space.knots().is_uniform()) throw RuleError("Newton-Cotes weighted rules need a uniform space");
  const std::vector<int> rows = space.interacting_indices(j);
  const std::vector<double> rhs = exact_moment_vector(space, j, kind);
  const int first = space.support_first_element(j);
  const int end = space.support_end_element(j);
  auto eval = [&](int i, const NodeCandidate& c) {
    return kind == RuleKind::Mass ? space.eval_piece(i, c.element, c.local)
                                  : space.eval_piece_deriv(i, c.element, c.local);
  };
  const double tol = 1e-12 * std::max(1.0, max_abs(rhs));

  for (bool quarters : {false, true}) {
    std::vector<NodeCandidate> all = knot_midpoint_candidates(first, end, quarters);
    double wmax = 0.0;
    for (const auto& c : all) wmax = std::max(wmax, std::abs(eval(j, c)));
    std::vector<NodeCandidate> nodes;
    for (const auto& c : all)
      if (std::abs(eval(j, c)) > kVanishTol * wmax) nodes.push_back(c);

    const FixedNodeSolution sol = solve_fixed_nodes(
        static_cast<int>(rows.size()), static_cast<int>(nodes.size()),
        [&](int r, int k) { return eval(rows[r], nodes[k]); },
        [&](int k) { return eval(j, nodes[k]); }, rhs);
    if (sol.residual > tol) continue;

    WeightedRule rule;
    rule.kind = kind;
    rule.degree = space.degree();
    rule.weight_index = j;
    rule.weights = sol.weights;
    for (const auto& c : nodes) {
      rule.node_elements.push_back(c.element);
      rule.node_locals.push_back(c.local);
      rule.nodes.push_back(space.knots().breakpoints()[c.element] +
                           c.local * space.knots().element_width(c.element));
    }
    rule.residual_max = max_abs(exactness_residuals(rule, space));
    return rule;
  }
  throw RuleError("Newton-Cotes weighted system is singular for weight " + std::to_string(j));
}

WeightedRule cardinal_newton_cotes_rule(int degree, RuleKind kind) {
  const CardinalModel model(degree);
  const std::vector<double> rhs = model.moments(kind);
  const int p = degree;
  std::vector<NodeCandidate> all = knot_midpoint_candidates(0, p + 1, false);
  double wmax = 0.0;
  for (const auto& c : all) wmax = std::max(wmax, std::abs(model.weight_fn(kind, c.element, c.local)));
  std::vector<NodeCandidate> nodes;
  for (const auto& c : all)
    if (std::abs(model.weight_fn(kind, c.element, c.local)) > kVanishTol * wmax) nodes.push_back(c);

  const FixedNodeSolution sol = solve_fixed_nodes(
      2 * p + 1, static_cast<int>(nodes.size()),
      [&](int r, int k) {
        return model.basis_fn(kind, model.weight - p + r, nodes[k].element, nodes[k].local);
      },
      [&](int k) { return model.weight_fn(kind, nodes[k].element, nodes[k].local); }, rhs);
  if (sol.residual > 1e-12 || sol.rank < static_cast<Eigen::Index>(nodes.size()))
    throw RuleError("cardinal Newton-Cotes weighted system is singular");

  WeightedRule rule;
  rule.kind = kind;
  rule.degree = degree;
  rule.weights = sol.weights;
  for (const auto& c : nodes) {
    rule.node_elements.push_back(c.element);
    rule.node_locals.push_back(c.local);
    rule.nodes.push_back(c.element + c.local);
  }
  rule.residual_max = max_abs(exactness_residuals(rule));
  return rule;
}

FailureModeReport cubic_mass_failure_mode(const std::vector<double>& start,
                                          const std::vector<double>& reference) {
  const ResidualSystem sys = ResidualSystem::gaussian(RuleKind::Mass, 3);
  NewtonOptions plain;
  plain.damped = false;
  plain.project_to_brackets = false;

  FailureModeReport out;
  out.unsafe = newton_solve(sys, start, plain);
  out.polished = newton_solve(sys, reference, plain);
  out.bracketed = newton_solve(sys, start, NewtonOptions{});
  out.reference_is_root = out.polished.converged && out.polished.residual <= 1e-12;
  out.reference_rejected = !out.polished.in_brackets;
  return out;
}

}  // namespace wgq
