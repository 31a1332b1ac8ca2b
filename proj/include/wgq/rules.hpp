#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wgq/oracle.hpp"
#include "wgq/spline.hpp"

namespace wgq {

class RuleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Quadrature rule attached to one weight function W (B_j for mass rules,
// B'_j for stiffness rules):
//
//   integral of B_i * W  ~=  sum_k weights[k] * B_i(node_k) * W(node_k)
//
// with B_i replaced by B'_i for stiffness rules. Weights multiply the full
// product, so effective_weights() is what an assembler multiplies B_i by.
//
// Cardinal rules (no weight_index) live on unit-spaced integer knots with
// the weight supported on [0, p+1]; node_elements are offsets from the start
// of that support. Rules bound to a concrete space carry absolute element
// indices and physical weights.
struct WeightedRule {
  RuleKind kind = RuleKind::Mass;
  int degree = 0;
  std::optional<int> weight_index;
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<int> node_elements;
  std::vector<double> node_locals;
  double residual_max = 0.0;

  bool is_cardinal() const { return !weight_index.has_value(); }
  std::size_t size() const { return nodes.size(); }
};

// Reference space used for cardinal rules: uniform, 3p+1 elements, weight
// index 2p, so the weight and all 2p+1 interacting functions are cardinal.
struct CardinalModel {
  explicit CardinalModel(int degree);

  int degree;
  SplineSpace space;
  int weight;         // index of the weight function in `space`
  int first_element;  // first element of its support
  double spacing;

  // Basis value / derivative of space function i on the polynomial piece of
  // support element `elem` (offset), at local coordinate t, in unit-spacing
  // units. t may leave [0, 1], which extrapolates the piece.
  double value(int i, int elem, double t) const;
  double deriv(int i, int elem, double t) const;
  double weight_fn(RuleKind kind, int elem, double t) const;
  double basis_fn(RuleKind kind, int i, int elem, double t) const;

  // Exact moments against the weight in unit-spacing units, i = j-p .. j+p.
  std::vector<double> moments(RuleKind kind) const;
};

// Weight function values at the rule's nodes times the rule weights.
std::vector<double> effective_weights(const WeightedRule& rule);
std::vector<double> effective_weights(const WeightedRule& rule, const SplineSpace& space);

// Quadrature sum minus exact moment, for every interacting index.
std::vector<double> exactness_residuals(const WeightedRule& rule);
std::vector<double> exactness_residuals(const WeightedRule& rule, const SplineSpace& space);

// Maps a cardinal rule onto the support of interior weight j of a uniform
// space: nodes scale by h and shift, weights scale by h (both kinds, since
// the rule multiplies physical derivative values).
WeightedRule map_to_space(const WeightedRule& cardinal, const SplineSpace& space, int j);

// ---------------------------------------------------------------------------
// Nonlinear exactness systems.

// Which rule components are unknowns. With `symmetric`, node k and node
// m-1-k are mirrored about the support midpoint and share a weight; an odd
// middle node is pinned to the midpoint.
struct ResidualSystem {
  RuleKind kind = RuleKind::Mass;
  int degree = 2;
  bool symmetric = true;
  // Moments in unit-spacing units, i = j-p .. j+p (from CardinalModel).
  std::vector<double> rhs;
  // Parameter slots fixed to a value: nodes are slots 0..h-1 and weights
  // h..2h-1 where h is the number of independent nodes.
  std::vector<std::optional<double>> fixed;

  static ResidualSystem gaussian(RuleKind kind, int degree);

  int independent_nodes() const;
  int parameter_count() const { return 2 * independent_nodes(); }

  // Expands the parameter vector into a full (node, weight) rule. Node k is
  // assigned to support element k: its basis values come from that
  // element's polynomial piece even when it lies outside [k, k+1].
  WeightedRule expand(const std::vector<double>& params) const;

  // Reduced residual (constraints i = j-p .. j when symmetric, all 2p+1
  // otherwise).
  std::vector<double> residual(const CardinalModel& model, const std::vector<double>& params) const;
  // Residual over all 2p+1 constraints.
  std::vector<double> full_residual(const CardinalModel& model,
                                    const std::vector<double>& params) const;
};

struct NewtonOptions {
  bool damped = true;
  bool project_to_brackets = true;
  int max_iterations = 100;
  int max_halvings = 40;
  double residual_tol = 1e-13;
  double step_tol = 1e-14;
};

struct NewtonAttempt {
  std::vector<double> start;
  std::vector<double> params;
  int iterations = 0;
  bool converged = false;
  bool in_brackets = false;
  bool positive_weights = true;
  double residual = 0.0;  // over all 2p+1 constraints
  WeightedRule rule;
};

NewtonAttempt newton_solve(const ResidualSystem& sys, const std::vector<double>& start,
                           const NewtonOptions& options = {});

// Default multi-start grid: every free node starts at its element midpoint
// plus one of {0, -0.2, +0.2, -0.35, +0.35} element widths (first free node
// varies slowest), free weights start at 1.
std::vector<std::vector<double>> default_starts(const ResidualSystem& sys);
inline constexpr double kStartOffsets[] = {0.0, -0.2, 0.2, -0.35, 0.35};

struct SolveDiagnostics {
  std::vector<NewtonAttempt> attempts;
  double best_residual = 0.0;
};

class SolverFailure : public RuleError {
 public:
  SolverFailure(const std::string& what, SolveDiagnostics diag)
      : RuleError(what), diagnostics(std::move(diag)) {}
  SolveDiagnostics diagnostics;
};

// Bracketed, damped multi-start Newton. The first converged root whose nodes
// stay inside their elements (and, for mass systems, has positive weights)
// wins. Throws SolverFailure when every start is exhausted.
WeightedRule solve_residual_system(const ResidualSystem& sys,
                                   const std::vector<std::vector<double>>& starts,
                                   SolveDiagnostics* diagnostics = nullptr);

// ---------------------------------------------------------------------------
// Published rule families for interior cardinal weights.

WeightedRule quadratic_mass_rule();
WeightedRule cubic_mass_rule(SolveDiagnostics* diagnostics = nullptr);
WeightedRule quadratic_stiffness_rule();
WeightedRule cubic_stiffness_rule(double omega1 = 1.0);

// Both admissible roots of 30 w x^4 - 60 w x^3 + 30 w x^2 - 1 = 0 in (0, 1),
// ascending. Empty when w is too small for a root to exist.
std::vector<double> cubic_stiffness_quartic_roots(double omega1);

WeightedRule gaussian_rule(int degree, RuleKind kind);

// Cubic mass system from a poor initial guess. `unsafe` is plain Newton
// (no damping, no projection) from `start`; `polished` is plain Newton from
// `reference`, an out-of-bracket root; `bracketed` is the damped, projected
// solver from `start`. Parameters are (tau1, tau2, omega1, omega2).
struct FailureModeReport {
  NewtonAttempt unsafe;
  NewtonAttempt polished;
  NewtonAttempt bracketed;
  bool reference_is_root = false;
  bool reference_rejected = false;
};

inline constexpr double kCubicMassPoorStart[] = {1.0 / 3.0, 5.0 / 3.0, 1.0, 1.0};
inline constexpr double kCubicMassOutOfBracketRoot[] = {0.75698683155927590528, 2.30382606794266282352,
                                                        1.14740718959367949323, 0.74428414202245775486};

FailureModeReport cubic_mass_failure_mode(const std::vector<double>& start,
                                          const std::vector<double>& reference);

// Newton-Cotes-type weighted rule with nodes at the knots and element
// midpoints of supp(B_j) where W does not vanish; weights solve the linear
// exactness system. Boundary weights whose node set is too small to be
// exact get quarter points added.
WeightedRule newton_cotes_weighted_rule(const SplineSpace& space, int j, RuleKind kind);
// Cardinal version for interior weights.
WeightedRule cardinal_newton_cotes_rule(int degree, RuleKind kind);

}  // namespace wgq
