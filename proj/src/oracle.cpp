#include "wgq/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

#include "gauss_legendre_table.hpp"

namespace wgq {

const char* to_string(RuleKind kind) {
  return kind == RuleKind::Mass ? "mass" : "stiffness";
}

namespace {

void verify_tables_once() {
  static std::once_flag flag;
  std::call_once(flag, [] {
    const double err = gauss_legendre_self_check();
    if (err > 1e-14)
      throw SplineError("embedded Gauss-Legendre tables fail the monomial check (err = " +
                        std::to_string(err) + ")");
  });
}

double integrate_product(const SplineSpace& space, RuleKind kind, int i, int j, int points) {
  const int lo = std::max(space.support_first_element(i), space.support_first_element(j));
  const int hi = std::min(space.support_end_element(i), space.support_end_element(j));
  if (lo >= hi) return 0.0;
  const int m = points > 0 ? points : space.degree() + 1;
  const GaussLegendreTable gl = gauss_legendre(m);
  double total = 0.0;
  for (int e = lo; e < hi; ++e) {
    double local = 0.0;
    for (int q = 0; q < m; ++q) {
      const SpanValues s = space.eval_span_local(e, gl.nodes[q]);
      const auto& v = kind == RuleKind::Mass ? s.values : s.derivs;
      local += gl.weights[q] * v[i - e] * v[j - e];
    }
    total += local * space.knots().element_width(e);
  }
  return total;
}

}  // namespace

GaussLegendreTable gauss_legendre(int m) {
  if (m < 1 || m > kMaxGaussPoints)
    throw SplineError("Gauss-Legendre table available for 1..10 points, got " + std::to_string(m));
  const auto& row = detail::kGaussLegendre01[m - 1];
  GaussLegendreTable t;
  t.count = m;
  t.nodes = std::span<const double>(row.nodes.data(), m);
  t.weights = std::span<const double>(row.weights.data(), m);
  return t;
}

double gauss_legendre_self_check() {
  double worst = 0.0;
  for (int m = 1; m <= kMaxGaussPoints; ++m) {
    const auto& row = detail::kGaussLegendre01[m - 1];
    for (int deg = 0; deg <= 2 * m - 1; ++deg) {
      double sum = 0.0;
      for (int q = 0; q < m; ++q) sum += row.weights[q] * std::pow(row.nodes[q], deg);
      worst = std::max(worst, std::abs(sum - 1.0 / (deg + 1)));
    }
  }
  return worst;
}

double exact_entry(const SplineSpace& space, RuleKind kind, int i, int j, int points) {
  verify_tables_once();
  if (i < 0 || i >= space.dim() || j < 0 || j >= space.dim())
    throw SplineError("basis index out of range");
  // Evaluate with the smaller index first so entry(i, j) == entry(j, i) bitwise.
  if (i > j) std::swap(i, j);
  return integrate_product(space, kind, i, j, points);
}

double exact_mass_entry(const SplineSpace& space, int i, int j, int points) {
  return exact_entry(space, RuleKind::Mass, i, j, points);
}

double exact_stiffness_entry(const SplineSpace& space, int i, int j, int points) {
  return exact_entry(space, RuleKind::Stiffness, i, j, points);
}

std::vector<double> exact_moment_vector(const SplineSpace& space, int j, RuleKind kind) {
  std::vector<double> out;
  for (int i : space.interacting_indices(j)) out.push_back(exact_entry(space, kind, i, j));
  return out;
}

double exact_basis_integral(const SplineSpace& space, int j) {
  verify_tables_once();
  const int m = space.degree() + 1;
  const GaussLegendreTable gl = gauss_legendre(m);
  double total = 0.0;
  for (int e = space.support_first_element(j); e < space.support_end_element(j); ++e) {
    double local = 0.0;
    for (int q = 0; q < m; ++q)
      local += gl.weights[q] * space.eval_span_local(e, gl.nodes[q]).values[j - e];
    total += local * space.knots().element_width(e);
  }
  return total;
}

std::vector<Rational> cardinal_moments(int degree, RuleKind kind) {
  if (degree == 2 && kind == RuleKind::Mass)
    return {{1, 120}, {13, 60}, {11, 20}, {13, 60}, {1, 120}};
  if (degree == 3 && kind == RuleKind::Mass)
    return {{1, 5040}, {1, 42}, {397, 1680}, {151, 315}, {397, 1680}, {1, 42}, {1, 5040}};
  // Off-diagonal stiffness moments are negative: the row sums to zero.
  if (degree == 2 && kind == RuleKind::Stiffness)
    return {{-1, 6}, {-1, 3}, {1, 1}, {-1, 3}, {-1, 6}};
  if (degree == 3 && kind == RuleKind::Stiffness)
    return {{-1, 120}, {-1, 5}, {-1, 8}, {2, 3}, {-1, 8}, {-1, 5}, {-1, 120}};
  throw SplineError("cardinal moments tabulated for p = 2, 3 only");
}

}  // namespace wgq
