#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wgq/spline.hpp"

namespace wgq {

enum class RuleKind { Mass, Stiffness };

const char* to_string(RuleKind kind);

// Gauss-Legendre rule on the reference element [0, 1].
struct GaussLegendreTable {
  int count = 0;
  std::span<const double> nodes;
  std::span<const double> weights;
};

constexpr int kMaxGaussPoints = 10;

// Embedded tables for m = 1..10, checked against monomial integrals on first
// use. Throws SplineError for m outside the table.
GaussLegendreTable gauss_legendre(int m);

// Largest monomial-integration error over the degrees each table claims to
// integrate exactly (degree <= 2m - 1), across all embedded tables.
double gauss_legendre_self_check();

// Exact univariate integrals of spline products, element by element. The
// default quadrature order is p + 1, which is exact for the integrands here;
// `points` overrides it (used for saturation checks).
double exact_mass_entry(const SplineSpace& space, int i, int j, int points = 0);
double exact_stiffness_entry(const SplineSpace& space, int i, int j, int points = 0);
double exact_entry(const SplineSpace& space, RuleKind kind, int i, int j, int points = 0);

// Right-hand side of the exactness system for weight j: one exact integral
// per interacting index (clipped at the boundary), in interacting order.
std::vector<double> exact_moment_vector(const SplineSpace& space, int j, RuleKind kind);

// Integral of B_j.
double exact_basis_integral(const SplineSpace& space, int j);

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
  constexpr double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// Signed cardinal moments for p in {2, 3}, unit spacing, ordered from
// i = j - p to i = j + p.
std::vector<Rational> cardinal_moments(int degree, RuleKind kind);

}  // namespace wgq
