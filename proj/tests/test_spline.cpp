#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "generators.hpp"
#include "wgq/spline.hpp"

using namespace wgq;

TEST(KnotVector, UniformLayout) {
  const KnotVector kv = KnotVector::uniform(2, 4);
  EXPECT_EQ(kv.num_elements(), 4);
  EXPECT_TRUE(kv.is_uniform());
  const std::vector<double> expected{0, 0, 0, 0.25, 0.5, 0.75, 1, 1, 1};
  EXPECT_EQ(kv.knots(), expected);
  EXPECT_EQ(kv.find_element(0.0), 0);
  EXPECT_EQ(kv.find_element(0.25), 1);
  EXPECT_EQ(kv.find_element(1.0), 3);
}

TEST(KnotVector, FineUniformMeshStaysUniform) {
  EXPECT_TRUE(KnotVector::uniform(3, 1000).is_uniform());
  EXPECT_DOUBLE_EQ(KnotVector::uniform(3, 1000).element_width(517), 1e-3);
}

TEST(KnotVector, RejectsBadInput) {
  EXPECT_THROW(KnotVector(0, {0.0, 1.0}), SplineError);
  EXPECT_THROW(KnotVector(2, {0.0, 0.5, 0.5, 1.0}), SplineError);
  EXPECT_THROW(KnotVector(2, {0.1, 1.0}), SplineError);
  EXPECT_THROW(KnotVector(2, {0.0}), SplineError);
  EXPECT_FALSE(KnotVector(2, {0.0, 0.3, 1.0}).is_uniform());
}

TEST(SplineSpace, Dimension) {
  EXPECT_EQ(SplineSpace::uniform(2, 4).dim(), 6);
  EXPECT_EQ(SplineSpace::uniform(3, 4).dim(), 7);
  EXPECT_EQ(SplineSpace::uniform(3, 1000).dim(), 1003);
}

TEST(SplineSpace, EndpointInterpolation) {
  const SplineSpace s = SplineSpace::uniform(3, 5);
  EXPECT_DOUBLE_EQ(s.eval_basis(0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(s.eval_basis(s.dim() - 1, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(s.eval_basis(1, 0.0), 0.0);
}

TEST(SplineSpace, OutOfRangeArguments) {
  const SplineSpace s = SplineSpace::uniform(2, 4);
  EXPECT_THROW(s.eval_basis(-1, 0.5), SplineError);
  EXPECT_THROW(s.eval_basis(6, 0.5), SplineError);
  EXPECT_THROW(s.eval_basis(0, 1.5), SplineError);
}

// Partition of unity, nonnegativity, support and derivative consistency on
// random (also non-uniform) spaces.
TEST(SplineSpaceProperty, BasisIdentities) {
  gen::Source src(11);
  for (int c = 0; c < gen::kCases; ++c) {
    const int p = src.integer(1, 5);
    const int n = src.integer(1, 12);
    const SplineSpace s(KnotVector(p, c % 2 ? src.breakpoints(n) : KnotVector::uniform(p, n).breakpoints()));
    const double x = src.uniform(0.0, 1.0);
    double sum = 0.0, dsum = 0.0;
    for (int i = 0; i < s.dim(); ++i) {
      const double v = s.eval_basis(i, x);
      EXPECT_GE(v, -1e-15);
      const Interval sup = s.support(i);
      if (x < sup.lo || x > sup.hi) EXPECT_EQ(v, 0.0);
      sum += v;
      dsum += s.eval_deriv(i, x);
    }
    EXPECT_NEAR(sum, 1.0, 1e-14);
    EXPECT_NEAR(dsum, 0.0, 1e-10 * n);
  }
}

TEST(SplineSpaceProperty, DerivativeMatchesDifferenceQuotient) {
  gen::Source src(12);
  for (int c = 0; c < gen::kCases; ++c) {
    const int p = src.integer(2, 4);
    const int n = src.integer(2, 9);
    const SplineSpace s(KnotVector(p, src.breakpoints(n)));
    const int e = src.integer(0, n - 1);
    const double t = src.uniform(0.2, 0.8);
    const double x = s.knots().breakpoints()[e] + t * s.knots().element_width(e);
    const double step = 1e-6 * s.knots().element_width(e);
    for (int i = std::max(0, e); i <= e + p; ++i) {
      const double fd = (s.eval_basis(i, x + step) - s.eval_basis(i, x - step)) / (2 * step);
      EXPECT_NEAR(s.eval_deriv(i, x), fd, 1e-5 * (1 + std::abs(fd)));
    }
  }
}

TEST(SplineSpaceProperty, SpanAgreesWithPointwise) {
  gen::Source src(13);
  for (int c = 0; c < gen::kCases; ++c) {
    const int p = src.integer(1, 4);
    const int n = src.integer(1, 10);
    const SplineSpace s = SplineSpace::uniform(p, n);
    const double x = src.uniform(0.0, 1.0);
    const SpanValues sv = s.eval_span(x);
    for (int r = 0; r <= p; ++r) {
      EXPECT_NEAR(sv.values[r], s.eval_basis(sv.first + r, x), 1e-14);
      EXPECT_NEAR(sv.derivs[r], s.eval_deriv(sv.first + r, x), 1e-11 * n);
    }
  }
}

TEST(SplineSpace, SupportsAndInteraction) {
  const SplineSpace s = SplineSpace::uniform(2, 6);
  EXPECT_EQ(s.support_first_element(0), 0);
  EXPECT_EQ(s.support_end_element(0), 1);
  EXPECT_EQ(s.support_first_element(4), 2);
  EXPECT_EQ(s.support_end_element(4), 5);
  const std::vector<int> inter{1, 2, 3, 4, 5};
  EXPECT_EQ(s.interacting_indices(3), inter);
  const std::vector<int> edge{0, 1, 2};
  EXPECT_EQ(s.interacting_indices(0), edge);
}

TEST(SplineSpace, CardinalIndices) {
  const SplineSpace s = SplineSpace::uniform(3, 8);
  for (int j = 0; j < s.dim(); ++j) EXPECT_EQ(s.is_cardinal(j), j >= 3 && j <= 7) << j;
  EXPECT_FALSE(SplineSpace(KnotVector(2, {0.0, 0.3, 0.6, 1.0})).is_cardinal(2));
  // No interior weight when n < p + 1.
  const SplineSpace coarse = SplineSpace::uniform(3, 3);
  for (int j = 0; j < coarse.dim(); ++j) EXPECT_FALSE(coarse.is_cardinal(j));
}

TEST(SplineSpace, PieceExtrapolation) {
  // The piece of element e continues smoothly past its element.
  const SplineSpace s = SplineSpace::uniform(2, 7);
  const int j = 3;
  const double inside = s.eval_piece(j, 2, 0.999999);
  EXPECT_NEAR(inside, s.eval_piece(j, 3, 0.000001), 1e-5);
  EXPECT_EQ(s.eval_piece(0, 3, 0.5), 0.0);
}

TEST(CardinalPatch, MatchesUniformSpace) {
  for (int p : {2, 3}) {
    const CardinalPatch b(p);
    const int n = 3 * p + 1;
    const SplineSpace s = SplineSpace::uniform(p, n);
    const int j = 2 * p;  // support [p, 2p+1] in element units
    gen::Source src(20 + p);
    for (int c = 0; c < 50; ++c) {
      const double u = src.uniform(0.0, p + 1.0);
      const double x = (p + u) / n;
      EXPECT_NEAR(b.value(u), s.eval_basis(j, x), 1e-14);
      EXPECT_NEAR(b.deriv(u), s.eval_deriv(j, x) / n, 1e-12);
    }
    EXPECT_EQ(b.value(-0.5), 0.0);
    EXPECT_EQ(b.value(p + 1.5), 0.0);
    EXPECT_NEAR(b.value_shifted(2, 2.0 + (p + 1) / 2.0), b.value((p + 1) / 2.0), 1e-15);
  }
}

TEST(CardinalPatch, KnownValues) {
  const CardinalPatch q(2);
  EXPECT_DOUBLE_EQ(q.value(1.5), 0.75);
  EXPECT_DOUBLE_EQ(q.value(1.0), 0.5);
  EXPECT_DOUBLE_EQ(q.deriv(1.0), 1.0);
  const CardinalPatch c(3);
  EXPECT_NEAR(c.value(2.0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(c.value(1.0), 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(c.deriv(1.0), 0.5, 1e-15);
}
