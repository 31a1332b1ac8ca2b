#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "wgq/assembly.hpp"
#include "wgq/oracle.hpp"

using namespace wgq;

namespace {

std::vector<int> degrees_of(int d, int p) { return std::vector<int>(d, p); }

bool interior_row(const TensorSpace& space, int r) {
  const auto idx = space.multi_index(r);
  for (int k = 0; k < space.d(); ++k)
    if (!space.direction(k).is_cardinal(idx[k])) return false;
  return true;
}

}  // namespace

TEST(TensorSpace, IndexingRoundTrip) {
  const TensorSpace s = TensorSpace::uniform(3, 2, 3);
  EXPECT_EQ(s.num_dofs(), 125);
  for (int r = 0; r < s.num_dofs(); ++r) EXPECT_EQ(s.linear_index(s.multi_index(r)), r);
  const std::vector<int> idx{1, 2, 3};
  EXPECT_EQ(s.linear_index(idx), 1 * 25 + 2 * 5 + 3);
  EXPECT_EQ(s.interior_dofs().size(), 27u);
}

TEST(AffineMap, Validation) {
  EXPECT_DOUBLE_EQ(AffineMap::box({0, 1}, {2, 4}).det(), 6.0);
  EXPECT_THROW(AffineMap::identity(2).validate(3), AssemblyError);
  EXPECT_THROW((AffineMap{{-1.0}, {0.0}}).validate(1), AssemblyError);
}

TEST(Strategy, Names) {
  for (Strategy s : {Strategy::StandardGauss, Strategy::NcWeighted, Strategy::GaussWeighted})
    EXPECT_EQ(strategy_from_string(to_string(s)), s);
  EXPECT_THROW(strategy_from_string("simpson"), AssemblyError);
}

TEST(RowWise, QuadraticMassInteriorRow) {
  const TensorSpace s = TensorSpace::uniform(1, 2, 1000);
  const SparseMatrix m = assemble_mass_rowwise(s, AffineMap::identity(1), RuleSource::gaussian(s.degrees()));
  const double h = 1e-3;
  const double expected[] = {1.0 / 120, 13.0 / 60, 11.0 / 20, 13.0 / 60, 1.0 / 120};
  const auto vals = m.row_values(500);
  ASSERT_EQ(vals.size(), 5u);
  for (int k = 0; k < 5; ++k) EXPECT_NEAR(vals[k], h * expected[k], 1e-17);
  EXPECT_LE(m.max_abs_diff(assemble_oracle(s, AffineMap::identity(1), RuleKind::Mass)), 1e-12);
}

TEST(RowWise, QuadraticStiffnessInteriorRow) {
  const int n = 50;
  const TensorSpace s = TensorSpace::uniform(1, 2, n);
  const SparseMatrix k = assemble_stiffness_rowwise(s, AffineMap::identity(1), RuleSource::gaussian(s.degrees()));
  const double expected[] = {-1.0 / 6, -1.0 / 3, 1.0, -1.0 / 3, -1.0 / 6};
  const auto vals = k.row_values(20);
  for (int q = 0; q < 5; ++q) EXPECT_NEAR(vals[q], n * expected[q], 1e-12);
}

TEST(RowWise, CubicStiffnessFineMesh) {
  const TensorSpace s = TensorSpace::uniform(1, 3, 1000);
  const SparseMatrix k = assemble_stiffness_rowwise(s, AffineMap::identity(1), RuleSource::gaussian(s.degrees()));
  EXPECT_LE(k.max_abs_diff(assemble_oracle(s, AffineMap::identity(1), RuleKind::Stiffness)), 1e-12);
}

// Oracle equivalence over the (p, d, mesh) grid, for both weighted strategies
// and against the element-wise baseline.
TEST(RowWiseProperty, OracleEquivalenceGrid) {
  for (int p : {2, 3})
    for (int d : {1, 2})
      for (int n : {4, 8, 16}) {
        const TensorSpace s = TensorSpace::uniform(d, p, n);
        const AffineMap map = AffineMap::identity(d);
        for (RuleKind kind : {RuleKind::Mass, RuleKind::Stiffness}) {
          const SparseMatrix oracle = assemble_oracle(s, map, kind);
          const SparseMatrix standard = assemble_standard_gauss(s, map, kind);
          EXPECT_LE(standard.max_abs_diff(oracle), 1e-12);
          for (Strategy st : {Strategy::GaussWeighted, Strategy::NcWeighted}) {
            const SparseMatrix w = assemble_rowwise(s, map, kind, RuleSource::for_strategy(st, s.degrees()));
            EXPECT_LE(w.max_abs_diff(oracle), 1e-12) << "p=" << p << " d=" << d << " n=" << n;
            EXPECT_EQ(w.symmetry_defect(), 0.0);
          }
        }
      }
}

TEST(RowWiseProperty, RandomAffineMaps) {
  gen::Source src(51);
  for (int c = 0; c < 12; ++c) {
    const int d = src.integer(1, 3);
    const int p = src.integer(2, 3);
    const int n = src.integer(p + 1, d == 3 ? 5 : 9);
    const TensorSpace s = TensorSpace::uniform(d, p, n);
    std::vector<double> lo(d), hi(d);
    for (int k = 0; k < d; ++k) {
      lo[k] = src.uniform(-2, 2);
      hi[k] = lo[k] + src.uniform(0.3, 3.0);
    }
    const AffineMap map = AffineMap::box(lo, hi);
    for (RuleKind kind : {RuleKind::Mass, RuleKind::Stiffness}) {
      const SparseMatrix oracle = assemble_oracle(s, map, kind);
      const SparseMatrix w = assemble_rowwise(s, map, kind, RuleSource::gaussian(s.degrees()));
      EXPECT_LE(w.max_abs_diff(oracle), 1e-12 * std::max(1.0, oracle.max_abs()));
    }
  }
}

TEST(RowWise, KroneckerStructure2D) {
  const TensorSpace s = TensorSpace::uniform(2, 3, 10);
  const AffineMap map = AffineMap::identity(2);
  const SparseMatrix m1 = oracle_matrix_1d(s.direction(0), RuleKind::Mass);
  const SparseMatrix k1 = oracle_matrix_1d(s.direction(0), RuleKind::Stiffness);
  const SparseMatrix m = assemble_mass_rowwise(s, map, RuleSource::gaussian(s.degrees()));
  const SparseMatrix k = assemble_stiffness_rowwise(s, map, RuleSource::gaussian(s.degrees()));
  double worst_m = 0.0, worst_k = 0.0;
  for (int r = 0; r < m.rows(); ++r) {
    const auto ri = s.multi_index(r);
    for (int c : m.row_cols(r)) {
      const auto ci = s.multi_index(c);
      const double kron_m = m1.at(ri[0], ci[0]) * m1.at(ri[1], ci[1]);
      const double kron_k = k1.at(ri[0], ci[0]) * m1.at(ri[1], ci[1]) + m1.at(ri[0], ci[0]) * k1.at(ri[1], ci[1]);
      worst_m = std::max(worst_m, std::abs(m.at(r, c) - kron_m));
      worst_k = std::max(worst_k, std::abs(k.at(r, c) - kron_k));
    }
  }
  EXPECT_LE(worst_m, 1e-12);
  EXPECT_LE(worst_k, 1e-12);
}

TEST(RowWise, BandStructure) {
  const TensorSpace s = TensorSpace::uniform(2, 2, 6);
  const SparseMatrix m = assemble_mass_rowwise(s, AffineMap::identity(2), RuleSource::gaussian(s.degrees()));
  for (int r = 0; r < m.rows(); ++r) {
    const auto ri = s.multi_index(r);
    for (int c : m.row_cols(r)) {
      const auto ci = s.multi_index(c);
      for (int k = 0; k < 2; ++k) EXPECT_LE(std::abs(ri[k] - ci[k]), 2);
    }
  }
}

TEST(RowWise, InteriorRowSums) {
  for (int d : {1, 2})
    for (int p : {2, 3}) {
      const int n = 12;
      const TensorSpace s = TensorSpace::uniform(d, p, n);
      const AffineMap map = AffineMap::identity(d);
      const SparseMatrix m = assemble_mass_rowwise(s, map, RuleSource::gaussian(s.degrees()));
      const SparseMatrix k = assemble_stiffness_rowwise(s, map, RuleSource::gaussian(s.degrees()));
      const double h = 1.0 / n;
      for (int r = 0; r < m.rows(); ++r) {
        if (!interior_row(s, r)) continue;
        double ms = 0.0, ks = 0.0;
        for (double v : m.row_values(r)) ms += v;
        for (double v : k.row_values(r)) ks += v;
        EXPECT_NEAR(ms, std::pow(h, d), 1e-12 * std::pow(h, d));
        EXPECT_LE(std::abs(ks), 1e-12 / h);
      }
    }
}

TEST(RowWise, ThreadsGiveIdenticalMatrices) {
  const TensorSpace s = TensorSpace::uniform(2, 3, 20);
  const AffineMap map = AffineMap::identity(2);
  const RuleSource rules = RuleSource::gaussian(s.degrees());
  EvalCounter c1, c4;
  const SparseMatrix a = assemble_stiffness_rowwise(s, map, rules, &c1, {1});
  const SparseMatrix b = assemble_stiffness_rowwise(s, map, rules, &c4, {4});
  EXPECT_EQ(a.values(), b.values());
  EXPECT_EQ(c1[Strategy::GaussWeighted].tensor_evals, c4[Strategy::GaussWeighted].tensor_evals);
  EXPECT_EQ(c1[Strategy::StandardGauss].value_evals, c4[Strategy::StandardGauss].value_evals);
}

TEST(RowWise, DegenerateMeshFallsBack) {
  const TensorSpace s = TensorSpace::uniform(1, 3, 2);
  EXPECT_TRUE(is_degenerate(s));
  EvalCounter c;
  const SparseMatrix m = assemble_mass_rowwise(s, AffineMap::identity(1), RuleSource::gaussian(s.degrees()), &c);
  EXPECT_LE(m.max_abs_diff(assemble_oracle(s, AffineMap::identity(1), RuleKind::Mass)), 1e-14);
  EXPECT_TRUE(c[Strategy::GaussWeighted].empty());
  EXPECT_FALSE(c[Strategy::StandardGauss].empty());
}

TEST(RowWise, Errors) {
  const TensorSpace nonuniform({SplineSpace(KnotVector(2, {0.0, 0.3, 0.6, 1.0}))});
  EXPECT_THROW(assemble_mass_rowwise(nonuniform, AffineMap::identity(1), RuleSource::gaussian(std::vector<int>{2})),
               AssemblyError);
  const TensorSpace s = TensorSpace::uniform(1, 3, 8);
  EXPECT_THROW(assemble_mass_rowwise(s, AffineMap::identity(1), RuleSource::gaussian(std::vector<int>{2})),
               AssemblyError);
  EXPECT_THROW(assemble_mass_rowwise(s, AffineMap::identity(1), RuleSource(Strategy::StandardGauss)), AssemblyError);
}

TEST(StandardGauss, SmallMeshShape) {
  const TensorSpace s = TensorSpace::uniform(1, 2, 4);
  const SparseMatrix m = assemble_standard_gauss(s, AffineMap::identity(1), RuleKind::Mass);
  EXPECT_EQ(m.rows(), 6);
  for (int r = 0; r < 6; ++r)
    for (int c : m.row_cols(r)) EXPECT_LE(std::abs(r - c), 2);
  EXPECT_EQ(m.symmetry_defect(), 0.0);
}

TEST(StandardGauss, CounterPerElement) {
  for (int d : {1, 2, 3}) {
    const int p = 2, n = 3;
    const TensorSpace s = TensorSpace::uniform(d, p, n);
    EvalCounter c;
    assemble_standard_gauss(s, AffineMap::identity(d), RuleKind::Mass, &c);
    const auto per_elem = static_cast<std::uint64_t>(std::pow(p + 1, 2 * d));
    EXPECT_EQ(c[Strategy::StandardGauss].tensor_evals, per_elem * static_cast<std::uint64_t>(std::pow(n, d)));
    EvalCounter k;
    assemble_standard_gauss(s, AffineMap::identity(d), RuleKind::Stiffness, &k);
    EXPECT_EQ(k[Strategy::StandardGauss].tensor_evals, d * c[Strategy::StandardGauss].tensor_evals);
  }
}

TEST(Counters, DeterministicAndMonotone) {
  const TensorSpace s = TensorSpace::uniform(2, 2, 10);
  const RuleSource rules = RuleSource::newton_cotes(s.degrees());
  EvalCounter a, b;
  assemble_mass_rowwise(s, AffineMap::identity(2), rules, &a);
  assemble_mass_rowwise(s, AffineMap::identity(2), rules, &b);
  EXPECT_EQ(a[Strategy::NcWeighted].tensor_evals, b[Strategy::NcWeighted].tensor_evals);
  const auto before = a[Strategy::NcWeighted].tensor_evals;
  assemble_mass_rowwise(s, AffineMap::identity(2), rules, &a);
  EXPECT_EQ(a[Strategy::NcWeighted].tensor_evals, 2 * before);
  a.reset();
  EXPECT_TRUE(a[Strategy::NcWeighted].empty());
}

TEST(Counters, InteriorRowCounts) {
  // Per direction and interior row: Gauss mass 3 nodes x 3 functions (p=2);
  // Newton-Cotes 5 nodes, 13 nonzero values.
  const TensorSpace s = TensorSpace::uniform(1, 2, 5);
  EvalCounter g, nc;
  assemble_mass_rowwise(s, AffineMap::identity(1), RuleSource::gaussian(s.degrees()), &g);
  assemble_mass_rowwise(s, AffineMap::identity(1), RuleSource::newton_cotes(s.degrees()), &nc);
  const int interior = 5 - 2;  // j = p .. n-1
  EXPECT_EQ(g[Strategy::GaussWeighted].tensor_evals, 9u * interior);
  EXPECT_EQ(nc[Strategy::NcWeighted].tensor_evals, 13u * interior);
}

TEST(Counters, RatiosBelowCeiling) {
  for (int p : {2, 3}) {
    const CountRatios r = count_ratio(TensorSpace::uniform(2, p, 30), RuleKind::Mass);
    EXPECT_LT(r.nc_over_gauss, std::pow((2.0 * p + 1) / (p + 1), 2));
    EXPECT_GT(r.nc_over_gauss, 1.5);
  }
  EXPECT_THROW(count_ratios(EvalCounter{}, EvalCounter{}, EvalCounter{}), AssemblyError);
}

TEST(Load, ConstantFunction) {
  for (int p : {2, 3}) {
    const int n = 20;
    const TensorSpace s = TensorSpace::uniform(1, p, n);
    const auto b = assemble_load(s, AffineMap::identity(1), [](std::span<const double>) { return 1.0; },
                                 RuleSource::gaussian(s.degrees()));
    for (int j = 0; j < s.num_dofs(); ++j) EXPECT_NEAR(b[j], exact_basis_integral(s.direction(0), j), 1e-15);
    EXPECT_NEAR(b[10], 1.0 / n, 1e-15);
  }
}

TEST(Load, SplineRightHandSideReproducesMassColumn) {
  for (int p : {2, 3}) {
    const int n = 12;
    const TensorSpace s = TensorSpace::uniform(1, p, n);
    const SplineSpace& sp = s.direction(0);
    const int i = 6;
    const auto b = assemble_load(
        s, AffineMap::identity(1), [&](std::span<const double> x) { return sp.eval_basis(i, x[0]); },
        RuleSource::gaussian(s.degrees()));
    for (int j = p; j <= n - 1; ++j) EXPECT_NEAR(b[j], exact_mass_entry(sp, i, j), 1e-12);
  }
}

TEST(Load, LinearFunctionMatchesOracle) {
  const int n = 16;
  const TensorSpace s = TensorSpace::uniform(1, 2, n);
  const SplineSpace& sp = s.direction(0);
  const auto b = assemble_load(s, AffineMap::identity(1), [](std::span<const double> x) { return x[0]; },
                               RuleSource::gaussian(s.degrees()));
  const GaussLegendreTable gl = gauss_legendre(4);
  for (int j = 0; j < sp.dim(); ++j) {
    double exact = 0.0;
    for (int e = sp.support_first_element(j); e < sp.support_end_element(j); ++e)
      for (int q = 0; q < gl.count; ++q) {
        const double x = (e + gl.nodes[q]) / n;
        exact += gl.weights[q] / n * x * sp.eval_basis(j, x);
      }
    EXPECT_NEAR(b[j], exact, 1e-12);
  }
}

TEST(Load, TwoDimensionalTensorSplineData) {
  const TensorSpace s = TensorSpace::uniform(2, 3, 8);
  const SplineSpace& sp = s.direction(0);
  const int i0 = 4, i1 = 5;
  const auto b = assemble_load(
      s, AffineMap::box({0, 0}, {2, 3}),
      [&](std::span<const double> x) { return sp.eval_basis(i0, x[0]) * sp.eval_basis(i1, x[1]); },
      RuleSource::gaussian(s.degrees()));
  const SparseMatrix m = assemble_oracle(s, AffineMap::box({0, 0}, {2, 3}), RuleKind::Mass);
  const std::vector<int> col{i0, i1};
  const int c = s.linear_index(col);
  for (int r = 0; r < s.num_dofs(); ++r) EXPECT_NEAR(b[r], m.at(r, c), 1e-12);
}
