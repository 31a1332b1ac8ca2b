#include <gtest/gtest.h>

#include <sstream>

#include "wgq/io.hpp"

using namespace wgq;

TEST(Format, SeventeenDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(1.5), "1.5");
  EXPECT_EQ(std::stod(format_double(0.71241440095955149482)), 0.71241440095955149482);
}

TEST(MatrixMarket, RoundTrip) {
  const TensorSpace s = TensorSpace::uniform(2, 2, 4);
  const SparseMatrix m = assemble_stiffness_rowwise(s, AffineMap::identity(2), RuleSource::gaussian(s.degrees()));
  std::stringstream ss;
  write_matrix_market(ss, m, "test\nmatrix");
  const std::string text = ss.str();
  EXPECT_EQ(text.rfind("%%MatrixMarket matrix coordinate real symmetric\n% test\n% matrix\n", 0), 0u);
  const SparseMatrix back = read_matrix_market(ss);
  EXPECT_EQ(back.rows(), m.rows());
  EXPECT_EQ(back.nnz(), m.nnz());
  EXPECT_EQ(back.max_abs_diff(m), 0.0);
}

TEST(MatrixMarket, RejectsGarbage) {
  std::stringstream bad("hello\n");
  EXPECT_THROW(read_matrix_market(bad), IoError);
  std::stringstream truncated("%%MatrixMarket matrix coordinate real symmetric\n2 2 3\n1 1 1.0\n");
  EXPECT_THROW(read_matrix_market(truncated), IoError);
}

TEST(FromEntries, SumsDuplicates) {
  const SparseMatrix m = SparseMatrix::from_entries(3, {{2, 0, 1.0}, {0, 1, 2.0}, {0, 1, 0.5}, {1, 1, 4.0}});
  EXPECT_EQ(m.nnz(), 3u);
  EXPECT_EQ(m.at(0, 1), 2.5);
  EXPECT_EQ(m.at(2, 0), 1.0);
  EXPECT_EQ(m.row_cols(1).size(), 1u);
}

TEST(BandJson, OneDimensionalBands) {
  const TensorSpace s = TensorSpace::uniform(1, 2, 6);
  const SparseMatrix m = assemble_mass_rowwise(s, AffineMap::identity(1), RuleSource::gaussian(s.degrees()));
  const nlohmann::json j = band_json(m, s);
  EXPECT_EQ(j["n"], 8);
  EXPECT_EQ(j["d"], 1);
  ASSERT_EQ(j["bands"].size(), 3u);
  EXPECT_EQ(j["bands"][2]["offset"], 2);
  EXPECT_EQ(j["bands"][2]["values"].size(), 6u);
  EXPECT_DOUBLE_EQ(j["bands"][0]["values"][4].get<double>(), m.at(4, 4));
}

TEST(CounterJson, ListsNonEmptyTallies) {
  EvalCounter c;
  c[Strategy::NcWeighted].value_evals = 7;
  const nlohmann::json j = counter_json(c);
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j[0]["strategy"], "nc-weighted");
  EXPECT_EQ(j[0]["value_evals"], 7);
  EXPECT_EQ(j[0]["deriv_evals"], 0);
}

TEST(RuleJson, RoundTrip) {
  const WeightedRule r = gaussian_rule(3, RuleKind::Stiffness);
  const WeightedRule back = rule_from_json(nlohmann::json::parse(dump_json(rule_json(r))));
  EXPECT_EQ(back.kind, r.kind);
  EXPECT_EQ(back.degree, 3);
  EXPECT_FALSE(back.weight_index.has_value());
  EXPECT_EQ(back.nodes, r.nodes);
  EXPECT_EQ(back.weights, r.weights);
  EXPECT_EQ(back.node_elements, r.node_elements);
  EXPECT_THROW(rule_from_json(nlohmann::json{{"kind", "mass"}}), IoError);
}

TEST(DumpJson, Deterministic) {
  const nlohmann::json j = {{"b", 0.1}, {"a", {1, 2, 3}}, {"c", {{"x", true}}}};
  EXPECT_EQ(dump_json(j), dump_json(j));
  EXPECT_NE(dump_json(j).find("0.10000000000000001"), std::string::npos);
}
