#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "wgq/assembly.hpp"
#include "wgq/rules.hpp"
#include "wgq/sparse_matrix.hpp"

namespace wgq {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// 17 significant digits.
std::string format_double(double x);

// MatrixMarket coordinate real symmetric: lower triangle, 1-based.
void write_matrix_market(std::ostream& os, const SparseMatrix& m, const std::string& comment = {});
SparseMatrix read_matrix_market(std::istream& is);
void write_matrix_market_file(const std::string& path, const SparseMatrix& m, const std::string& comment = {});

// {n, p, d, bands: [{offset, values}]}: one band per nonnegative linear
// offset present in the pattern; values[r] = A(r, r + offset), zero where
// the offset leaves the stencil.
nlohmann::json band_json(const SparseMatrix& m, const TensorSpace& space);

// [{strategy, value_evals, deriv_evals, tensor_evals}] for non-empty tallies.
nlohmann::json counter_json(const EvalCounter& counter);

nlohmann::json rule_json(const WeightedRule& rule);
WeightedRule rule_from_json(const nlohmann::json& j);

// Writes with 17-digit numbers and a trailing newline.
void write_json_file(const std::string& path, const nlohmann::json& j);
std::string dump_json(const nlohmann::json& j);

}  // namespace wgq
