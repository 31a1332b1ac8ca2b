#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wgq {

// CSR matrix whose sparsity is the tensor stencil |i_k - j_k| <= p_k. Both
// triangles are stored; columns within a row are ascending.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  // Pattern for a tensor grid with per-direction sizes `dims` (last direction
  // varies fastest in the linear index) and per-direction bandwidths.
  static SparseMatrix tensor_stencil(std::span<const int> dims, std::span<const int> bandwidths);

  // Identity-patterned matrix (tests, trivial pencils).
  static SparseMatrix identity(int n);

  struct Entry {
    int row;
    int col;
    double value;
  };
  // Square n x n matrix from unordered entries; duplicates are summed.
  static SparseMatrix from_entries(int n, std::vector<Entry> entries);

  int rows() const { return static_cast<int>(row_ptr_.size()) - 1; }
  std::size_t nnz() const { return cols_.size(); }

  std::span<const int> row_cols(int r) const {
    return {cols_.data() + row_ptr_[r], static_cast<std::size_t>(row_ptr_[r + 1] - row_ptr_[r])};
  }
  std::span<double> row_values(int r) {
    return {vals_.data() + row_ptr_[r], static_cast<std::size_t>(row_ptr_[r + 1] - row_ptr_[r])};
  }
  std::span<const double> row_values(int r) const {
    return {vals_.data() + row_ptr_[r], static_cast<std::size_t>(row_ptr_[r + 1] - row_ptr_[r])};
  }

  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& cols() const { return cols_; }
  const std::vector<double>& values() const { return vals_; }
  std::vector<double>& values() { return vals_; }

  // Entry lookup; zero outside the pattern.
  double at(int r, int c) const;
  // Position of (r, c) in values(), or -1.
  std::ptrdiff_t find(int r, int c) const;

  // max |A_rc - A_cr| over the pattern.
  double symmetry_defect() const;
  // Replaces A_rc and A_cr by their mean.
  void symmetrize();

  // Max |A - B| over the union of both patterns.
  double max_abs_diff(const SparseMatrix& other) const;
  double max_abs() const;

  // Submatrix on the given (ascending) index set.
  SparseMatrix restricted(std::span<const int> keep) const;

  std::vector<double> multiply(std::span<const double> x) const;

  // Row-major dense copy.
  std::vector<double> dense() const;

 private:
  std::vector<int> row_ptr_{0};
  std::vector<int> cols_;
  std::vector<double> vals_;
};

}  // namespace wgq
