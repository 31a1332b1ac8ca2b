#include "wgq/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wgq {

SparseMatrix SparseMatrix::tensor_stencil(std::span<const int> dims, std::span<const int> bandwidths) {
  if (dims.size() != bandwidths.size() || dims.empty())
    throw std::invalid_argument("stencil needs one bandwidth per direction");
  const int d = static_cast<int>(dims.size());
  int n = 1;
  for (int k = 0; k < d; ++k) n *= dims[k];

  SparseMatrix m;
  m.row_ptr_.assign(1, 0);
  m.row_ptr_.reserve(n + 1);
  std::vector<int> idx(d), lo(d), hi(d), cur(d);
  for (int r = 0; r < n; ++r) {
    int rest = r;
    for (int k = d - 1; k >= 0; --k) {
      idx[k] = rest % dims[k];
      rest /= dims[k];
    }
    for (int k = 0; k < d; ++k) {
      lo[k] = std::max(0, idx[k] - bandwidths[k]);
      hi[k] = std::min(dims[k] - 1, idx[k] + bandwidths[k]);
      cur[k] = lo[k];
    }
    while (true) {
      int lin = 0;
      for (int k = 0; k < d; ++k) lin = lin * dims[k] + cur[k];
      m.cols_.push_back(lin);
      int k = d - 1;
      while (k >= 0 && cur[k] == hi[k]) {
        cur[k] = lo[k];
        --k;
      }
      if (k < 0) break;
      ++cur[k];
    }
    m.row_ptr_.push_back(static_cast<int>(m.cols_.size()));
  }
  m.vals_.assign(m.cols_.size(), 0.0);
  return m;
}

SparseMatrix SparseMatrix::identity(int n) {
  SparseMatrix m;
  m.row_ptr_.assign(1, 0);
  for (int r = 0; r < n; ++r) {
    m.cols_.push_back(r);
    m.vals_.push_back(1.0);
    m.row_ptr_.push_back(r + 1);
  }
  return m;
}

SparseMatrix SparseMatrix::from_entries(int n, std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
  SparseMatrix m;
  m.row_ptr_.assign(n + 1, 0);
  int last_row = -1;
  for (const Entry& e : entries) {
    if (e.row < 0 || e.row >= n || e.col < 0 || e.col >= n)
      throw std::out_of_range("matrix entry outside the declared size");
    if (e.row == last_row && m.cols_.back() == e.col) {
      m.vals_.back() += e.value;
      continue;
    }
    m.cols_.push_back(e.col);
    m.vals_.push_back(e.value);
    ++m.row_ptr_[e.row + 1];
    last_row = e.row;
  }
  for (int r = 0; r < n; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
  return m;
}

std::ptrdiff_t SparseMatrix::find(int r, int c) const {
  if (r < 0 || r >= rows()) return -1;
  const auto first = cols_.begin() + row_ptr_[r];
  const auto last = cols_.begin() + row_ptr_[r + 1];
  const auto it = std::lower_bound(first, last, c);
  if (it == last || *it != c) return -1;
  return it - cols_.begin();
}

double SparseMatrix::at(int r, int c) const {
  const auto pos = find(r, c);
  return pos < 0 ? 0.0 : vals_[pos];
}

double SparseMatrix::symmetry_defect() const {
  double worst = 0.0;
  for (int r = 0; r < rows(); ++r)
    for (int q = row_ptr_[r]; q < row_ptr_[r + 1]; ++q)
      worst = std::max(worst, std::abs(vals_[q] - at(cols_[q], r)));
  return worst;
}

void SparseMatrix::symmetrize() {
  for (int r = 0; r < rows(); ++r)
    for (int q = row_ptr_[r]; q < row_ptr_[r + 1]; ++q) {
      const int c = cols_[q];
      if (c <= r) continue;
      const auto t = find(c, r);
      if (t < 0) throw std::logic_error("pattern is not structurally symmetric");
      const double mean = 0.5 * (vals_[q] + vals_[t]);
      vals_[q] = mean;
      vals_[t] = mean;
    }
}

double SparseMatrix::max_abs_diff(const SparseMatrix& other) const {
  if (rows() != other.rows()) throw std::invalid_argument("matrix sizes differ");
  double worst = 0.0;
  for (int r = 0; r < rows(); ++r) {
    for (int q = row_ptr_[r]; q < row_ptr_[r + 1]; ++q)
      worst = std::max(worst, std::abs(vals_[q] - other.at(r, cols_[q])));
    for (int q = other.row_ptr_[r]; q < other.row_ptr_[r + 1]; ++q)
      if (find(r, other.cols_[q]) < 0) worst = std::max(worst, std::abs(other.vals_[q]));
  }
  return worst;
}

double SparseMatrix::max_abs() const {
  double worst = 0.0;
  for (double v : vals_) worst = std::max(worst, std::abs(v));
  return worst;
}

SparseMatrix SparseMatrix::restricted(std::span<const int> keep) const {
  std::vector<int> map(rows(), -1);
  for (std::size_t k = 0; k < keep.size(); ++k) map[keep[k]] = static_cast<int>(k);
  SparseMatrix m;
  m.row_ptr_.assign(1, 0);
  for (int r : keep) {
    for (int q = row_ptr_[r]; q < row_ptr_[r + 1]; ++q) {
      const int c = map[cols_[q]];
      if (c < 0) continue;
      m.cols_.push_back(c);
      m.vals_.push_back(vals_[q]);
    }
    m.row_ptr_.push_back(static_cast<int>(m.cols_.size()));
  }
  return m;
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(rows(), 0.0);
  for (int r = 0; r < rows(); ++r) {
    double s = 0.0;
    for (int q = row_ptr_[r]; q < row_ptr_[r + 1]; ++q) s += vals_[q] * x[cols_[q]];
    y[r] = s;
  }
  return y;
}

std::vector<double> SparseMatrix::dense() const {
  const auto n = static_cast<std::size_t>(rows());
  std::vector<double> out(n * n, 0.0);
  for (int r = 0; r < rows(); ++r)
    for (int q = row_ptr_[r]; q < row_ptr_[r + 1]; ++q) out[r * n + cols_[q]] = vals_[q];
  return out;
}

}  // namespace wgq
