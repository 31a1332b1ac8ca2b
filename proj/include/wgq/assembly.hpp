#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wgq/rules.hpp"
#include "wgq/sparse_matrix.hpp"
#include "wgq/spline.hpp"

namespace wgq {

class AssemblyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor product of univariate spaces; linear dof index has the last
// direction varying fastest (direction 0 is the outermost integral).
class TensorSpace {
 public:
  explicit TensorSpace(std::vector<SplineSpace> directions);

  static TensorSpace uniform(int d, int degree, int elements);

  int d() const { return static_cast<int>(dirs_.size()); }
  const SplineSpace& direction(int k) const { return dirs_[k]; }
  std::vector<int> dims() const;
  std::vector<int> degrees() const;
  int num_dofs() const { return num_dofs_; }

  std::vector<int> multi_index(int linear) const;
  int linear_index(std::span<const int> multi) const;

  // Dofs that are not on the boundary in any direction (open knots make the
  // boundary dofs interpolatory).
  std::vector<int> interior_dofs() const;

 private:
  std::vector<SplineSpace> dirs_;
  int num_dofs_ = 1;
};

// x = offset + diag(scale) * x_hat.
struct AffineMap {
  std::vector<double> scale;
  std::vector<double> offset;

  static AffineMap identity(int d) { return {std::vector<double>(d, 1.0), std::vector<double>(d, 0.0)}; }
  static AffineMap box(std::vector<double> lo, std::vector<double> hi);

  double det() const;
  void validate(int d) const;
};

enum class Strategy { StandardGauss = 0, NcWeighted = 1, GaussWeighted = 2 };

const char* to_string(Strategy s);
Strategy strategy_from_string(const std::string& name);

struct EvalTally {
  // Univariate basis values / derivatives requested at quadrature abscissae,
  // cached per row (weighted) or per element (standard).
  std::uint64_t value_evals = 0;
  std::uint64_t deriv_evals = 0;
  // Evaluations of d-variate basis functions at d-variate quadrature nodes,
  // counting only functions whose support contains the node (values that
  // vanish identically are redundant and skipped). This is the cost metric
  // behind the reduction ratios.
  std::uint64_t tensor_evals = 0;

  EvalTally& operator+=(const EvalTally& o) {
    value_evals += o.value_evals;
    deriv_evals += o.deriv_evals;
    tensor_evals += o.tensor_evals;
    return *this;
  }
  bool empty() const { return value_evals == 0 && deriv_evals == 0 && tensor_evals == 0; }
};

// Tallies per strategy. Weighted assemblers book their standard-Gauss
// fallback rows under Strategy::StandardGauss.
class EvalCounter {
 public:
  EvalTally& operator[](Strategy s) { return tallies_[static_cast<int>(s)]; }
  const EvalTally& operator[](Strategy s) const { return tallies_[static_cast<int>(s)]; }
  void merge(const EvalCounter& other);
  void reset() { tallies_ = {}; }

 private:
  std::array<EvalTally, 3> tallies_{};
};

// Cardinal rules used by a weighted assembler, keyed by (degree, kind).
class RuleSource {
 public:
  RuleSource() = default;
  explicit RuleSource(Strategy strategy) : strategy_(strategy) {}

  // Gaussian weighted rules (or Newton-Cotes-type rules) for the given degrees.
  static RuleSource gaussian(std::span<const int> degrees);
  static RuleSource newton_cotes(std::span<const int> degrees);
  static RuleSource for_strategy(Strategy s, std::span<const int> degrees);

  Strategy strategy() const { return strategy_; }
  void add(WeightedRule rule);
  bool has(int degree, RuleKind kind) const;
  const WeightedRule& get(int degree, RuleKind kind) const;

 private:
  Strategy strategy_ = Strategy::GaussWeighted;
  std::map<std::pair<int, RuleKind>, WeightedRule> rules_;
};

struct AssemblyOptions {
  int threads = 1;
};

// Row-wise assembly: rows whose weight index is interior in every
// direction use the tensor product of cardinal weighted rules; the other
// rows are integrated with per-element Gauss-Legendre (p+1 points) over the
// row's support. Entries carry det J (and 1/s_k^2 for the direction-k
// stiffness term). The result is symmetrized after a symmetry check.
SparseMatrix assemble_mass_rowwise(const TensorSpace& space, const AffineMap& map,
                                   const RuleSource& rules, EvalCounter* counter = nullptr,
                                   const AssemblyOptions& options = {});
SparseMatrix assemble_stiffness_rowwise(const TensorSpace& space, const AffineMap& map,
                                        const RuleSource& rules, EvalCounter* counter = nullptr,
                                        const AssemblyOptions& options = {});
SparseMatrix assemble_rowwise(const TensorSpace& space, const AffineMap& map, RuleKind kind,
                              const RuleSource& rules, EvalCounter* counter = nullptr,
                              const AssemblyOptions& options = {});

// Element-wise baseline with (p+1)^d Gauss-Legendre points per element.
SparseMatrix assemble_standard_gauss(const TensorSpace& space, const AffineMap& map, RuleKind kind,
                                     EvalCounter* counter = nullptr);

// Kronecker composition of exact univariate oracle matrices.
SparseMatrix assemble_oracle(const TensorSpace& space, const AffineMap& map, RuleKind kind);

// Exact univariate matrix (mass or stiffness) of one direction.
SparseMatrix oracle_matrix_1d(const SplineSpace& space, RuleKind kind);

// Load vector b_j = integral of f * B_j * det J. `f` takes the parametric point.
using ScalarField = std::function<double(std::span<const double>)>;
std::vector<double> assemble_load(const TensorSpace& space, const AffineMap& map, const ScalarField& f,
                                  const RuleSource& rules);

// True when no direction has an interior weight (n_EL < p+1).
bool is_degenerate(const TensorSpace& space);

struct CountRatios {
  EvalTally standard;
  EvalTally nc_weighted;
  EvalTally gauss_weighted;
  double standard_over_gauss = 0.0;
  double nc_over_gauss = 0.0;
};

// Ratio of weighted-rule evaluation counts (tensor metric). Each strategy
// runs with its own counter; only the tally of the strategy itself enters
// the ratio, so boundary fallback work is excluded from the comparison.
CountRatios count_ratios(const EvalCounter& standard, const EvalCounter& nc, const EvalCounter& gauss);
CountRatios count_ratio(const TensorSpace& space, RuleKind kind);

}  // namespace wgq
