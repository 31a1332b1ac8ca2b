#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wgq/assembly.hpp"

namespace wgq {

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Linear solver or eigensolver breakdown (exit code 3 at the CLI).
class LinearSolveError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

inline constexpr int kDenseEigenCap = 4500;

// Smallest `count` Dirichlet Laplacian eigenvalues on the unit box, sorted,
// with multiplicity.
std::vector<double> exact_laplace_eigenvalues(int d, int count);

// Smallest `count` eigenvalues of K x = lambda M x (all when count <= 0),
// ascending. Dense symmetric-definite reduction.
std::vector<double> solve_generalized_eig(const SparseMatrix& K, const SparseMatrix& M, int count,
                                          int max_dim = kDenseEigenCap);

// Removes boundary rows and columns (homogeneous Dirichlet).
SparseMatrix dirichlet_restrict(const TensorSpace& space, const SparseMatrix& m);

struct RateFit {
  double rate = 0.0;
  double residual = 0.0;  // RMS of the log-log fit
};

// Least-squares slope of log(error) against log(h) over the last `last` points.
RateFit fit_rate(const std::vector<double>& h, const std::vector<double>& errors, int last = 3);

struct ConvergenceReport {
  std::string study;
  int d = 1;
  int degree = 2;
  std::string strategy;
  std::string quantity;
  std::vector<int> meshes;
  std::vector<double> h;
  std::vector<double> errors;
  RateFit fit;
  double expected_rate = 0.0;
  double rate_tolerance = 0.0;
  bool monotone = true;
  bool passed = false;
  nlohmann::json metadata = nlohmann::json::object();

  nlohmann::json to_json() const;
  std::string to_csv() const;  // h,error
};

// Default rate tolerance: 0.3 for p = 2, 0.4 otherwise.
double default_rate_tolerance(int degree);

ConvergenceReport run_eigen_convergence(int d, int degree, int eigen_index, const std::vector<int>& meshes,
                                        Strategy strategy = Strategy::GaussWeighted,
                                        double rate_tolerance = -1.0);

struct SpectrumComparison {
  int degree = 2;
  int elements = 0;
  std::vector<double> k_over_n;
  std::vector<double> weighted_error;  // (lambda_h - lambda) / lambda
  std::vector<double> standard_error;
  double max_curve_difference = 0.0;   // max |lambda_w - lambda_g| / lambda_g
  double max_matrix_difference = 0.0;  // max entry over M and K
  double tolerance = 1e-9;
  bool passed = false;

  nlohmann::json to_json() const;
  std::string to_csv() const;  // k/N,weighted,standard
};

SpectrumComparison run_spectrum_comparison(int degree, int elements,
                                           Strategy strategy = Strategy::GaussWeighted,
                                           double tolerance = 1e-9);

// Manufactured solutions: "sine" (u = prod sin(pi x_k)) and "zero".
ConvergenceReport run_poisson_convergence(int d, int degree, const std::vector<int>& meshes,
                                          const std::string& solution = "sine",
                                          Strategy strategy = Strategy::GaussWeighted,
                                          double rate_tolerance = -1.0);

// Galerkin solution of the Dirichlet Poisson problem; full coefficient vector
// (boundary coefficients are zero).
std::vector<double> solve_poisson(const TensorSpace& space, const ScalarField& f, const RuleSource& rules);

// L2 norm of u_h - u with (p+2)-point Gauss per element and direction.
double l2_error(const TensorSpace& space, const std::vector<double>& coeffs, const ScalarField& u);

}  // namespace wgq
