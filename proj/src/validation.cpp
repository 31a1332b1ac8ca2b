#include "wgq/validation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "wgq/io.hpp"
#include "wgq/oracle.hpp"

namespace wgq {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::MatrixXd to_dense(const SparseMatrix& m) {
  const int n = m.rows();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int r = 0; r < n; ++r) {
    const auto cols = m.row_cols(r);
    const auto vals = m.row_values(r);
    for (std::size_t q = 0; q < cols.size(); ++q) out(r, cols[q]) = vals[q];
  }
  return out;
}

Eigen::SparseMatrix<double> to_eigen(const SparseMatrix& m) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(m.nnz());
  for (int r = 0; r < m.rows(); ++r) {
    const auto cols = m.row_cols(r);
    const auto vals = m.row_values(r);
    for (std::size_t q = 0; q < cols.size(); ++q) t.emplace_back(r, cols[q], vals[q]);
  }
  Eigen::SparseMatrix<double> out(m.rows(), m.rows());
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

SparseMatrix assemble(const TensorSpace& space, RuleKind kind, const RuleSource& rules) {
  const AffineMap map = AffineMap::identity(space.d());
  if (rules.strategy() == Strategy::StandardGauss) return assemble_standard_gauss(space, map, kind);
  return assemble_rowwise(space, map, kind, rules);
}

// Sorted eigenvalues of the pencil (A, B) with B positive definite.
Eigen::VectorXd pencil_eigenvalues(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(A, B, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw LinearSolveError("generalized eigensolver did not converge");
  return solver.eigenvalues();
}

std::vector<int> validate_meshes(const std::vector<int>& meshes) {
  if (meshes.empty()) throw ValidationError("mesh list is empty");
  for (std::size_t k = 0; k < meshes.size(); ++k) {
    if (meshes[k] < 1) throw ValidationError("mesh sizes must be positive");
    if (k > 0 && meshes[k] <= meshes[k - 1]) throw ValidationError("mesh sizes must increase");
  }
  return meshes;
}

bool monotone_decay(const std::vector<double>& errors) {
  int bumps = 0;
  for (std::size_t k = 1; k < errors.size(); ++k) {
    if (errors[k] < errors[k - 1] || errors[k] == 0.0) continue;
    if (errors[k] > 1e-11 || ++bumps > 1) return false;
  }
  return true;
}

nlohmann::json study_metadata() {
  return {{"domain", "unit box"},
          {"boundary", "homogeneous Dirichlet, boundary dofs eliminated"},
          {"rate_fit", "least squares on log(error) vs log(h), last three meshes"}};
}

}  // namespace

std::vector<double> exact_laplace_eigenvalues(int d, int count) {
  if (d < 1 || d > 3) throw ValidationError("dimension must be 1, 2 or 3");
  if (count < 1) return {};
  for (long bound = count;; bound *= 2) {
    // All sums of d squares (entries >= 1) not exceeding bound.
    std::vector<long> sums;
    const long mmax = static_cast<long>(std::sqrt(static_cast<double>(bound))) + 1;
    std::vector<long> m(d, 1);
    while (true) {
      long s = 0;
      for (long v : m) s += v * v;
      if (s <= bound) sums.push_back(s);
      int k = d - 1;
      while (k >= 0 && m[k] == mmax) m[k--] = 1;
      if (k < 0) break;
      ++m[k];
    }
    if (static_cast<int>(sums.size()) < count) continue;
    std::sort(sums.begin(), sums.end());
    std::vector<double> out;
    for (int k = 0; k < count; ++k) out.push_back(kPi * kPi * static_cast<double>(sums[k]));
    return out;
  }
}

std::vector<double> solve_generalized_eig(const SparseMatrix& K, const SparseMatrix& M, int count, int max_dim) {
  const int n = K.rows();
  if (M.rows() != n) throw ValidationError("K and M differ in size");
  if (n > max_dim)
    throw ValidationError("dense eigensolve dimension " + std::to_string(n) + " exceeds cap " +
                          std::to_string(max_dim));
  if (n == 0) return {};
  const Eigen::MatrixXd Kd = to_dense(K);
  const Eigen::MatrixXd Md = to_dense(M);
  if (Eigen::LLT<Eigen::MatrixXd>(Md).info() != Eigen::Success)
    throw LinearSolveError("mass matrix is not positive definite");
  const int want = count <= 0 ? n : std::min(count, n);

  // The inverted pencil (M, K) resolves the low end to relative accuracy;
  // the direct pencil resolves the high end. Each eigenvalue is taken from
  // whichever is accurate for it.
  std::vector<double> low;
  if (Eigen::LLT<Eigen::MatrixXd>(Kd).info() == Eigen::Success) {
    const Eigen::VectorXd mu = pencil_eigenvalues(Md, Kd);
    for (int k = n - 1; k >= 0; --k) low.push_back(1.0 / mu(k));
    const double split = std::sqrt(low.front() * low.back());
    if (low[want - 1] <= split) return {low.begin(), low.begin() + want};
  }
  const Eigen::VectorXd lam = pencil_eigenvalues(Kd, Md);
  std::vector<double> out(want);
  const double split = low.empty() ? 0.0 : std::sqrt(low.front() * low.back());
  for (int k = 0; k < want; ++k) out[k] = (!low.empty() && low[k] <= split) ? low[k] : lam(k);
  return out;
}

SparseMatrix dirichlet_restrict(const TensorSpace& space, const SparseMatrix& m) {
  return m.restricted(space.interior_dofs());
}

RateFit fit_rate(const std::vector<double>& h, const std::vector<double>& errors, int last) {
  if (h.size() != errors.size()) throw ValidationError("h and error lists differ in length");
  const int n = std::min<int>(last, static_cast<int>(h.size()));
  if (n < 2) throw ValidationError("rate fit needs at least two meshes");
  const std::size_t first = h.size() - n;
  double sx = 0, sy = 0;
  std::vector<double> x, y;
  for (std::size_t k = first; k < h.size(); ++k) {
    if (!(h[k] > 0) || !(errors[k] > 0)) return {std::nan(""), std::nan("")};
    x.push_back(std::log(h[k]));
    y.push_back(std::log(errors[k]));
    sx += x.back();
    sy += y.back();
  }
  sx /= n;
  sy /= n;
  double sxy = 0, sxx = 0;
  for (int k = 0; k < n; ++k) {
    sxy += (x[k] - sx) * (y[k] - sy);
    sxx += (x[k] - sx) * (x[k] - sx);
  }
  RateFit fit;
  fit.rate = sxy / sxx;
  double ss = 0;
  for (int k = 0; k < n; ++k) {
    const double e = y[k] - (sy + fit.rate * (x[k] - sx));
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

double default_rate_tolerance(int degree) { return degree == 2 ? 0.3 : 0.4; }

nlohmann::json ConvergenceReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t k = 0; k < meshes.size(); ++k)
    rows.push_back({{"elements", meshes[k]}, {"h", h[k]}, {"error", errors[k]}});
  return {{"study", study},
          {"d", d},
          {"p", degree},
          {"strategy", strategy},
          {"quantity", quantity},
          {"meshes", rows},
          {"rate", fit.rate},
          {"rate_fit_residual", fit.residual},
          {"expected_rate", expected_rate},
          {"rate_tolerance", rate_tolerance},
          {"monotone", monotone},
          {"passed", passed},
          {"metadata", metadata}};
}

std::string ConvergenceReport::to_csv() const {
  std::ostringstream os;
  os << "h,error\n";
  for (std::size_t k = 0; k < h.size(); ++k) os << format_double(h[k]) << ',' << format_double(errors[k]) << '\n';
  return os.str();
}

ConvergenceReport run_eigen_convergence(int d, int degree, int eigen_index, const std::vector<int>& meshes,
                                        Strategy strategy, double rate_tolerance) {
  if (eigen_index < 1) throw ValidationError("eigenvalue index starts at 1");
  ConvergenceReport rep;
  rep.study = "eig-convergence";
  rep.d = d;
  rep.degree = degree;
  rep.strategy = to_string(strategy);
  rep.quantity = "relative error of eigenvalue " + std::to_string(eigen_index);
  rep.meshes = validate_meshes(meshes);
  rep.expected_rate = 2.0 * degree;
  rep.rate_tolerance = rate_tolerance < 0 ? default_rate_tolerance(degree) : rate_tolerance;
  const double exact = exact_laplace_eigenvalues(d, eigen_index).back();
  const RuleSource rules = RuleSource::for_strategy(strategy, std::vector<int>{degree});

  for (int n : rep.meshes) {
    const TensorSpace space = TensorSpace::uniform(d, degree, n);
    const SparseMatrix K = dirichlet_restrict(space, assemble(space, RuleKind::Stiffness, rules));
    const SparseMatrix M = dirichlet_restrict(space, assemble(space, RuleKind::Mass, rules));
    if (K.rows() < eigen_index) throw ValidationError("mesh too coarse for the requested eigenvalue");
    const double lam = solve_generalized_eig(K, M, eigen_index).back();
    rep.h.push_back(1.0 / n);
    rep.errors.push_back(std::abs(lam - exact) / exact);
  }
  rep.fit = fit_rate(rep.h, rep.errors);
  rep.monotone = monotone_decay(rep.errors);
  rep.passed = std::abs(rep.fit.rate - rep.expected_rate) <= rep.rate_tolerance;
  rep.metadata = study_metadata();
  rep.metadata["exact_eigenvalue"] = exact;
  rep.metadata["error"] = "|lambda_h - lambda| / lambda";
  return rep;
}

nlohmann::json SpectrumComparison::to_json() const {
  return {{"study", "spectrum"},
          {"d", 1},
          {"p", degree},
          {"elements", elements},
          {"eigenvalues", k_over_n.size()},
          {"max_curve_difference", max_curve_difference},
          {"max_matrix_difference", max_matrix_difference},
          {"tolerance", tolerance},
          {"passed", passed}};
}

std::string SpectrumComparison::to_csv() const {
  std::ostringstream os;
  os << "k_over_N,weighted_error,standard_error\n";
  for (std::size_t k = 0; k < k_over_n.size(); ++k)
    os << format_double(k_over_n[k]) << ',' << format_double(weighted_error[k]) << ','
       << format_double(standard_error[k]) << '\n';
  return os.str();
}

SpectrumComparison run_spectrum_comparison(int degree, int elements, Strategy strategy, double tolerance) {
  if (elements < 1 || elements > 1200) throw ValidationError("spectrum study supports 1..1200 elements");
  SpectrumComparison out;
  out.degree = degree;
  out.elements = elements;
  out.tolerance = tolerance;
  const TensorSpace space = TensorSpace::uniform(1, degree, elements);
  const RuleSource rules = RuleSource::for_strategy(strategy, std::vector<int>{degree});
  const RuleSource standard(Strategy::StandardGauss);

  const SparseMatrix Kw = assemble(space, RuleKind::Stiffness, rules);
  const SparseMatrix Mw = assemble(space, RuleKind::Mass, rules);
  const SparseMatrix Kg = assemble(space, RuleKind::Stiffness, standard);
  const SparseMatrix Mg = assemble(space, RuleKind::Mass, standard);
  out.max_matrix_difference = std::max(Kw.max_abs_diff(Kg), Mw.max_abs_diff(Mg));

  const auto lw = solve_generalized_eig(dirichlet_restrict(space, Kw), dirichlet_restrict(space, Mw), 0);
  const auto lg = solve_generalized_eig(dirichlet_restrict(space, Kg), dirichlet_restrict(space, Mg), 0);
  for (std::size_t k = 0; k < lw.size(); ++k) {
    const double exact = std::pow((k + 1) * kPi, 2);
    out.k_over_n.push_back(static_cast<double>(k + 1) / elements);
    out.weighted_error.push_back((lw[k] - exact) / exact);
    out.standard_error.push_back((lg[k] - exact) / exact);
    out.max_curve_difference = std::max(out.max_curve_difference, std::abs(lw[k] - lg[k]) / lg[k]);
  }
  out.passed = out.max_curve_difference <= tolerance && out.max_matrix_difference <= 1e-12;
  return out;
}

std::vector<double> solve_poisson(const TensorSpace& space, const ScalarField& f, const RuleSource& rules) {
  const SparseMatrix K = assemble(space, RuleKind::Stiffness, rules);
  const std::vector<double> b = assemble_load(space, AffineMap::identity(space.d()), f, rules);
  const std::vector<int> interior = space.interior_dofs();
  std::vector<double> coeffs(space.num_dofs(), 0.0);
  if (interior.empty()) return coeffs;

  Eigen::VectorXd rhs(interior.size());
  for (std::size_t k = 0; k < interior.size(); ++k) rhs(k) = b[interior[k]];
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(to_eigen(K.restricted(interior)));
  if (ldlt.info() != Eigen::Success) throw LinearSolveError("stiffness factorization failed");
  const Eigen::VectorXd x = ldlt.solve(rhs);
  if (ldlt.info() != Eigen::Success || !x.allFinite()) throw LinearSolveError("stiffness solve failed");
  for (std::size_t k = 0; k < interior.size(); ++k) coeffs[interior[k]] = x(k);
  return coeffs;
}

double l2_error(const TensorSpace& space, const std::vector<double>& coeffs, const ScalarField& u) {
  const int d = space.d();
  if (static_cast<int>(coeffs.size()) != space.num_dofs()) throw ValidationError("coefficient vector size mismatch");
  std::vector<int> nel(d), elem(d, 0);
  for (int k = 0; k < d; ++k) nel[k] = space.direction(k).num_elements();

  struct Point {
    double x, w;
    std::vector<double> values;
  };
  double sum = 0.0;
  std::vector<std::vector<Point>> pts(d);
  std::vector<std::size_t> q(d);
  std::vector<int> a(d), idx(d);
  std::vector<double> x(d);
  while (true) {
    for (int k = 0; k < d; ++k) {
      const SplineSpace& s = space.direction(k);
      const GaussLegendreTable gl = gauss_legendre(s.degree() + 2);
      const double h = s.knots().element_width(elem[k]);
      pts[k].clear();
      for (int g = 0; g < gl.count; ++g)
        pts[k].push_back({s.knots().breakpoints()[elem[k]] + gl.nodes[g] * h, gl.weights[g] * h,
                          s.eval_span_local(elem[k], gl.nodes[g]).values});
    }
    std::fill(q.begin(), q.end(), 0);
    while (true) {
      double w = 1.0;
      for (int k = 0; k < d; ++k) {
        x[k] = pts[k][q[k]].x;
        w *= pts[k][q[k]].w;
      }
      double uh = 0.0;
      std::fill(a.begin(), a.end(), 0);
      while (true) {
        double phi = 1.0;
        for (int k = 0; k < d; ++k) {
          phi *= pts[k][q[k]].values[a[k]];
          idx[k] = elem[k] + a[k];
        }
        uh += coeffs[space.linear_index(idx)] * phi;
        int k = d - 1;
        while (k >= 0 && a[k] == space.direction(k).degree()) a[k--] = 0;
        if (k < 0) break;
        ++a[k];
      }
      const double e = uh - u(x);
      sum += w * e * e;
      int k = d - 1;
      while (k >= 0 && q[k] + 1 == pts[k].size()) q[k--] = 0;
      if (k < 0) break;
      ++q[k];
    }
    int k = d - 1;
    while (k >= 0 && elem[k] == nel[k] - 1) elem[k--] = 0;
    if (k < 0) break;
    ++elem[k];
  }
  return std::sqrt(sum);
}

ConvergenceReport run_poisson_convergence(int d, int degree, const std::vector<int>& meshes,
                                          const std::string& solution, Strategy strategy,
                                          double rate_tolerance) {
  ScalarField u, f;
  if (solution == "sine") {
    u = [](std::span<const double> x) {
      double v = 1.0;
      for (double xi : x) v *= std::sin(kPi * xi);
      return v;
    };
    f = [u, d](std::span<const double> x) { return d * kPi * kPi * u(x); };
  } else if (solution == "zero") {
    u = [](std::span<const double>) { return 0.0; };
    f = u;
  } else {
    throw ValidationError("unknown manufactured solution '" + solution + "'");
  }

  ConvergenceReport rep;
  rep.study = "poisson";
  rep.d = d;
  rep.degree = degree;
  rep.strategy = to_string(strategy);
  rep.quantity = "L2 error, u = " + solution;
  rep.meshes = validate_meshes(meshes);
  rep.expected_rate = degree + 1.0;
  rep.rate_tolerance = rate_tolerance < 0 ? default_rate_tolerance(degree) : rate_tolerance;
  const RuleSource rules = RuleSource::for_strategy(strategy, std::vector<int>{degree});
  for (int n : rep.meshes) {
    const TensorSpace space = TensorSpace::uniform(d, degree, n);
    const std::vector<double> coeffs = solve_poisson(space, f, rules);
    rep.h.push_back(1.0 / n);
    rep.errors.push_back(l2_error(space, coeffs, u));
  }
  rep.monotone = monotone_decay(rep.errors);
  rep.metadata = study_metadata();
  rep.metadata["error_quadrature"] = "Gauss-Legendre, p+2 points per element and direction";
  if (solution == "zero") {
    rep.fit = {std::nan(""), std::nan("")};
    rep.passed = std::all_of(rep.errors.begin(), rep.errors.end(), [](double e) { return e == 0.0; });
  } else {
    rep.fit = fit_rate(rep.h, rep.errors);
    rep.passed = std::abs(rep.fit.rate - rep.expected_rate) <= rep.rate_tolerance;
  }
  return rep;
}

}  // namespace wgq
