#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace wgq {

class SplineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Open knot vector with maximal continuity: endpoints repeated p+1 times,
// interior breakpoints simple.
class KnotVector {
 public:
  KnotVector(int degree, std::vector<double> breakpoints);

  static KnotVector uniform(int degree, int elements);

  int degree() const { return degree_; }
  int num_elements() const { return static_cast<int>(breaks_.size()) - 1; }
  const std::vector<double>& breakpoints() const { return breaks_; }
  bool is_uniform() const { return uniform_; }

  // Full knot sequence t_0 .. t_{n+p}.
  std::vector<double> knots() const;

  // Breakpoint index of knot t_k (clamped into [0, num_elements]).
  int breakpoint_index(int k) const;

  // Uniform meshes report 1/n exactly; differencing rounded breakpoints
  // would put relative errors of order eps/h into derivative scaling.
  double element_width(int e) const {
    return uniform_ ? 1.0 / num_elements() : breaks_[e + 1] - breaks_[e];
  }

  // Element containing x; right-continuous except at the right endpoint.
  int find_element(double x) const;

 private:
  int degree_;
  std::vector<double> breaks_;
  bool uniform_ = false;
};

// Values (and first derivatives) of the p+1 basis functions that are
// supported on one element. Index 0 corresponds to basis function `first`.
struct SpanValues {
  int first = 0;
  std::vector<double> values;
  std::vector<double> derivs;
};

class SplineSpace {
 public:
  explicit SplineSpace(KnotVector knots);

  static SplineSpace uniform(int degree, int elements) {
    return SplineSpace(KnotVector::uniform(degree, elements));
  }

  const KnotVector& knots() const { return knots_; }
  int degree() const { return knots_.degree(); }
  int num_elements() const { return knots_.num_elements(); }
  int dim() const { return degree() + num_elements(); }

  double eval_basis(int i, double x) const;
  double eval_deriv(int i, double x) const;

  // Evaluates the polynomial piece of element `e` at local coordinate
  // t (x = xi_e + t * width_e). t outside [0,1] extrapolates that piece.
  // Knot offsets relative to xi_e are exact integers for uniform spaces,
  // so local evaluation keeps full relative accuracy on fine meshes.
  SpanValues eval_span_local(int e, double t) const;

  SpanValues eval_span(double x) const;

  // Value of basis i using the polynomial piece of element e (zero when i is
  // not one of the p+1 functions active on e).
  double eval_piece(int i, int e, double t) const;
  double eval_piece_deriv(int i, int e, double t) const;

  // First and one-past-last element index covered by supp(B_i).
  int support_first_element(int i) const;
  int support_end_element(int i) const;

  Interval support(int i) const;

  // All i whose support overlaps supp(B_j) on a set of positive measure.
  std::vector<int> interacting_indices(int j) const;

  // True when B_j is a shifted cardinal B-spline (p+1 elements of support
  // and no repeated knots in its local knot vector).
  bool is_cardinal(int j) const;

 private:
  void check_index(int i) const;
  void check_point(double x) const;
  // Local knot offsets t_k - xi_e in units of the width of element e, for
  // k = e+p-p .. e+p+p+1 (2p+2 knots around the span).
  void local_knots(int e, std::span<double> out) const;

  KnotVector knots_;
};

// Cardinal B-spline of degree p on integer knots 0..p+1.
class CardinalPatch {
 public:
  explicit CardinalPatch(int degree);

  int degree() const { return degree_; }
  Interval support() const { return {0.0, static_cast<double>(degree_ + 1)}; }

  // Closed-form piecewise evaluation.
  double value(double x) const;
  double deriv(double x) const;

  // Value of the translate B(x - shift), i.e. the cardinal function whose
  // support starts at `shift`.
  double value_shifted(int shift, double x) const { return value(x - shift); }
  double deriv_shifted(int shift, double x) const { return deriv(x - shift); }

 private:
  int degree_;
};

}  // namespace wgq
