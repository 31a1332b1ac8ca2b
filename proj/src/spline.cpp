#include "wgq/spline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace wgq {

namespace {

constexpr double kUniformTol = 1e-14;

// Basis values of degree p (and p-1) on one span, local-knot form.
// `lk` holds the 2p knots t_{mu-p+1} .. t_{mu+p} as offsets from xi_e.
void cox_de_boor(int p, double u, std::span<const double> lk,
                 std::span<double> vals, std::span<double> derivs) {
  std::array<double, 16> left{}, right{}, lower{};
  vals[0] = 1.0;
  if (p == 0) {
    derivs[0] = 0.0;
    return;
  }
  for (int j = 1; j <= p; ++j) {
    if (j == p) std::copy_n(vals.begin(), p, lower.begin());
    left[j] = u - lk[p - j];
    right[j] = lk[p - 1 + j] - u;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double tmp = vals[r] / (right[r + 1] + left[j - r]);
      vals[r] = saved + right[r + 1] * tmp;
      saved = left[j - r] * tmp;
    }
    vals[j] = saved;
  }
  for (int r = 0; r <= p; ++r) {
    double d = 0.0;
    if (r >= 1) d += lower[r - 1] / (lk[p - 1 + r] - lk[r - 1]);
    if (r <= p - 1) d -= lower[r] / (lk[p + r] - lk[r]);
    derivs[r] = p * d;
  }
}

}  // namespace

KnotVector::KnotVector(int degree, std::vector<double> breakpoints)
    : degree_(degree), breaks_(std::move(breakpoints)) {
  if (degree_ < 1 || degree_ > 15) throw SplineError("degree must be in [1, 15]");
  if (breaks_.size() < 2) throw SplineError("need at least one element");
  if (breaks_.front() != 0.0 || breaks_.back() != 1.0)
    throw SplineError("breakpoints must span [0, 1]");
  for (std::size_t k = 1; k < breaks_.size(); ++k)
    if (!(breaks_[k] > breaks_[k - 1]))
      throw SplineError("breakpoints must be strictly increasing");
  // Compared against k/n positions: spacing differences of k/n breakpoints
  // carry rounding of order eps/h, which would misclassify fine meshes.
  const auto n = static_cast<double>(breaks_.size() - 1);
  uniform_ = true;
  for (std::size_t k = 1; k + 1 < breaks_.size(); ++k)
    if (std::abs(breaks_[k] - static_cast<double>(k) / n) > kUniformTol) uniform_ = false;
}

KnotVector KnotVector::uniform(int degree, int elements) {
  if (elements < 1) throw SplineError("element count must be positive");
  std::vector<double> b(elements + 1);
  for (int k = 0; k <= elements; ++k) b[k] = static_cast<double>(k) / elements;
  b.back() = 1.0;
  return KnotVector(degree, std::move(b));
}

std::vector<double> KnotVector::knots() const {
  const int n = num_elements();
  std::vector<double> t;
  t.reserve(n + 2 * degree_ + 1);
  for (int k = 0; k < n + 2 * degree_ + 1; ++k) t.push_back(breaks_[breakpoint_index(k)]);
  return t;
}

int KnotVector::breakpoint_index(int k) const {
  return std::clamp(k - degree_, 0, num_elements());
}

int KnotVector::find_element(double x) const {
  const int n = num_elements();
  if (x >= breaks_.back()) return n - 1;
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
  return std::clamp(static_cast<int>(it - breaks_.begin()) - 1, 0, n - 1);
}

SplineSpace::SplineSpace(KnotVector knots) : knots_(std::move(knots)) {}

void SplineSpace::check_index(int i) const {
  if (i < 0 || i >= dim())
    throw SplineError("basis index " + std::to_string(i) + " out of range [0, " +
                      std::to_string(dim()) + ")");
}

void SplineSpace::check_point(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw SplineError("evaluation point outside [0, 1]");
}

void SplineSpace::local_knots(int e, std::span<double> out) const {
  const int p = degree();
  const int mu = e + p;
  const double x0 = knots_.breakpoints()[e];
  const double w = knots_.element_width(e);
  for (int r = 0; r < 2 * p; ++r) {
    const int b = knots_.breakpoint_index(mu - p + 1 + r);
    out[r] = knots_.is_uniform() ? static_cast<double>(b - e)
                                 : (knots_.breakpoints()[b] - x0) / w;
  }
}

SpanValues SplineSpace::eval_span_local(int e, double t) const {
  if (e < 0 || e >= num_elements()) throw SplineError("element index out of range");
  const int p = degree();
  std::array<double, 32> lk{};
  local_knots(e, lk);
  SpanValues out;
  out.first = e;
  out.values.assign(p + 1, 0.0);
  out.derivs.assign(p + 1, 0.0);
  cox_de_boor(p, t, std::span<const double>(lk.data(), 2 * p), out.values, out.derivs);
  const double inv_w = 1.0 / knots_.element_width(e);
  for (double& d : out.derivs) d *= inv_w;
  return out;
}

SpanValues SplineSpace::eval_span(double x) const {
  check_point(x);
  const int e = knots_.find_element(x);
  const double t = knots_.is_uniform() ? x * num_elements() - e
                                       : (x - knots_.breakpoints()[e]) / knots_.element_width(e);
  return eval_span_local(e, t);
}

double SplineSpace::eval_piece(int i, int e, double t) const {
  if (i < e || i > e + degree()) return 0.0;
  return eval_span_local(e, t).values[i - e];
}

double SplineSpace::eval_piece_deriv(int i, int e, double t) const {
  if (i < e || i > e + degree()) return 0.0;
  return eval_span_local(e, t).derivs[i - e];
}

double SplineSpace::eval_basis(int i, double x) const {
  check_index(i);
  const SpanValues s = eval_span(x);
  if (i < s.first || i > s.first + degree()) return 0.0;
  return s.values[i - s.first];
}

double SplineSpace::eval_deriv(int i, double x) const {
  check_index(i);
  const SpanValues s = eval_span(x);
  if (i < s.first || i > s.first + degree()) return 0.0;
  return s.derivs[i - s.first];
}

int SplineSpace::support_first_element(int i) const {
  check_index(i);
  return std::max(0, i - degree());
}

int SplineSpace::support_end_element(int i) const {
  check_index(i);
  return std::min(num_elements(), i + 1);
}

Interval SplineSpace::support(int i) const {
  const auto& b = knots_.breakpoints();
  return {b[support_first_element(i)], b[support_end_element(i)]};
}

std::vector<int> SplineSpace::interacting_indices(int j) const {
  check_index(j);
  const int p = degree();
  std::vector<int> out;
  for (int i = std::max(0, j - p); i <= std::min(dim() - 1, j + p); ++i) out.push_back(i);
  return out;
}

bool SplineSpace::is_cardinal(int j) const {
  check_index(j);
  return knots_.is_uniform() && j - degree() >= 0 && j + 1 <= num_elements();
}

CardinalPatch::CardinalPatch(int degree) : degree_(degree) {
  if (degree != 2 && degree != 3) throw SplineError("cardinal patch supports p = 2, 3");
}

double CardinalPatch::value(double x) const {
  if (x <= 0.0 || x >= degree_ + 1) return 0.0;
  if (degree_ == 2) {
    if (x < 1.0) return 0.5 * x * x;
    if (x < 2.0) return 0.5 * (-2.0 * x * x + 6.0 * x - 3.0);
    const double y = 3.0 - x;
    return 0.5 * y * y;
  }
  if (x < 1.0) return x * x * x / 6.0;
  if (x < 2.0) return (((-3.0 * x + 12.0) * x - 12.0) * x + 4.0) / 6.0;
  if (x < 3.0) return (((3.0 * x - 24.0) * x + 60.0) * x - 44.0) / 6.0;
  const double y = 4.0 - x;
  return y * y * y / 6.0;
}

double CardinalPatch::deriv(double x) const {
  if (x <= 0.0 || x >= degree_ + 1) return 0.0;
  if (degree_ == 2) {
    if (x < 1.0) return x;
    if (x < 2.0) return -2.0 * x + 3.0;
    return x - 3.0;
  }
  if (x < 1.0) return 0.5 * x * x;
  if (x < 2.0) return (-9.0 * x * x + 24.0 * x - 12.0) / 6.0;
  if (x < 3.0) return (9.0 * x * x - 48.0 * x + 60.0) / 6.0;
  const double y = 4.0 - x;
  return -0.5 * y * y;
}

}  // namespace wgq
