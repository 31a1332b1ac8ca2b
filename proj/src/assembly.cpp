#include "wgq/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <thread>

#include "wgq/oracle.hpp"

namespace wgq {

// ---------------------------------------------------------------------------
// TensorSpace / AffineMap / counters

TensorSpace::TensorSpace(std::vector<SplineSpace> directions) : dirs_(std::move(directions)) {
  if (dirs_.empty() || dirs_.size() > 3) throw AssemblyError("tensor spaces have 1 to 3 directions");
  for (const auto& s : dirs_) num_dofs_ *= s.dim();
}

TensorSpace TensorSpace::uniform(int d, int degree, int elements) {
  std::vector<SplineSpace> dirs;
  for (int k = 0; k < d; ++k) dirs.push_back(SplineSpace::uniform(degree, elements));
  return TensorSpace(std::move(dirs));
}

std::vector<int> TensorSpace::dims() const {
  std::vector<int> out;
  for (const auto& s : dirs_) out.push_back(s.dim());
  return out;
}

std::vector<int> TensorSpace::degrees() const {
  std::vector<int> out;
  for (const auto& s : dirs_) out.push_back(s.degree());
  return out;
}

std::vector<int> TensorSpace::multi_index(int linear) const {
  std::vector<int> idx(d());
  for (int k = d() - 1; k >= 0; --k) {
    idx[k] = linear % dirs_[k].dim();
    linear /= dirs_[k].dim();
  }
  return idx;
}

int TensorSpace::linear_index(std::span<const int> multi) const {
  int lin = 0;
  for (int k = 0; k < d(); ++k) lin = lin * dirs_[k].dim() + multi[k];
  return lin;
}

std::vector<int> TensorSpace::interior_dofs() const {
  std::vector<int> out;
  for (int r = 0; r < num_dofs_; ++r) {
    const auto idx = multi_index(r);
    bool inside = true;
    for (int k = 0; k < d(); ++k)
      if (idx[k] == 0 || idx[k] == dirs_[k].dim() - 1) inside = false;
    if (inside) out.push_back(r);
  }
  return out;
}

AffineMap AffineMap::box(std::vector<double> lo, std::vector<double> hi) {
  AffineMap m;
  for (std::size_t k = 0; k < lo.size(); ++k) {
    m.scale.push_back(hi[k] - lo[k]);
    m.offset.push_back(lo[k]);
  }
  return m;
}

double AffineMap::det() const {
  double v = 1.0;
  for (double s : scale) v *= s;
  return v;
}

void AffineMap::validate(int d) const {
  if (static_cast<int>(scale.size()) != d || static_cast<int>(offset.size()) != d)
    throw AssemblyError("affine map dimension does not match the space");
  for (double s : scale)
    if (!(s > 0.0)) throw AssemblyError("affine scales must be positive");
}

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::StandardGauss: return "standard";
    case Strategy::NcWeighted: return "nc-weighted";
    case Strategy::GaussWeighted: return "gauss-weighted";
  }
  return "?";
}

Strategy strategy_from_string(const std::string& name) {
  if (name == "standard" || name == "standard-gauss") return Strategy::StandardGauss;
  if (name == "nc-weighted") return Strategy::NcWeighted;
  if (name == "gauss-weighted") return Strategy::GaussWeighted;
  throw AssemblyError("unknown strategy '" + name + "'");
}

void EvalCounter::merge(const EvalCounter& other) {
  for (std::size_t s = 0; s < tallies_.size(); ++s) tallies_[s] += other.tallies_[s];
}

// ---------------------------------------------------------------------------
// RuleSource

RuleSource RuleSource::gaussian(std::span<const int> degrees) {
  RuleSource src(Strategy::GaussWeighted);
  for (int p : degrees)
    for (RuleKind kind : {RuleKind::Mass, RuleKind::Stiffness})
      if (!src.has(p, kind)) src.add(gaussian_rule(p, kind));
  return src;
}

RuleSource RuleSource::newton_cotes(std::span<const int> degrees) {
  RuleSource src(Strategy::NcWeighted);
  for (int p : degrees)
    for (RuleKind kind : {RuleKind::Mass, RuleKind::Stiffness})
      if (!src.has(p, kind)) src.add(cardinal_newton_cotes_rule(p, kind));
  return src;
}

RuleSource RuleSource::for_strategy(Strategy s, std::span<const int> degrees) {
  if (s == Strategy::GaussWeighted) return gaussian(degrees);
  if (s == Strategy::NcWeighted) return newton_cotes(degrees);
  return RuleSource(Strategy::StandardGauss);
}

void RuleSource::add(WeightedRule rule) {
  if (!rule.is_cardinal()) throw AssemblyError("rule sources hold cardinal rules");
  rules_[{rule.degree, rule.kind}] = std::move(rule);
}

bool RuleSource::has(int degree, RuleKind kind) const { return rules_.count({degree, kind}) > 0; }

const WeightedRule& RuleSource::get(int degree, RuleKind kind) const {
  const auto it = rules_.find({degree, kind});
  if (it == rules_.end())
    throw AssemblyError(std::string("missing ") + to_string(kind) + " rule for degree " +
                        std::to_string(degree));
  return it->second;
}

// ---------------------------------------------------------------------------
// Univariate row factors

namespace {

// Relative zero test for weight values at rule nodes (unit-spacing units).
constexpr double kRedundantTol = 1e-14;

struct RowFactors {
  int first = 0;
  std::vector<double> mass;
  std::vector<double> stiff;
  std::uint64_t value_evals = 0;
  std::uint64_t deriv_evals = 0;
  // Sum over nodes of the number of functions nonzero there.
  std::uint64_t mass_node_funcs = 0;
  std::uint64_t stiff_node_funcs = 0;
};

int count_nonzero(const std::vector<double>& v) {
  return static_cast<int>(std::count_if(v.begin(), v.end(), [](double x) { return x != 0.0; }));
}

void apply_rule(const SplineSpace& space, int j, const WeightedRule& rule, RowFactors& f) {
  const int p = space.degree();
  const int e0 = j - p;
  const bool mass = rule.kind == RuleKind::Mass;
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const int e = e0 + rule.node_elements[k];
    const double h = space.knots().element_width(e);
    const SpanValues sv = space.eval_span_local(e, rule.node_locals[k]);
    const auto& vals = mass ? sv.values : sv.derivs;
    const double w = vals[j - e];
    if (std::abs(mass ? w : w * h) <= kRedundantTol) continue;
    const double eff = rule.weights[k] * h * w;
    auto& target = mass ? f.mass : f.stiff;
    for (int r = 0; r <= p; ++r) target[e + r - f.first] += eff * vals[r];
    const int nz = count_nonzero(vals);
    if (mass) {
      f.value_evals += nz;
      f.mass_node_funcs += nz;
    } else {
      f.deriv_evals += nz;
      f.stiff_node_funcs += nz;
    }
  }
}

RowFactors weighted_factors(const SplineSpace& space, int j, const RuleSource& rules, bool need_mass,
                            bool need_stiff) {
  RowFactors f;
  f.first = std::max(0, j - space.degree());
  const int count = std::min(space.dim() - 1, j + space.degree()) - f.first + 1;
  if (need_mass) {
    f.mass.assign(count, 0.0);
    apply_rule(space, j, rules.get(space.degree(), RuleKind::Mass), f);
  }
  if (need_stiff) {
    f.stiff.assign(count, 0.0);
    apply_rule(space, j, rules.get(space.degree(), RuleKind::Stiffness), f);
  }
  return f;
}

RowFactors gauss_factors(const SplineSpace& space, int j, bool need_mass, bool need_stiff) {
  const int p = space.degree();
  RowFactors f;
  f.first = std::max(0, j - p);
  const int count = std::min(space.dim() - 1, j + p) - f.first + 1;
  if (need_mass) f.mass.assign(count, 0.0);
  if (need_stiff) f.stiff.assign(count, 0.0);
  const GaussLegendreTable gl = gauss_legendre(p + 1);
  for (int e = space.support_first_element(j); e < space.support_end_element(j); ++e) {
    const double h = space.knots().element_width(e);
    for (int q = 0; q < gl.count; ++q) {
      const SpanValues sv = space.eval_span_local(e, gl.nodes[q]);
      const double w = gl.weights[q] * h;
      if (need_mass) {
        const double wj = w * sv.values[j - e];
        for (int r = 0; r <= p; ++r) f.mass[e + r - f.first] += wj * sv.values[r];
        const int nz = count_nonzero(sv.values);
        f.value_evals += nz;
        f.mass_node_funcs += nz;
      }
      if (need_stiff) {
        const double wj = w * sv.derivs[j - e];
        for (int r = 0; r <= p; ++r) f.stiff[e + r - f.first] += wj * sv.derivs[r];
        const int nz = count_nonzero(sv.derivs);
        f.deriv_evals += nz;
        f.stiff_node_funcs += nz;
      }
    }
  }
  return f;
}

EvalTally row_tally(const std::vector<RowFactors>& factors, RuleKind kind) {
  EvalTally t;
  const int d = static_cast<int>(factors.size());
  for (const auto& f : factors) {
    t.value_evals += f.value_evals;
    t.deriv_evals += f.deriv_evals;
  }
  if (kind == RuleKind::Mass) {
    std::uint64_t prod = 1;
    for (const auto& f : factors) prod *= f.mass_node_funcs;
    t.tensor_evals = prod;
  } else {
    for (int k = 0; k < d; ++k) {
      std::uint64_t prod = factors[k].stiff_node_funcs;
      for (int l = 0; l < d; ++l)
        if (l != k) prod *= factors[l].mass_node_funcs;
      t.tensor_evals += prod;
    }
  }
  return t;
}

// Writes one row from per-direction factors, walking columns in the same
// nested order as the stencil.
void fill_row(const TensorSpace& space, const AffineMap& map, RuleKind kind,
              const std::vector<RowFactors>& factors, std::span<const int> row_idx,
              std::span<double> out) {
  const int d = space.d();
  std::vector<int> lo(d), hi(d), cur(d);
  for (int k = 0; k < d; ++k) {
    const int p = space.direction(k).degree();
    lo[k] = std::max(0, row_idx[k] - p);
    hi[k] = std::min(space.direction(k).dim() - 1, row_idx[k] + p);
    cur[k] = lo[k];
  }
  const double det = map.det();
  std::size_t pos = 0;
  while (true) {
    double value;
    if (kind == RuleKind::Mass) {
      value = det;
      for (int k = 0; k < d; ++k) value *= factors[k].mass[cur[k] - factors[k].first];
    } else {
      value = 0.0;
      for (int k = 0; k < d; ++k) {
        double term = det / (map.scale[k] * map.scale[k]) * factors[k].stiff[cur[k] - factors[k].first];
        for (int l = 0; l < d; ++l)
          if (l != k) term *= factors[l].mass[cur[l] - factors[l].first];
        value += term;
      }
    }
    out[pos++] = value;
    int k = d - 1;
    while (k >= 0 && cur[k] == hi[k]) {
      cur[k] = lo[k];
      --k;
    }
    if (k < 0) break;
    ++cur[k];
  }
  if (pos != out.size()) throw std::logic_error("row stencil mismatch");
}

std::vector<int> bandwidths(const TensorSpace& space) { return space.degrees(); }

void check_symmetric(SparseMatrix& m) {
  const double defect = m.symmetry_defect();
  if (defect > 1e-12 * std::max(1.0, m.max_abs()))
    throw AssemblyError("assembled matrix is not symmetric (defect " + std::to_string(defect) + ")");
  m.symmetrize();
}

bool row_is_weighted(const TensorSpace& space, std::span<const int> idx) {
  for (int k = 0; k < space.d(); ++k)
    if (!space.direction(k).is_cardinal(idx[k])) return false;
  return true;
}

}  // namespace

bool is_degenerate(const TensorSpace& space) {
  for (int k = 0; k < space.d(); ++k)
    if (space.direction(k).num_elements() < space.direction(k).degree() + 1) return true;
  return false;
}

// ---------------------------------------------------------------------------

SparseMatrix assemble_rowwise(const TensorSpace& space, const AffineMap& map, RuleKind kind,
                              const RuleSource& rules, EvalCounter* counter,
                              const AssemblyOptions& options) {
  const int d = space.d();
  map.validate(d);
  if (rules.strategy() == Strategy::StandardGauss)
    throw AssemblyError("row-wise assembly needs a weighted rule source");
  for (int k = 0; k < d; ++k) {
    const SplineSpace& s = space.direction(k);
    if (!s.knots().is_uniform()) throw AssemblyError("weighted assembly requires uniform knot vectors");
  }
  const bool degenerate = is_degenerate(space);
  if (degenerate) {
    std::clog << "warning: mesh has fewer than p+1 elements in some direction; "
                 "assembling every row with standard Gauss\n";
  } else {
    for (int k = 0; k < d; ++k) {
      const int p = space.direction(k).degree();
      rules.get(p, RuleKind::Mass);
      if (kind == RuleKind::Stiffness) rules.get(p, RuleKind::Stiffness);
    }
  }

  const std::vector<int> dims = space.dims();
  const std::vector<int> bw = bandwidths(space);
  SparseMatrix m = SparseMatrix::tensor_stencil(dims, bw);
  const bool need_mass = kind == RuleKind::Mass || d > 1;
  const bool need_stiff = kind == RuleKind::Stiffness;
  const Strategy strategy = rules.strategy();

  auto work = [&](int row_begin, int row_end, EvalCounter& local) {
    std::vector<RowFactors> factors(d);
    for (int r = row_begin; r < row_end; ++r) {
      const std::vector<int> idx = space.multi_index(r);
      const bool weighted = !degenerate && row_is_weighted(space, idx);
      for (int k = 0; k < d; ++k)
        factors[k] = weighted ? weighted_factors(space.direction(k), idx[k], rules, need_mass, need_stiff)
                              : gauss_factors(space.direction(k), idx[k], need_mass, need_stiff);
      fill_row(space, map, kind, factors, idx, m.row_values(r));
      local[weighted ? strategy : Strategy::StandardGauss] += row_tally(factors, kind);
    }
  };

  const int n = m.rows();
  const int threads = std::clamp(options.threads, 1, std::max(1, n));
  std::vector<EvalCounter> tallies(threads);
  if (threads == 1) {
    work(0, n, tallies[0]);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const int b = std::min(n, t * chunk);
      const int e = std::min(n, b + chunk);
      pool.emplace_back([&, b, e, t] { work(b, e, tallies[t]); });
    }
    for (auto& th : pool) th.join();
  }
  if (counter)
    for (const auto& t : tallies) counter->merge(t);

  check_symmetric(m);
  return m;
}

SparseMatrix assemble_mass_rowwise(const TensorSpace& space, const AffineMap& map, const RuleSource& rules,
                                   EvalCounter* counter, const AssemblyOptions& options) {
  return assemble_rowwise(space, map, RuleKind::Mass, rules, counter, options);
}

SparseMatrix assemble_stiffness_rowwise(const TensorSpace& space, const AffineMap& map,
                                        const RuleSource& rules, EvalCounter* counter,
                                        const AssemblyOptions& options) {
  return assemble_rowwise(space, map, RuleKind::Stiffness, rules, counter, options);
}

// ---------------------------------------------------------------------------

SparseMatrix assemble_standard_gauss(const TensorSpace& space, const AffineMap& map, RuleKind kind,
                                     EvalCounter* counter) {
  const int d = space.d();
  map.validate(d);
  const std::vector<int> dims = space.dims();
  SparseMatrix m = SparseMatrix::tensor_stencil(dims, bandwidths(space));
  const double det = map.det();

  // Per direction and element: local (p+1)x(p+1) mass and stiffness blocks.
  struct Local {
    std::vector<std::vector<double>> mass, stiff;
  };
  std::vector<std::vector<Local>> blocks(d);
  for (int k = 0; k < d; ++k) {
    const SplineSpace& s = space.direction(k);
    const int p = s.degree();
    const GaussLegendreTable gl = gauss_legendre(p + 1);
    for (int e = 0; e < s.num_elements(); ++e) {
      Local loc;
      loc.mass.assign(p + 1, std::vector<double>(p + 1, 0.0));
      loc.stiff.assign(p + 1, std::vector<double>(p + 1, 0.0));
      const double h = s.knots().element_width(e);
      for (int q = 0; q < gl.count; ++q) {
        const SpanValues sv = s.eval_span_local(e, gl.nodes[q]);
        const double w = gl.weights[q] * h;
        for (int a = 0; a <= p; ++a)
          for (int b = 0; b <= p; ++b) {
            loc.mass[a][b] += w * (sv.values[a] * sv.values[b]);
            loc.stiff[a][b] += w * (sv.derivs[a] * sv.derivs[b]);
          }
      }
      blocks[k].push_back(std::move(loc));
    }
  }

  std::vector<int> nel(d), elem(d, 0), a(d), b(d), row(d), col(d);
  std::uint64_t elements = 1;
  for (int k = 0; k < d; ++k) {
    nel[k] = space.direction(k).num_elements();
    elements *= nel[k];
  }
  for (std::uint64_t count = 0; count < elements; ++count) {
    // Enumerate local index pairs (a, b) over the (p+1)^d x (p+1)^d block.
    std::fill(a.begin(), a.end(), 0);
    while (true) {
      for (int k = 0; k < d; ++k) row[k] = elem[k] + a[k];
      const int r = space.linear_index(row);
      std::fill(b.begin(), b.end(), 0);
      while (true) {
        double value;
        if (kind == RuleKind::Mass) {
          value = det;
          for (int k = 0; k < d; ++k) value *= blocks[k][elem[k]].mass[a[k]][b[k]];
        } else {
          value = 0.0;
          for (int k = 0; k < d; ++k) {
            double term = det / (map.scale[k] * map.scale[k]) * blocks[k][elem[k]].stiff[a[k]][b[k]];
            for (int l = 0; l < d; ++l)
              if (l != k) term *= blocks[l][elem[l]].mass[a[l]][b[l]];
            value += term;
          }
        }
        for (int k = 0; k < d; ++k) col[k] = elem[k] + b[k];
        m.values()[m.find(r, space.linear_index(col))] += value;
        int k = d - 1;
        while (k >= 0 && b[k] == space.direction(k).degree()) b[k--] = 0;
        if (k < 0) break;
        ++b[k];
      }
      int k = d - 1;
      while (k >= 0 && a[k] == space.direction(k).degree()) a[k--] = 0;
      if (k < 0) break;
      ++a[k];
    }
    int k = d - 1;
    while (k >= 0 && elem[k] == nel[k] - 1) elem[k--] = 0;
    if (k >= 0) ++elem[k];
  }

  if (counter) {
    EvalTally t;
    std::uint64_t pts = 1;
    for (int k = 0; k < d; ++k) {
      const std::uint64_t q = space.direction(k).degree() + 1;
      pts *= q * q;
      const std::uint64_t uni = q * q * elements;
      t.value_evals += uni;
      if (kind == RuleKind::Stiffness) t.deriv_evals += uni;
    }
    t.tensor_evals = pts * elements * (kind == RuleKind::Stiffness ? d : 1);
    (*counter)[Strategy::StandardGauss] += t;
  }
  return m;
}

// ---------------------------------------------------------------------------

SparseMatrix oracle_matrix_1d(const SplineSpace& space, RuleKind kind) {
  const int dims[] = {space.dim()};
  const int bw[] = {space.degree()};
  SparseMatrix m = SparseMatrix::tensor_stencil(dims, bw);
  for (int r = 0; r < m.rows(); ++r) {
    auto cols = m.row_cols(r);
    auto vals = m.row_values(r);
    for (std::size_t q = 0; q < cols.size(); ++q) vals[q] = exact_entry(space, kind, r, cols[q]);
  }
  return m;
}

SparseMatrix assemble_oracle(const TensorSpace& space, const AffineMap& map, RuleKind kind) {
  const int d = space.d();
  map.validate(d);
  std::vector<SparseMatrix> mass1d, stiff1d;
  for (int k = 0; k < d; ++k) {
    mass1d.push_back(oracle_matrix_1d(space.direction(k), RuleKind::Mass));
    if (kind == RuleKind::Stiffness) stiff1d.push_back(oracle_matrix_1d(space.direction(k), RuleKind::Stiffness));
  }
  SparseMatrix m = SparseMatrix::tensor_stencil(space.dims(), bandwidths(space));
  const double det = map.det();
  for (int r = 0; r < m.rows(); ++r) {
    const auto ri = space.multi_index(r);
    auto cols = m.row_cols(r);
    auto vals = m.row_values(r);
    for (std::size_t q = 0; q < cols.size(); ++q) {
      const auto ci = space.multi_index(cols[q]);
      if (kind == RuleKind::Mass) {
        double v = det;
        for (int k = 0; k < d; ++k) v *= mass1d[k].at(ri[k], ci[k]);
        vals[q] = v;
      } else {
        double v = 0.0;
        for (int k = 0; k < d; ++k) {
          double term = det / (map.scale[k] * map.scale[k]) * stiff1d[k].at(ri[k], ci[k]);
          for (int l = 0; l < d; ++l)
            if (l != k) term *= mass1d[l].at(ri[l], ci[l]);
          v += term;
        }
        vals[q] = v;
      }
    }
  }
  return m;
}

// ---------------------------------------------------------------------------

std::vector<double> assemble_load(const TensorSpace& space, const AffineMap& map, const ScalarField& f,
                                  const RuleSource& rules) {
  const int d = space.d();
  map.validate(d);
  const bool degenerate = is_degenerate(space);
  const bool use_rules = rules.strategy() != Strategy::StandardGauss;

  struct Node {
    double x;
    double w;
  };
  auto rule_nodes = [&](const SplineSpace& s, int j) {
    std::vector<Node> out;
    const WeightedRule& rule = rules.get(s.degree(), RuleKind::Mass);
    const int e0 = j - s.degree();
    for (std::size_t k = 0; k < rule.size(); ++k) {
      const int e = e0 + rule.node_elements[k];
      const double h = s.knots().element_width(e);
      const double t = rule.node_locals[k];
      const double bj = s.eval_span_local(e, t).values[j - e];
      out.push_back({s.knots().breakpoints()[e] + t * h, rule.weights[k] * h * bj});
    }
    return out;
  };
  auto gauss_nodes = [&](const SplineSpace& s, int j) {
    std::vector<Node> out;
    const GaussLegendreTable gl = gauss_legendre(s.degree() + 1);
    for (int e = s.support_first_element(j); e < s.support_end_element(j); ++e) {
      const double h = s.knots().element_width(e);
      for (int q = 0; q < gl.count; ++q) {
        const double bj = s.eval_span_local(e, gl.nodes[q]).values[j - e];
        out.push_back({s.knots().breakpoints()[e] + gl.nodes[q] * h, gl.weights[q] * h * bj});
      }
    }
    return out;
  };

  std::vector<double> b(space.num_dofs(), 0.0);
  std::vector<std::vector<Node>> nodes(d);
  std::vector<double> x(d);
  std::vector<std::size_t> cur(d);
  for (int r = 0; r < space.num_dofs(); ++r) {
    const auto idx = space.multi_index(r);
    const bool weighted = use_rules && !degenerate && row_is_weighted(space, idx);
    for (int k = 0; k < d; ++k)
      nodes[k] = weighted ? rule_nodes(space.direction(k), idx[k]) : gauss_nodes(space.direction(k), idx[k]);
    std::fill(cur.begin(), cur.end(), 0);
    double sum = 0.0;
    while (true) {
      double w = 1.0;
      for (int k = 0; k < d; ++k) {
        x[k] = nodes[k][cur[k]].x;
        w *= nodes[k][cur[k]].w;
      }
      if (w != 0.0) sum += w * f(x);
      int k = d - 1;
      while (k >= 0 && cur[k] + 1 == nodes[k].size()) cur[k--] = 0;
      if (k < 0) break;
      ++cur[k];
    }
    b[r] = sum * map.det();
  }
  return b;
}

// ---------------------------------------------------------------------------

CountRatios count_ratios(const EvalCounter& standard, const EvalCounter& nc, const EvalCounter& gauss) {
  CountRatios out;
  out.standard = standard[Strategy::StandardGauss];
  out.nc_weighted = nc[Strategy::NcWeighted];
  out.gauss_weighted = gauss[Strategy::GaussWeighted];
  if (out.standard.tensor_evals == 0 || out.nc_weighted.tensor_evals == 0 ||
      out.gauss_weighted.tensor_evals == 0)
    throw AssemblyError("evaluation counters are empty");
  const auto g = static_cast<double>(out.gauss_weighted.tensor_evals);
  out.standard_over_gauss = static_cast<double>(out.standard.tensor_evals) / g;
  out.nc_over_gauss = static_cast<double>(out.nc_weighted.tensor_evals) / g;
  return out;
}

CountRatios count_ratio(const TensorSpace& space, RuleKind kind) {
  const std::vector<int> degrees = space.degrees();
  const AffineMap map = AffineMap::identity(space.d());
  EvalCounter standard, nc, gauss;
  assemble_standard_gauss(space, map, kind, &standard);
  assemble_rowwise(space, map, kind, RuleSource::newton_cotes(degrees), &nc);
  assemble_rowwise(space, map, kind, RuleSource::gaussian(degrees), &gauss);
  return count_ratios(standard, nc, gauss);
}

}  // namespace wgq
