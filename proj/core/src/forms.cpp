#include "eqloc/forms.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <memory>
#include <mutex>
#include <string>

namespace eqloc {

namespace {

// Multi-index tables for one chart dimension, built on first use.
struct IndexTable {
  std::vector<std::vector<MultiIndex>> by_degree;  // lexicographic per degree
  std::vector<int> position;                       // mask -> position

  explicit IndexTable(int n) : by_degree(static_cast<std::size_t>(n + 1)), position(std::size_t{1} << n, -1) {
    for (int k = 0; k <= n; ++k) {
      auto& list = by_degree[static_cast<std::size_t>(k)];
      std::vector<int> current;
      enumerate(n, k, 0, current, list);
      for (std::size_t i = 0; i < list.size(); ++i) position[list[i].mask()] = static_cast<int>(i);
    }
  }

  static void enumerate(int n, int k, int start, std::vector<int>& current,
                        std::vector<MultiIndex>& out) {
    if (static_cast<int>(current.size()) == k) {
      out.push_back(MultiIndex{current});
      return;
    }
    for (int a = start; a < n; ++a) {
      current.push_back(a);
      enumerate(n, k, a + 1, current, out);
      current.pop_back();
    }
  }
};

const IndexTable& table(int n) {
  static std::array<std::once_flag, kMaxDim * 2 + 1> once;
  static std::array<std::unique_ptr<const IndexTable>, kMaxDim * 2 + 1> tables;
  const auto i = static_cast<std::size_t>(n);
  std::call_once(once[i], [&] { tables[i] = std::make_unique<const IndexTable>(n); });
  return *tables[i];
}

void check_dim(int n) {
  if (n < 0 || n > kMaxDim * 2) throw DimensionError("chart dimension out of range: " + std::to_string(n));
}

// Sign of dx_I ^ dx_J relative to dx_{I u J}; zero if they overlap.
int merge_sign(std::uint32_t a, std::uint32_t b) {
  if (a & b) return 0;
  int inversions = 0;
  for (std::uint32_t rest = a; rest != 0; rest &= rest - 1) {
    const int i = std::countr_zero(rest);
    inversions += std::popcount(b & ((1u << i) - 1u));
  }
  return inversions % 2 == 0 ? 1 : -1;
}

struct WedgeTerm {
  int out;
  int a;
  int b;
  double sign;
};

struct ContractTerm {
  int out;
  int axis;
  int in;
  double sign;
};

template <class S>
using Span = std::span<S>;

}  // namespace

int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  int r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::uint32_t MultiIndex::mask() const {
  std::uint32_t m = 0;
  for (int a : axes) m |= 1u << a;
  return m;
}

MultiIndex MultiIndex::from_mask(std::uint32_t mask) {
  MultiIndex idx;
  for (std::uint32_t rest = mask; rest != 0; rest &= rest - 1) idx.axes.push_back(std::countr_zero(rest));
  return idx;
}

const std::vector<MultiIndex>& multi_indices(int n, int k) {
  check_dim(n);
  if (k < 0 || k > n) throw DimensionError("degree out of range");
  return table(n).by_degree[static_cast<std::size_t>(k)];
}

int index_of_mask(int n, std::uint32_t mask) {
  check_dim(n);
  if (mask >= (std::uint32_t{1} << n)) throw DimensionError("multi-index exceeds chart dimension");
  return table(n).position[mask];
}

int index_of(int n, const MultiIndex& index) {
  for (std::size_t i = 1; i < index.axes.size(); ++i)
    if (index.axes[i] <= index.axes[i - 1]) throw DimensionError("multi-index must be strictly increasing");
  return index_of_mask(n, index.mask());
}

// ---------------------------------------------------------------------------
// KForm

KForm::KForm(int dim, int degree, Function coefficients)
    : dim_(dim), degree_(degree), coeff_(std::move(coefficients)) {
  check_dim(dim);
  if (degree < 0 || degree > dim) throw DimensionError("form degree exceeds chart dimension");
  if (coeff_.valid() && (coeff_.in_dim() != dim || coeff_.out_dim() != binomial(dim, degree)))
    throw DimensionError("coefficient function has the wrong shape for a " + std::to_string(degree) +
                         "-form on a " + std::to_string(dim) + "-chart");
}

KForm KForm::zero(int dim, int degree) {
  check_dim(dim);
  if (degree < 0 || degree > dim) throw DimensionError("form degree exceeds chart dimension");
  return KForm(dim, degree);
}

KForm KForm::constant(int dim, int degree, std::vector<double> components) {
  if (static_cast<int>(components.size()) != binomial(dim, degree))
    throw DimensionError("wrong number of components");
  auto comps = std::make_shared<const std::vector<double>>(std::move(components));
  return KForm(dim, degree,
               Function(dim, binomial(dim, degree), [comps]<class S>(Span<const S>, Span<S> y) {
                 for (std::size_t i = 0; i < y.size(); ++i) y[i] = S((*comps)[i]);
               }));
}

KForm KForm::scalar(int dim, Function f) {
  if (f.out_dim() != 1) throw DimensionError("scalar field must have one component");
  return KForm(dim, 0, std::move(f));
}

KForm KForm::basis(int dim, const MultiIndex& index) {
  const int k = index.degree();
  std::vector<double> comps(static_cast<std::size_t>(binomial(dim, k)), 0.0);
  comps[static_cast<std::size_t>(index_of(dim, index))] = 1.0;
  return constant(dim, k, std::move(comps));
}

std::vector<double> KForm::operator()(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) throw DimensionError("point has the wrong dimension");
  std::vector<double> out(static_cast<std::size_t>(size()));
  eval<double>(x, out);
  return out;
}

namespace {

void require_same_shape(const KForm& a, const KForm& b) {
  if (a.dim() != b.dim()) throw DimensionError("forms live on charts of different dimension");
  if (a.degree() != b.degree()) throw DimensionError("forms have different degrees");
}

KForm linear_combination(double ca, const KForm& a, double cb, const KForm& b) {
  require_same_shape(a, b);
  if (b.is_zero()) return a.is_zero() ? a : (ca == 1.0 ? a : ca * a);
  if (a.is_zero()) return cb == 1.0 ? b : cb * b;
  const int m = a.size();
  return KForm(a.dim(), a.degree(),
               Function(a.dim(), m,
                        [a, b, ca, cb, m]<class S>(Span<const S> x, Span<S> y) {
                          Scratch<S> eb;
                          a.eval(x, y);
                          b.eval(x, eb.first(static_cast<std::size_t>(m)));
                          for (int i = 0; i < m; ++i) y[i] = ca * y[i] + cb * eb.data[i];
                        },
                        std::min(a.max_order(), b.max_order())));
}

}  // namespace

KForm operator+(const KForm& a, const KForm& b) { return linear_combination(1.0, a, 1.0, b); }
KForm operator-(const KForm& a, const KForm& b) { return linear_combination(1.0, a, -1.0, b); }
KForm operator-(const KForm& a) { return -1.0 * a; }

KForm operator*(double c, const KForm& a) {
  if (a.is_zero()) return a;
  return KForm(a.dim(), a.degree(),
               Function(a.dim(), a.size(),
                        [a, c]<class S>(Span<const S> x, Span<S> y) {
                          a.eval(x, y);
                          for (auto& v : y) v = c * v;
                        },
                        a.max_order()));
}

KForm wedge(const KForm& a, const KForm& b) {
  if (a.dim() != b.dim()) throw DimensionError("wedge: forms live on charts of different dimension");
  const int n = a.dim();
  const int degree = a.degree() + b.degree();
  if (degree > n) throw DimensionError("wedge: degree exceeds chart dimension");
  if (a.is_zero() || b.is_zero()) return KForm::zero(n, degree);

  auto terms = std::make_shared<std::vector<WedgeTerm>>();
  const auto& ia = multi_indices(n, a.degree());
  const auto& ib = multi_indices(n, b.degree());
  for (std::size_t i = 0; i < ia.size(); ++i) {
    for (std::size_t j = 0; j < ib.size(); ++j) {
      const int sign = merge_sign(ia[i].mask(), ib[j].mask());
      if (sign == 0) continue;
      terms->push_back({index_of_mask(n, ia[i].mask() | ib[j].mask()), static_cast<int>(i),
                        static_cast<int>(j), static_cast<double>(sign)});
    }
  }
  const int na = a.size();
  const int nb = b.size();
  std::shared_ptr<const std::vector<WedgeTerm>> table = std::move(terms);
  return KForm(n, degree,
               Function(n, binomial(n, degree),
                        [a, b, table, na, nb]<class S>(Span<const S> x, Span<S> y) {
                          Scratch<S> ea, eb;
                          a.eval(x, ea.first(static_cast<std::size_t>(na)));
                          b.eval(x, eb.first(static_cast<std::size_t>(nb)));
                          for (auto& v : y) v = S(0.0);
                          for (const auto& t : *table) {
                            if (t.sign > 0)
                              y[t.out] += ea.data[t.a] * eb.data[t.b];
                            else
                              y[t.out] -= ea.data[t.a] * eb.data[t.b];
                          }
                        },
                        std::min(a.max_order(), b.max_order())));
}

KForm contract(const Function& v, const KForm& a) {
  const int n = a.dim();
  if (a.degree() == 0) throw DimensionError("contract: cannot contract a 0-form");
  if (v.in_dim() != n || v.out_dim() != n) throw DimensionError("contract: vector field dimension mismatch");
  if (a.is_zero()) return KForm::zero(n, a.degree() - 1);

  auto terms = std::make_shared<std::vector<ContractTerm>>();
  const auto& out_indices = multi_indices(n, a.degree() - 1);
  for (std::size_t o = 0; o < out_indices.size(); ++o) {
    const std::uint32_t m = out_indices[o].mask();
    for (int axis = 0; axis < n; ++axis) {
      if (m & (1u << axis)) continue;
      // i(d/dx_axis) dx_K = (-1)^r dx_{K minus axis}, r = position of axis in K
      const int r = std::popcount(m & ((1u << axis) - 1u));
      terms->push_back({static_cast<int>(o), axis, index_of_mask(n, m | (1u << axis)),
                        r % 2 == 0 ? 1.0 : -1.0});
    }
  }
  const int na = a.size();
  std::shared_ptr<const std::vector<ContractTerm>> table = std::move(terms);
  return KForm(n, a.degree() - 1,
               Function(n, binomial(n, a.degree() - 1),
                        [v, a, table, na, n]<class S>(Span<const S> x, Span<S> y) {
                          Scratch<S> ea;
                          Scratch<S, kMaxDim * 2> ev;
                          a.eval(x, ea.first(static_cast<std::size_t>(na)));
                          v(x, ev.first(static_cast<std::size_t>(n)));
                          for (auto& c : y) c = S(0.0);
                          for (const auto& t : *table) {
                            if (t.sign > 0)
                              y[t.out] += ev.data[t.axis] * ea.data[t.in];
                            else
                              y[t.out] -= ev.data[t.axis] * ea.data[t.in];
                          }
                        },
                        std::min(a.max_order(), v.max_order())));
}

std::optional<KForm> exterior_derivative(const KForm& a, const Differentiation& diff) {
  const int n = a.dim();
  const int k = a.degree();
  if (k >= n) return std::nullopt;
  if (a.is_zero()) return KForm::zero(n, k + 1);
  const int order = derived_order(a.coefficients(), diff);
  if (order < 0)
    throw NotDifferentiable("exterior_derivative: coefficients are opaque; use the finite-difference mode");

  // (da)_K = sum_r (-1)^r d/dx_{K_r} a_{K minus K_r}
  auto terms = std::make_shared<std::vector<ContractTerm>>();
  const auto& out_indices = multi_indices(n, k + 1);
  for (std::size_t o = 0; o < out_indices.size(); ++o) {
    const auto& axes = out_indices[o].axes;
    const std::uint32_t m = out_indices[o].mask();
    for (std::size_t r = 0; r < axes.size(); ++r) {
      const int axis = axes[r];
      terms->push_back({static_cast<int>(o), axis, index_of_mask(n, m & ~(1u << axis)),
                        r % 2 == 0 ? 1.0 : -1.0});
    }
  }
  std::shared_ptr<const std::vector<ContractTerm>> table = std::move(terms);
  const Function coeff = a.coefficients();
  const int na = a.size();
  return KForm(n, k + 1,
               Function(n, binomial(n, k + 1),
                        [coeff, table, na, n, diff]<class S>(Span<const S> x, Span<S> y) {
                          std::array<Scratch<S>, kMaxDim * 2> grads;
                          for (int axis = 0; axis < n; ++axis)
                            partial<S>(coeff, x, axis, grads[static_cast<std::size_t>(axis)].first(static_cast<std::size_t>(na)), diff);
                          for (auto& c : y) c = S(0.0);
                          for (const auto& t : *table) {
                            const S& g = grads[static_cast<std::size_t>(t.axis)].data[static_cast<std::size_t>(t.in)];
                            if (t.sign > 0)
                              y[t.out] += g;
                            else
                              y[t.out] -= g;
                          }
                        },
                        order));
}

bool Box::contains(std::span<const double> p, double slack) const {
  for (std::size_t i = 0; i < p.size(); ++i)
    if (!(p[i] >= lower[i] - slack && p[i] <= upper[i] + slack)) return false;
  return true;
}

KForm pullback(const Function& F, const KForm& a, const Differentiation& diff,
               std::optional<Box> target_domain) {
  const int n = F.in_dim();
  const int m = F.out_dim();
  if (m != a.dim()) throw DimensionError("pullback: map target does not match the form's chart");
  const int k = a.degree();
  if (k > n) throw DimensionError("pullback: degree exceeds source dimension");
  if (a.is_zero()) return KForm::zero(n, k);
  const int order = std::min(k == 0 ? F.max_order() : derived_order(F, diff), a.max_order());
  if (order < 0) throw NotDifferentiable("pullback: map is not differentiable");

  const int n_out = binomial(n, k);
  const int n_in = a.size();
  auto domain = target_domain ? std::make_shared<const Box>(*target_domain) : nullptr;
  const std::vector<MultiIndex>* src = &multi_indices(n, k);
  const std::vector<MultiIndex>* dst = &multi_indices(m, k);
  return KForm(n, k,
               Function(n, n_out,
                        [F, a, diff, domain, n, m, k, n_out, n_in, src, dst]<class S>(Span<const S> x, Span<S> y) {
                          Scratch<S, kMaxDim * 2> image;
                          F(x, image.first(static_cast<std::size_t>(m)));
                          if (domain) {
                            std::array<double, kMaxDim * 2> p{};
                            for (int i = 0; i < m; ++i) p[static_cast<std::size_t>(i)] = primal(image.data[static_cast<std::size_t>(i)]);
                            if (!domain->contains(std::span<const double>(p.data(), static_cast<std::size_t>(m))))
                              throw std::domain_error("pullback: image point outside the target chart");
                          }
                          Scratch<S> comps;
                          a.eval(image.cfirst(static_cast<std::size_t>(m)), comps.first(static_cast<std::size_t>(n_in)));
                          if (k == 0) {
                            y[0] = comps.data[0];
                            return;
                          }
                          // jac[i][j] = dF_i / dx_j
                          std::array<std::array<S, kMaxDim * 2>, kMaxDim * 2> jac;
                          Scratch<S, kMaxDim * 2> column;
                          for (int j = 0; j < n; ++j) {
                            partial<S>(F, x, j, column.first(static_cast<std::size_t>(m)), diff);
                            for (int i = 0; i < m; ++i) jac[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = column.data[static_cast<std::size_t>(i)];
                          }
                          std::array<S, 64> minor;
                          for (int I = 0; I < n_out; ++I) {
                            S acc(0.0);
                            for (int J = 0; J < n_in; ++J) {
                              const S& c = comps.data[static_cast<std::size_t>(J)];
                              if (jet_order_v<S> == 0 && primal(c) == 0.0) continue;
                              const auto& rows = (*dst)[static_cast<std::size_t>(J)].axes;
                              const auto& cols = (*src)[static_cast<std::size_t>(I)].axes;
                              for (int r = 0; r < k; ++r)
                                for (int q = 0; q < k; ++q)
                                  minor[static_cast<std::size_t>(r * k + q)] =
                                      jac[static_cast<std::size_t>(rows[static_cast<std::size_t>(r)])][static_cast<std::size_t>(cols[static_cast<std::size_t>(q)])];
                              acc += c * determinant<S>(std::span<const S>(minor.data(), static_cast<std::size_t>(k * k)), k);
                            }
                            y[I] = acc;
                          }
                        },
                        order));
}

KForm extend(const KForm& a, int dim, int offset) {
  check_dim(dim);
  const int n = a.dim();
  const int k = a.degree();
  if (offset < 0 || offset + n > dim) throw DimensionError("extend: axes fall outside the target chart");
  if (a.is_zero()) return KForm::zero(dim, k);
  const int n_in = a.size();
  const int n_out = binomial(dim, k);
  auto position = std::make_shared<std::vector<int>>();
  for (const auto& idx : multi_indices(n, k)) position->push_back(index_of_mask(dim, idx.mask() << offset));
  return KForm(dim, k,
               Function(
                   dim, n_out,
                   [a, position, n, offset, n_in]<class S>(Span<const S> x, Span<S> y) {
                     Scratch<S> comps;
                     a.eval(x.subspan(static_cast<std::size_t>(offset), static_cast<std::size_t>(n)),
                            comps.first(static_cast<std::size_t>(n_in)));
                     for (auto& v : y) v = S(0.0);
                     for (int J = 0; J < n_in; ++J)
                       y[static_cast<std::size_t>((*position)[static_cast<std::size_t>(J)])] = comps.data[static_cast<std::size_t>(J)];
                   },
                   a.max_order()));
}

double eval_on_frame(const KForm& a, std::span<const double> p, std::span<const TangentVector> vectors) {
  const int n = a.dim();
  const int k = a.degree();
  if (static_cast<int>(vectors.size()) != k)
    throw DimensionError("eval_on_frame: expected " + std::to_string(k) + " vectors");
  for (const auto& v : vectors)
    if (static_cast<int>(v.size()) != n) throw DimensionError("eval_on_frame: vector dimension mismatch");
  const auto comps = a(p);
  const auto& indices = multi_indices(n, k);
  std::vector<double> minor(static_cast<std::size_t>(k * k));
  double total = 0.0;
  for (std::size_t I = 0; I < indices.size(); ++I) {
    if (comps[I] == 0.0) continue;
    for (int r = 0; r < k; ++r)
      for (int q = 0; q < k; ++q)
        minor[static_cast<std::size_t>(r * k + q)] =
            vectors[static_cast<std::size_t>(q)][static_cast<std::size_t>(indices[I].axes[static_cast<std::size_t>(r)])];
    total += comps[I] * determinant<double>(minor, k);
  }
  return total;
}

// ---------------------------------------------------------------------------
// MixedForm

MixedForm::MixedForm(int dim) : dim_(dim), parts_(static_cast<std::size_t>(dim + 1)) { check_dim(dim); }

MixedForm::MixedForm(const KForm& part) : MixedForm(part.dim()) {
  parts_[static_cast<std::size_t>(part.degree())] = part;
}

KForm MixedForm::grade(int k) const {
  if (k < 0 || k > dim_) throw DimensionError("grade: degree out of range");
  const auto& p = parts_[static_cast<std::size_t>(k)];
  return p ? *p : KForm::zero(dim_, k);
}

bool MixedForm::has(int k) const {
  return k >= 0 && k <= dim_ && parts_[static_cast<std::size_t>(k)].has_value() &&
         !parts_[static_cast<std::size_t>(k)]->is_zero();
}

std::vector<int> MixedForm::degrees() const {
  std::vector<int> out;
  for (int k = 0; k <= dim_; ++k)
    if (has(k)) out.push_back(k);
  return out;
}

MixedForm MixedForm::with(const KForm& part) const {
  if (part.dim() != dim_) throw DimensionError("mixed form part has the wrong chart dimension");
  MixedForm out = *this;
  out.parts_[static_cast<std::size_t>(part.degree())] = part;
  return out;
}

int MixedForm::max_order() const {
  int order = kMaxOrder;
  for (int k : degrees()) order = std::min(order, grade(k).max_order());
  return order;
}

KForm grade(const MixedForm& a, int k) { return a.grade(k); }

MixedForm operator+(const MixedForm& a, const MixedForm& b) {
  if (a.dim() != b.dim()) throw DimensionError("mixed forms live on charts of different dimension");
  MixedForm out(a.dim());
  for (int k = 0; k <= a.dim(); ++k) {
    if (a.has(k) && b.has(k))
      out = out.with(a.grade(k) + b.grade(k));
    else if (a.has(k))
      out = out.with(a.grade(k));
    else if (b.has(k))
      out = out.with(b.grade(k));
  }
  return out;
}

MixedForm operator-(const MixedForm& a) {
  MixedForm out(a.dim());
  for (int k : a.degrees()) out = out.with(-a.grade(k));
  return out;
}

namespace {

KForm sum_of(const std::vector<KForm>& terms, int dim, int degree) {
  if (terms.empty()) return KForm::zero(dim, degree);
  if (terms.size() == 1) return terms.front();
  const int m = binomial(dim, degree);
  int order = kMaxOrder;
  for (const auto& t : terms) order = std::min(order, t.max_order());
  auto list = std::make_shared<const std::vector<KForm>>(terms);
  return KForm(dim, degree,
               Function(dim, m,
                        [list, m]<class S>(Span<const S> x, Span<S> y) {
                          Scratch<S> tmp;
                          (*list)[0].eval(x, y);
                          for (std::size_t t = 1; t < list->size(); ++t) {
                            (*list)[t].eval(x, tmp.first(static_cast<std::size_t>(m)));
                            for (int i = 0; i < m; ++i) y[i] += tmp.data[static_cast<std::size_t>(i)];
                          }
                        },
                        order));
}

}  // namespace

MixedForm wedge(const MixedForm& a, const MixedForm& b) {
  if (a.dim() != b.dim()) throw DimensionError("wedge: mixed forms live on charts of different dimension");
  const int n = a.dim();
  std::vector<std::vector<KForm>> by_degree(static_cast<std::size_t>(n + 1));
  for (int i : a.degrees())
    for (int j : b.degrees())
      if (i + j <= n) by_degree[static_cast<std::size_t>(i + j)].push_back(wedge(a.grade(i), b.grade(j)));
  MixedForm out(n);
  for (int k = 0; k <= n; ++k)
    if (!by_degree[static_cast<std::size_t>(k)].empty()) out = out.with(sum_of(by_degree[static_cast<std::size_t>(k)], n, k));
  return out;
}

MixedForm exterior_derivative(const MixedForm& a, const Differentiation& diff) {
  MixedForm out(a.dim());
  for (int k : a.degrees())
    if (auto d = exterior_derivative(a.grade(k), diff)) out = out.with(*d);
  return out;
}

MixedForm contract(const Function& v, const MixedForm& a) {
  MixedForm out(a.dim());
  for (int k : a.degrees())
    if (k > 0) out = out.with(contract(v, a.grade(k)));
  return out;
}

MixedForm pullback(const Function& F, const MixedForm& a, const Differentiation& diff) {
  MixedForm out(F.in_dim());
  for (int k : a.degrees())
    if (k <= F.in_dim()) out = out.with(pullback(F, a.grade(k), diff));
  return out;
}

MixedForm extend(const MixedForm& a, int dim, int offset) {
  MixedForm out(dim);
  for (int k : a.degrees()) out = out.with(extend(a.grade(k), dim, offset));
  return out;
}

MixedForm exp_even(const MixedForm& a) {
  for (int k : a.degrees())
    if (k != 0 && k != 2) throw DimensionError("exp_even: only degree 0 and 2 parts are allowed");
  const int n = a.dim();
  KForm scale = KForm::constant(n, 0, {1.0});
  if (a.has(0)) {
    const KForm u = a.grade(0);
    scale = KForm(n, 0,
                  Function(n, 1,
                           [u]<class S>(Span<const S> x, Span<S> y) {
                             u.eval(x, y);
                             y[0] = exp(y[0]);
                           },
                           u.max_order()));
  }
  MixedForm out(n);
  out = out.with(scale);
  if (!a.has(2)) return out;
  const KForm beta = a.grade(2);
  KForm power = beta;
  double factorial = 1.0;
  for (int k = 1; 2 * k <= n; ++k) {
    factorial *= k;
    out = out.with(wedge(scale, (1.0 / factorial) * power));
    if (2 * (k + 1) <= n) power = wedge(power, beta);
  }
  return out;
}

}  // namespace eqloc
