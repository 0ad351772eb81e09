#pragma once

// Exterior algebra on a single coordinate chart. A KForm stores its
// coefficients densely: one real per strictly increasing multi-index, in
// lexicographic order. Forms are immutable; every operation returns a new
// form whose coefficient function evaluates its operands lazily.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "eqloc/function.hpp"

namespace eqloc {

using Point = std::vector<double>;
using TangentVector = std::vector<double>;
using Covector = std::vector<double>;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

int binomial(int n, int k);

// Strictly increasing axis list, 0-based (axis i is the coordinate x_{i+1}).
struct MultiIndex {
  std::vector<int> axes;

  std::uint32_t mask() const;
  static MultiIndex from_mask(std::uint32_t mask);
  int degree() const { return static_cast<int>(axes.size()); }
  bool operator==(const MultiIndex&) const = default;
};

// All C(n, k) multi-indices of length k in lexicographic order.
const std::vector<MultiIndex>& multi_indices(int n, int k);
// Position of a multi-index in that enumeration.
int index_of(int n, const MultiIndex& index);
int index_of_mask(int n, std::uint32_t mask);

class KForm {
 public:
  KForm(int dim, int degree, Function coefficients);

  static KForm zero(int dim, int degree);
  static KForm constant(int dim, int degree, std::vector<double> components);
  static KForm scalar(int dim, Function f);
  // dx_{i_1} ^ ... ^ dx_{i_k} with 0-based axes.
  static KForm basis(int dim, const MultiIndex& index);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  int size() const { return binomial(dim_, degree_); }
  bool is_zero() const { return !coeff_.valid(); }
  int max_order() const { return is_zero() ? kMaxOrder : coeff_.max_order(); }
  const Function& coefficients() const { return coeff_; }

  template <class S>
  void eval(std::span<const S> x, std::span<S> out) const {
    if (is_zero()) {
      for (auto& v : out) v = S(0.0);
      return;
    }
    coeff_(x, out);
  }
  std::vector<double> operator()(std::span<const double> x) const;

 private:
  KForm(int dim, int degree) : dim_(dim), degree_(degree) {}

  int dim_ = 0;
  int degree_ = 0;
  Function coeff_;
};

KForm operator+(const KForm& a, const KForm& b);
KForm operator-(const KForm& a, const KForm& b);
KForm operator-(const KForm& a);
KForm operator*(double c, const KForm& a);

KForm wedge(const KForm& a, const KForm& b);
// Interior product with the vector field v (components R^n -> R^n).
KForm contract(const Function& v, const KForm& a);
// Returns nullopt when a is top-degree: no form of degree n+1 exists.
std::optional<KForm> exterior_derivative(const KForm& a, const Differentiation& diff = {});

// Optional box that the image of a chart map must stay in.
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;
  bool contains(std::span<const double> p, double slack = 1e-12) const;
};

// Pullback along F: source chart (F.in_dim) -> target chart (F.out_dim).
KForm pullback(const Function& F, const KForm& a, const Differentiation& diff = {},
               std::optional<Box> target_domain = std::nullopt);

// Pullback along the coordinate projection R^dim -> R^a.dim() that keeps
// the axes offset .. offset + a.dim() - 1. No derivatives are needed.
KForm extend(const KForm& a, int dim, int offset = 0);

double eval_on_frame(const KForm& a, std::span<const double> p,
                     std::span<const TangentVector> vectors);

// Determinant by signed expansion over column subsets. Exact for Dual
// scalars, unlike elimination with pivoting.
template <class S>
S determinant(std::span<const S> m, int k) {
  if (k == 0) return S(1.0);
  if (k == 1) return m[0];
  if (k == 2) return m[0] * m[3] - m[1] * m[2];
  const std::uint32_t full = (1u << k) - 1u;
  std::array<S, 256> partial_det;
  for (std::uint32_t i = 0; i <= full; ++i) partial_det[i] = S(0.0);
  partial_det[0] = S(1.0);
  for (std::uint32_t used = 0; used < full; ++used) {
    const int row = __builtin_popcount(used);
    const S& base = partial_det[used];
    if (primal(base) == 0.0 && jet_order_v<S> == 0) continue;
    for (int c = 0; c < k; ++c) {
      if (used & (1u << c)) continue;
      const int larger = __builtin_popcount(used >> (c + 1));
      const S term = base * m[static_cast<std::size_t>(row * k + c)];
      if (larger % 2 == 0)
        partial_det[used | (1u << c)] += term;
      else
        partial_det[used | (1u << c)] -= term;
    }
  }
  return partial_det[full];
}

class MixedForm {
 public:
  explicit MixedForm(int dim);
  MixedForm(const KForm& part);  // NOLINT: a homogeneous form is a mixed form

  int dim() const { return dim_; }
  // Degree-k part; a zero form when absent.
  KForm grade(int k) const;
  bool has(int k) const;
  std::vector<int> degrees() const;
  MixedForm with(const KForm& part) const;  // replaces the degree of `part`
  int max_order() const;

 private:
  int dim_;
  std::vector<std::optional<KForm>> parts_;
};

KForm grade(const MixedForm& a, int k);
MixedForm operator+(const MixedForm& a, const MixedForm& b);
MixedForm operator-(const MixedForm& a);
MixedForm wedge(const MixedForm& a, const MixedForm& b);
MixedForm exterior_derivative(const MixedForm& a, const Differentiation& diff = {});
MixedForm contract(const Function& v, const MixedForm& a);
MixedForm pullback(const Function& F, const MixedForm& a, const Differentiation& diff = {});
MixedForm extend(const MixedForm& a, int dim, int offset = 0);
// e^u (1 + b + b^2/2! + ...) for a = u + b with u a function and b a 2-form,
// truncated at the chart dimension.
MixedForm exp_even(const MixedForm& a);

}  // namespace eqloc
