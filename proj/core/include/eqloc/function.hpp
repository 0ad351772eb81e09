#pragma once

// Type-erased smooth map R^in -> R^out that can be evaluated on every jet
// type up to Jet<kMaxOrder>. Models write coefficient functions as generic
// lambdas over the scalar type; evaluation on Dual scalars yields exact
// derivatives.

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "eqloc/dual.hpp"

namespace eqloc {

inline constexpr int kMaxOrder = 3;
inline constexpr int kMaxDim = 8;
inline constexpr int kMaxComponents = 70;  // C(8, 4)

class NotDifferentiable : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class Function {
 public:
  template <class S>
  using Signature = void(std::span<const S>, std::span<S>);

  Function() = default;

  // `f` must be callable as f(std::span<const S>, std::span<S>) for every
  // S = Jet<0> .. Jet<kMaxOrder>. Calls on jets above `max_order` throw.
  template <class F>
  Function(int in_dim, int out_dim, F f, int max_order = kMaxOrder)
      : in_(in_dim), out_(out_dim), max_order_(max_order) {
    if (in_dim < 0 || out_dim < 0 || in_dim > kMaxDim * 2 || out_dim > kMaxComponents)
      throw std::invalid_argument("Function: unsupported dimensions");
    if (max_order < 0) throw NotDifferentiable("Function: no evaluable order");
    impl_ = std::make_shared<const Impl>(make_impl(f, std::make_integer_sequence<int, kMaxOrder + 1>{}));
  }

  // A double-only function; derivatives require the finite-difference mode.
  static Function opaque(int in_dim, int out_dim,
                         std::function<void(std::span<const double>, std::span<double>)> f);

  int in_dim() const { return in_; }
  int out_dim() const { return out_; }
  int max_order() const { return max_order_; }
  bool valid() const { return impl_ != nullptr; }

  template <class S>
  void operator()(std::span<const S> x, std::span<S> y) const {
    constexpr int k = jet_order_v<S>;
    if constexpr (k > kMaxOrder) {
      throw NotDifferentiable("derivative order exceeds the supported jet depth");
    } else {
      if (k > max_order_)
        throw NotDifferentiable("function is not differentiable to order " + std::to_string(k));
      std::get<k>(impl_->fns)(x, y);
    }
  }

  std::vector<double> operator()(std::span<const double> x) const {
    std::vector<double> y(static_cast<std::size_t>(out_));
    (*this)(x, std::span<double>(y));
    return y;
  }

 private:
  template <int... K>
  struct ImplT {
    std::tuple<std::function<Signature<Jet<K>>>...> fns;
  };
  template <int... K>
  static ImplT<K...> impl_tag(std::integer_sequence<int, K...>);
  using Impl = decltype(impl_tag(std::make_integer_sequence<int, kMaxOrder + 1>{}));

  template <class F, int... K>
  static Impl make_impl(const F& f, std::integer_sequence<int, K...>) {
    return Impl{std::make_tuple(std::function<Signature<Jet<K>>>(
        [f](std::span<const Jet<K>> x, std::span<Jet<K>> y) { f(x, y); })...)};
  }

  struct OpaqueTag {};
  Function(OpaqueTag, int in_dim, int out_dim, std::shared_ptr<const Impl> impl)
      : in_(in_dim), out_(out_dim), max_order_(0), impl_(std::move(impl)) {}

  int in_ = 0;
  int out_ = 0;
  int max_order_ = 0;
  std::shared_ptr<const Impl> impl_;
};

// Fixed-capacity scratch storage for evaluations inside hot loops.
template <class S, std::size_t N = kMaxComponents>
struct Scratch {
  std::array<S, N> data;  // uninitialized for double; callers write before reading
  std::span<S> first(std::size_t n) { return std::span<S>(data.data(), n); }
  std::span<const S> cfirst(std::size_t n) const { return std::span<const S>(data.data(), n); }
};

// Derivative strategy shared by every operation that differentiates.
struct Differentiation {
  enum class Mode { automatic, finite_difference };
  Mode mode = Mode::automatic;
  double step = 1e-6;  // central-difference step, scaled by (1 + |x|)

  static Differentiation finite(double h) { return {Mode::finite_difference, h}; }
  bool automatic() const { return mode == Mode::automatic; }
};

// Writes the directional derivative of f at x along axis `axis` into dy.
template <class S>
void partial(const Function& f, std::span<const S> x, int axis, std::span<S> dy,
             const Differentiation& diff) {
  const std::size_t n = x.size();
  const std::size_t m = static_cast<std::size_t>(f.out_dim());
  if (diff.automatic()) {
    Scratch<Dual<S>, 2 * kMaxDim> xs;
    Scratch<Dual<S>> ys;
    for (std::size_t i = 0; i < n; ++i)
      xs.data[i] = Dual<S>(x[i], S(i == static_cast<std::size_t>(axis) ? 1.0 : 0.0));
    f(xs.cfirst(n), ys.first(m));
    for (std::size_t j = 0; j < m; ++j) dy[j] = ys.data[j].d;
  } else {
    Scratch<S, 2 * kMaxDim> xp;
    Scratch<S> yp, ym;
    const double h = diff.step * (1.0 + std::abs(primal(x[axis])));
    for (std::size_t i = 0; i < n; ++i) xp.data[i] = x[i];
    xp.data[axis] = x[axis] + h;
    f(xp.cfirst(n), yp.first(m));
    xp.data[axis] = x[axis] - h;
    f(xp.cfirst(n), ym.first(m));
    for (std::size_t j = 0; j < m; ++j) dy[j] = (yp.data[j] - ym.data[j]) / (2.0 * h);
  }
}

inline int derived_order(const Function& f, const Differentiation& diff) {
  return diff.automatic() ? f.max_order() - 1 : f.max_order();
}

// Jacobian of f at a double point, row-major out_dim x in_dim.
std::vector<double> jacobian(const Function& f, std::span<const double> x,
                             const Differentiation& diff = {});

}  // namespace eqloc
