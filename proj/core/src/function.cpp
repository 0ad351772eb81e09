#include "eqloc/function.hpp"

namespace eqloc {

Function Function::opaque(int in_dim, int out_dim,
                          std::function<void(std::span<const double>, std::span<double>)> f) {
  Impl impl;
  std::get<0>(impl.fns) = std::move(f);
  return Function(OpaqueTag{}, in_dim, out_dim, std::make_shared<const Impl>(std::move(impl)));
}

std::vector<double> jacobian(const Function& f, std::span<const double> x,
                             const Differentiation& diff) {
  const int n = f.in_dim();
  const int m = f.out_dim();
  std::vector<double> jac(static_cast<std::size_t>(n * m));
  Scratch<double> col;
  for (int j = 0; j < n; ++j) {
    partial<double>(f, x, j, col.first(static_cast<std::size_t>(m)), diff);
    for (int i = 0; i < m; ++i) jac[static_cast<std::size_t>(i * n + j)] = col.data[static_cast<std::size_t>(i)];
  }
  return jac;
}

}  // namespace eqloc
