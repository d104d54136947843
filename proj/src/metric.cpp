#include "mfg/metric.hpp"

#include <cmath>

namespace mfg {

USlotMetric::USlotMetric(const TorusGrid& grid, double c) : c_(c), grid_(grid) {
  if (!(c > 0.0)) throw std::invalid_argument("metric: c must be > 0");
  const int n = grid.n_per_dim;
  basis_.assign(static_cast<size_t>(n) * n, 0.0);
  eigenvalues_.assign(static_cast<size_t>(n), 0.0);
  const double inv_h2 = 1.0 / (grid.spacing * grid.spacing);
  // Real orthonormal eigenbasis of the periodic (-1, 2, -1) stencil:
  // constant, cos/sin pairs, and the alternating vector for even n.
  int col = 0;
  auto set_column = [&](int k, auto&& fn) {
    for (int j = 0; j < n; ++j) basis_[static_cast<size_t>(j) * n + col] = fn(j);
    const double s = std::sin(M_PI * k / n);
    eigenvalues_[static_cast<size_t>(col)] = 4.0 * s * s * inv_h2;
    ++col;
  };
  set_column(0, [&](int) { return 1.0 / std::sqrt(double(n)); });
  const double norm = std::sqrt(2.0 / n);
  for (int k = 1; 2 * k < n; ++k) {
    set_column(k, [&](int j) { return norm * std::cos(2.0 * M_PI * k * j / n); });
    set_column(k, [&](int j) { return norm * std::sin(2.0 * M_PI * k * j / n); });
  }
  if (n % 2 == 0) {
    set_column(n / 2, [&](int j) { return (j % 2 == 0 ? 1.0 : -1.0) / std::sqrt(double(n)); });
  }
}

ScalarField USlotMetric::multiply(const ScalarField& f) const {
  if (!active()) return f;
  const TorusGrid& g = f.grid;
  const double inv_h2 = 1.0 / (g.spacing * g.spacing);
  ScalarField out(g);
  for (int x = 0; x < g.node_count; ++x) {
    double lap = 0.0;
    for (int k = 0; k < g.dim; ++k) {
      lap += (2.0 * f[x] - f[g.shift(x, k, -1)] - f[g.shift(x, k, +1)]) * inv_h2;
    }
    out[x] = f[x] + c_ * lap;
  }
  return out;
}

ScalarField USlotMetric::solve(const ScalarField& rhs) const {
  if (!active()) return rhs;
  const TorusGrid& g = rhs.grid;
  const int n = g.n_per_dim;
  std::vector<double> w(rhs.values);
  std::vector<double> tmp(static_cast<size_t>(n), 0.0);

  auto axis_pass = [&](int axis, bool forward) {
    // apply basis^T (forward) or basis (inverse) along one axis
    const int count = g.dim == 1 ? 1 : n;
    for (int line = 0; line < count; ++line) {
      for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) {
          const int idx = g.dim == 1 ? j : (axis == 0 ? j * n + line : line * n + j);
          const double q = forward ? basis_[static_cast<size_t>(j) * n + i]
                                   : basis_[static_cast<size_t>(i) * n + j];
          s += q * w[static_cast<size_t>(idx)];
        }
        tmp[static_cast<size_t>(i)] = s;
      }
      for (int i = 0; i < n; ++i) {
        const int idx = g.dim == 1 ? i : (axis == 0 ? i * n + line : line * n + i);
        w[static_cast<size_t>(idx)] = tmp[static_cast<size_t>(i)];
      }
    }
  };

  for (int axis = 0; axis < g.dim; ++axis) axis_pass(axis, true);
  if (g.dim == 1) {
    for (int i = 0; i < n; ++i)
      w[static_cast<size_t>(i)] /= 1.0 + c_ * eigenvalues_[static_cast<size_t>(i)];
  } else {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        w[static_cast<size_t>(i) * n + j] /=
            1.0 + c_ * (eigenvalues_[static_cast<size_t>(i)] +
                        eigenvalues_[static_cast<size_t>(j)]);
      }
    }
  }
  for (int axis = 0; axis < g.dim; ++axis) axis_pass(axis, false);

  ScalarField out(g);
  out.values = std::move(w);
  return out;
}

}  // namespace mfg
