#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfg {

using Vec = std::array<double, 2>;  // p-vectors; component [1] unused in 1D

inline double dot(const Vec& a, const Vec& b, int dim) {
  double s = a[0] * b[0];
  if (dim == 2) s += a[1] * b[1];
  return s;
}

inline double norm(const Vec& a, int dim) { return std::sqrt(dot(a, a, dim)); }

// Uniform periodic lattice on [0,1)^d, d in {1,2}. Nodes are ordered
// row-major; index arithmetic wraps modulo n_per_dim along every axis.
struct TorusGrid {
  int dim = 1;
  int n_per_dim = 2;
  double spacing = 0.5;  // 1 / n_per_dim
  int node_count = 2;    // n_per_dim^dim

  static TorusGrid make(int dim, int n_per_dim);

  double cell_volume() const {
    return dim == 1 ? spacing : spacing * spacing;
  }

  int index(int i, int j = 0) const {
    i = wrap(i);
    j = wrap(j);
    return dim == 1 ? i : i * n_per_dim + j;
  }

  std::array<int, 2> coords(int idx) const {
    if (dim == 1) return {idx, 0};
    return {idx / n_per_dim, idx % n_per_dim};
  }

  // Periodic neighbor of node idx shifted by delta cells along axis.
  int shift(int idx, int axis, int delta) const {
    auto c = coords(idx);
    c[axis] = wrap(c[axis] + delta);
    return dim == 1 ? c[0] : c[0] * n_per_dim + c[1];
  }

  std::array<double, 2> position(int idx) const {
    auto c = coords(idx);
    return {c[0] * spacing, c[1] * spacing};
  }

  bool operator==(const TorusGrid& o) const {
    return dim == o.dim && n_per_dim == o.n_per_dim;
  }
  bool operator!=(const TorusGrid& o) const { return !(*this == o); }

 private:
  int wrap(int i) const {
    int r = i % n_per_dim;
    return r < 0 ? r + n_per_dim : r;
  }
};

// Real-valued grid function, one value per node.
struct ScalarField {
  TorusGrid grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const TorusGrid& g, double fill = 0.0)
      : grid(g), values(static_cast<size_t>(g.node_count), fill) {}

  double& operator[](int i) { return values[static_cast<size_t>(i)]; }
  double operator[](int i) const { return values[static_cast<size_t>(i)]; }
  int size() const { return grid.node_count; }
};

// Vector-valued grid function, dim components per node, node-major layout.
struct VectorField {
  TorusGrid grid;
  std::vector<double> values;  // node * dim + axis

  VectorField() = default;
  explicit VectorField(const TorusGrid& g)
      : grid(g), values(static_cast<size_t>(g.node_count) * g.dim, 0.0) {}

  double& at(int node, int axis) {
    return values[static_cast<size_t>(node) * grid.dim + axis];
  }
  double at(int node, int axis) const {
    return values[static_cast<size_t>(node) * grid.dim + axis];
  }
  Vec vec(int node) const {
    Vec v{0.0, 0.0};
    v[0] = at(node, 0);
    if (grid.dim == 2) v[1] = at(node, 1);
    return v;
  }
  void set(int node, const Vec& v) {
    at(node, 0) = v[0];
    if (grid.dim == 2) at(node, 1) = v[1];
  }
};

// Forward differences with periodic wrap: component k at node x is
// (u(x + h e_k) - u(x)) / h.
VectorField gradient(const ScalarField& u);

// Backward differences, the exact negative adjoint of gradient under the
// h-weighted inner product: <gradient(u), w>_h == -<u, divergence(w)>_h.
ScalarField divergence(const VectorField& w);

// h^dim * sum of nodal values, fixed node order.
double integral(const ScalarField& f);

// h-weighted inner products over nodes.
double inner(const ScalarField& f, const ScalarField& g);
double inner(const VectorField& v, const VectorField& w);

double norm_h(const ScalarField& f);

// Discrete |u|_{W^{1,p}}^p = integral(|grad u|^p + |u|^p), p > 1.
double sobolev_norm_pow(const ScalarField& u, double p);

double max_abs(const ScalarField& f);
double min_value(const ScalarField& f);

// CSV dump, one row per node: "i[,j],value" (scalar) or "i[,j],v0[,v1]"
// (vector), 17 significant digits.
void write_csv(std::ostream& os, const ScalarField& f);
void write_csv(std::ostream& os, const VectorField& f);
void write_csv_file(const std::string& path, const ScalarField& f);
ScalarField read_scalar_csv(const std::string& path, const TorusGrid& grid);

// x^e for x >= 0 with fast paths for the common exponents.
inline double rpow(double x, double e) {
  if (e == 2.0) return x * x;
  if (e == 1.0) return x;
  if (e == 3.0) return x * x * x;
  if (e == 4.0) {
    const double s = x * x;
    return s * s;
  }
  if (e == 0.5) return std::sqrt(x);
  if (e == 1.5) return x * std::sqrt(x);
  return std::pow(x, e);
}

// sign(s)|s|^e with the convention 0^e = 0.
inline double spow(double s, double e) {
  if (s == 0.0) return 0.0;
  return s < 0.0 ? -rpow(-s, e) : rpow(s, e);
}

}  // namespace mfg
