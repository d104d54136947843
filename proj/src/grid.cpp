#include "mfg/grid.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

namespace mfg {

TorusGrid TorusGrid::make(int dim, int n_per_dim) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("grid dim must be 1 or 2");
  if (n_per_dim < 2) throw std::invalid_argument("grid n_per_dim must be >= 2");
  TorusGrid g;
  g.dim = dim;
  g.n_per_dim = n_per_dim;
  g.spacing = 1.0 / n_per_dim;
  g.node_count = dim == 1 ? n_per_dim : n_per_dim * n_per_dim;
  return g;
}

VectorField gradient(const ScalarField& u) {
  const TorusGrid& g = u.grid;
  VectorField out(g);
  const double inv_h = 1.0 / g.spacing;
  for (int x = 0; x < g.node_count; ++x) {
    for (int k = 0; k < g.dim; ++k) {
      out.at(x, k) = (u[g.shift(x, k, +1)] - u[x]) * inv_h;
    }
  }
  return out;
}

ScalarField divergence(const VectorField& w) {
  const TorusGrid& g = w.grid;
  ScalarField out(g);
  const double inv_h = 1.0 / g.spacing;
  for (int x = 0; x < g.node_count; ++x) {
    double s = 0.0;
    for (int k = 0; k < g.dim; ++k) {
      s += (w.at(x, k) - w.at(g.shift(x, k, -1), k)) * inv_h;
    }
    out[x] = s;
  }
  return out;
}

double integral(const ScalarField& f) {
  double s = 0.0;
  for (int x = 0; x < f.grid.node_count; ++x) s += f[x];
  return s * f.grid.cell_volume();
}

double inner(const ScalarField& f, const ScalarField& g) {
  if (f.grid != g.grid) throw std::invalid_argument("inner: grid mismatch");
  double s = 0.0;
  for (int x = 0; x < f.grid.node_count; ++x) s += f[x] * g[x];
  return s * f.grid.cell_volume();
}

double inner(const VectorField& v, const VectorField& w) {
  if (v.grid != w.grid) throw std::invalid_argument("inner: grid mismatch");
  double s = 0.0;
  for (size_t i = 0; i < v.values.size(); ++i) s += v.values[i] * w.values[i];
  return s * v.grid.cell_volume();
}

double norm_h(const ScalarField& f) { return std::sqrt(inner(f, f)); }

double sobolev_norm_pow(const ScalarField& u, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("sobolev_norm_pow: p must be > 1");
  const VectorField du = gradient(u);
  const TorusGrid& g = u.grid;
  double s = 0.0;
  for (int x = 0; x < g.node_count; ++x) {
    s += rpow(norm(du.vec(x), g.dim), p) + rpow(std::fabs(u[x]), p);
  }
  return s * g.cell_volume();
}

double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::fabs(v));
  return m;
}

double min_value(const ScalarField& f) {
  double m = f.values.empty() ? 0.0 : f.values[0];
  for (double v : f.values) m = std::min(m, v);
  return m;
}

namespace {

void format_row(std::ostream& os, const TorusGrid& g, int x,
                const double* vals, int count) {
  const auto c = g.coords(x);
  os << c[0];
  if (g.dim == 2) os << ',' << c[1];
  char buf[64];
  for (int k = 0; k < count; ++k) {
    std::snprintf(buf, sizeof(buf), ",%.17g", vals[k]);
    os << buf;
  }
  os << '\n';
}

}  // namespace

void write_csv(std::ostream& os, const ScalarField& f) {
  for (int x = 0; x < f.grid.node_count; ++x) {
    const double v = f[x];
    format_row(os, f.grid, x, &v, 1);
  }
}

void write_csv(std::ostream& os, const VectorField& f) {
  for (int x = 0; x < f.grid.node_count; ++x) {
    const Vec v = f.vec(x);
    format_row(os, f.grid, x, v.data(), f.grid.dim);
  }
}

void write_csv_file(const std::string& path, const ScalarField& f) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  write_csv(os, f);
}

ScalarField read_scalar_csv(const std::string& path, const TorusGrid& grid) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  ScalarField f(grid);
  std::vector<bool> seen(static_cast<size_t>(grid.node_count), false);
  std::string line;
  int rows = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<std::string> parts;
    while (std::getline(ss, tok, ',')) parts.push_back(tok);
    const size_t want = static_cast<size_t>(grid.dim) + 1;
    if (parts.size() != want) {
      throw std::runtime_error(path + ": bad column count in row '" + line + "'");
    }
    const int i = std::stoi(parts[0]);
    const int j = grid.dim == 2 ? std::stoi(parts[1]) : 0;
    if (i < 0 || i >= grid.n_per_dim || j < 0 || j >= grid.n_per_dim) {
      throw std::runtime_error(path + ": node index out of range in '" + line + "'");
    }
    const int idx = grid.index(i, j);
    f[idx] = std::stod(parts.back());
    seen[static_cast<size_t>(idx)] = true;
    ++rows;
  }
  if (rows != grid.node_count) {
    throw std::runtime_error(path + ": expected " + std::to_string(grid.node_count) +
                             " rows, got " + std::to_string(rows));
  }
  for (bool b : seen) {
    if (!b) throw std::runtime_error(path + ": duplicate or missing node rows");
  }
  return f;
}

}  // namespace mfg
