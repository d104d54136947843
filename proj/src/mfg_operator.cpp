#include "mfg/mfg_operator.hpp"

#include <atomic>
#include <cmath>

#include "mfg/parallel.hpp"

namespace mfg {

ProblemData ProblemData::make(const TorusGrid& grid, HamiltonianSpec spec,
                              ScalarField V, double epsilon, bool use_envelope,
                              double m_floor) {
  if (V.grid != grid) throw std::invalid_argument("problem: V grid mismatch");
  if (spec.grid() != grid) throw std::invalid_argument("problem: spec grid mismatch");
  if (epsilon < 0.0) throw std::invalid_argument("problem: epsilon must be >= 0");
  if (spec.family == Family::Congestion && !(m_floor > 0.0))
    throw std::invalid_argument("problem: congestion requires m_floor > 0");
  ProblemData d;
  d.grid = grid;
  d.spec = std::move(spec);
  d.V = std::move(V);
  d.exponents = ExponentSet::from(d.spec.alpha, d.spec.beta);
  d.epsilon = epsilon;
  d.use_envelope = use_envelope;
  d.m_floor = m_floor;
  return d;
}

double ProblemData::support_threshold(const MFGState& z) const {
  return support_threshold_factor * std::max(max_abs(z.m), 1.0);
}

namespace {

void check_admissible(const ProblemData& data, const MFGState& z) {
  if (z.grid() != data.grid || z.u.grid != data.grid)
    throw std::invalid_argument("state grid mismatch");
  const double lo = data.spec.family == Family::Congestion ? data.m_floor : 0.0;
  for (double v : z.m.values) {
    if (!(v >= lo)) throw std::invalid_argument("state m below the admissible floor");
  }
}

// H and m*DpH at one node, envelope-aware. eps_env <= 0 disables the
// envelope (the penalty then forces q = 0).
void coupling_at(const ProblemData& data, int node, const Vec& p, double m,
                 double eps_env, double& h_out, Vec& mdph_out) {
  if (data.use_envelope && eps_env > 0.0) {
    const EnvelopeSpec env(data.spec, std::min(eps_env, 1.0));
    const EnvelopeValue v = envelope(env, node, p, m);
    h_out = v.value;
    mdph_out = Vec{m * v.grad_p[0], m * v.grad_p[1]};
    return;
  }
  h_out = eval_H(data.spec, node, p, m);
  mdph_out = eval_mDpH(data.spec, node, p, m);
}

}  // namespace

OperatorOutput apply(const ProblemData& data, const MFGState& z) {
  check_admissible(data, z);
  const TorusGrid& g = data.grid;
  const double eps = data.epsilon;
  const double gb = data.exponents.gamma_bar;
  const VectorField du = gradient(z.u);

  OperatorOutput out{ScalarField(g), ScalarField(g)};
  VectorField flux(g);
  std::atomic<bool> bad{false};
  parallel_nodes(g.node_count, [&](int x) {
    const Vec p = du.vec(x);
    const double m = z.m[x];
    double h;
    Vec mdph;
    coupling_at(data, x, p, m, eps, h, mdph);
    if (!std::isfinite(h)) {
      bad.store(true, std::memory_order_relaxed);
      return;
    }
    out.eta[x] = -z.u[x] - h + data.V[x];

    const double r = norm(p, g.dim);
    const double pfac = eps == 0.0 || r == 0.0 ? 0.0 : eps * rpow(r, gb - 2.0);
    flux.at(x, 0) = mdph[0] + pfac * p[0];
    if (g.dim == 2) flux.at(x, 1) = mdph[1] + pfac * p[1];
  });
  if (bad.load())
    throw std::domain_error("operator: non-finite H at an interior evaluation");
  const ScalarField div_flux = divergence(flux);
  for (int x = 0; x < g.node_count; ++x) {
    out.nu[x] = -div_flux[x] + (z.m[x] - 1.0) + eps * spow(z.u[x], gb - 1.0);
  }
  return out;
}

double state_inner(const MFGState& a, const MFGState& b) {
  return inner(a.m, b.m) + inner(a.u, b.u);
}

double state_norm(const MFGState& a) { return std::sqrt(state_inner(a, a)); }

double output_inner(const OperatorOutput& a, const OperatorOutput& b) {
  return inner(a.eta, b.eta) + inner(a.nu, b.nu);
}

double monotonicity_pairing(const ProblemData& data, const MFGState& z1,
                            const MFGState& z2) {
  const OperatorOutput a1 = apply(data, z1);
  const OperatorOutput a2 = apply(data, z2);
  const TorusGrid& g = data.grid;
  double s = 0.0;
  for (int x = 0; x < g.node_count; ++x) {
    s += (a1.eta[x] - a2.eta[x]) * (z1.m[x] - z2.m[x]) +
         (a1.nu[x] - a2.nu[x]) * (z1.u[x] - z2.u[x]);
  }
  return s * g.cell_volume();
}

HJResidual hj_residual(const ProblemData& data, const MFGState& z) {
  check_admissible(data, z);
  const TorusGrid& g = data.grid;
  const VectorField du = gradient(z.u);
  HJResidual res{ScalarField(g), 0.0, 0.0};
  const double thresh = data.support_threshold(z);
  for (int x = 0; x < g.node_count; ++x) {
    double h;
    Vec mdph;
    coupling_at(data, x, du.vec(x), z.m[x], data.epsilon, h, mdph);
    const double f = z.u[x] + h - data.V[x];
    res.field[x] = f;
    res.max_pos = std::max(res.max_pos, f);
    if (z.m[x] > thresh) res.max_on_support = std::max(res.max_on_support, std::fabs(f));
  }
  res.max_pos = std::max(res.max_pos, 0.0);
  return res;
}

TransportResidual transport_residual(const ProblemData& data, const MFGState& z) {
  const OperatorOutput a = apply(data, z);
  TransportResidual res;
  res.field = a.nu;
  ScalarField absf(data.grid);
  ScalarField gap(data.grid);
  const double gb = data.exponents.gamma_bar;
  for (int x = 0; x < data.grid.node_count; ++x) {
    absf[x] = std::fabs(a.nu[x]);
    gap[x] = (z.m[x] - 1.0) + data.epsilon * spow(z.u[x], gb - 1.0);
  }
  res.l1 = integral(absf);
  res.mass_gap = integral(gap);
  return res;
}

WeakCertificate weak_solution_certificate(const ProblemData& data, const MFGState& z,
                                          const std::vector<MFGState>& test_pairs) {
  check_admissible(data, z);
  const TorusGrid& g = data.grid;
  const VectorField du = gradient(z.u);
  WeakCertificate cert;
  for (size_t i = 0; i < test_pairs.size(); ++i) {
    const MFGState& t = test_pairs[i];
    if (t.grid() != g) throw std::invalid_argument("weak certificate: grid mismatch");
    if (!(min_value(t.m) > 0.0))
      throw std::invalid_argument("weak certificate: test density must be positive");
    const VectorField dups = gradient(t.u);
    ScalarField integrand(g);
    for (int x = 0; x < g.node_count; ++x) {
      const Vec pv = dups.vec(x);
      const double mu = t.m[x];
      const double h = eval_H(data.spec, x, pv, mu);
      const Vec dph = eval_DpH(data.spec, x, pv, mu);
      const Vec dd{pv[0] - du.vec(x)[0], pv[1] - du.vec(x)[1]};
      integrand[x] = (-t.u[x] - h + data.V[x]) * (mu - z.m[x]) +
                     mu * dot(dph, dd, g.dim) +
                     (mu - 1.0) * (t.u[x] - z.u[x]);
    }
    const double v = integral(integrand);
    if (v < cert.min_value) {
      cert.min_value = v;
      cert.witness_pair = static_cast<int>(i);
    }
  }
  return cert;
}

}  // namespace mfg
