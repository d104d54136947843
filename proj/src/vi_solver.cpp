#include "mfg/vi_solver.hpp"

#include <cmath>

namespace mfg {

void SolverConfig::validate() const {
  if (!(step0 > 0.0)) throw std::invalid_argument("solver: step0 must be > 0");
  if (!(backtrack_ratio > 0.0 && backtrack_ratio < 1.0))
    throw std::invalid_argument("solver: backtrack_ratio must lie in (0,1)");
  if (max_iter < 1) throw std::invalid_argument("solver: max_iter must be >= 1");
  if (!(tol_natural > 0.0)) throw std::invalid_argument("solver: tol_natural must be > 0");
  if (doubling_period < 1) throw std::invalid_argument("solver: doubling_period >= 1");
  if (!(lipschitz_margin > 0.0 && lipschitz_margin < 1.0))
    throw std::invalid_argument("solver: lipschitz_margin must lie in (0,1)");
}

MFGState project_cone(MFGState z, double m_floor) {
  for (double& v : z.m.values) v = std::max(v, m_floor);
  return z;
}

namespace {

MFGState projected_step(const MFGState& z, const OperatorOutput& A, double step,
                        double m_floor) {
  MFGState out = z;
  const int n = z.grid().node_count;
  for (int x = 0; x < n; ++x) {
    out.m[x] = std::max(z.m[x] - step * A.eta[x], m_floor);
    out.u[x] = z.u[x] - step * A.nu[x];
  }
  return out;
}

MFGState state_diff(const MFGState& a, const MFGState& b) {
  MFGState d = a;
  const int n = a.grid().node_count;
  for (int x = 0; x < n; ++x) {
    d.m[x] = a.m[x] - b.m[x];
    d.u[x] = a.u[x] - b.u[x];
  }
  return d;
}

double residual_from(const MFGState& z, const OperatorOutput& A, double step,
                     double m_floor) {
  const MFGState stepped = projected_step(z, A, step, m_floor);
  return state_norm(state_diff(z, stepped)) / step;
}

// Step direction in the metric: the m-slot is untouched (its metric is
// nodal so the cone projection stays exact), the u-slot gets M^{-1}.
OperatorOutput preconditioned(const OperatorOutput& A, const USlotMetric* metric) {
  if (!metric || !metric->active()) return A;
  return {A.eta, metric->solve(A.nu)};
}

}  // namespace

double natural_residual(const ProblemData& data, const MFGState& z, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("natural_residual: step must be > 0");
  return residual_from(z, apply(data, z), step, data.m_floor);
}

SolveResult extragradient_solve_op(const StateOperator& op, const MFGState& z0,
                                   const SolverConfig& cfg, const USlotMetric* metric) {
  cfg.validate();
  const bool use_metric = metric && metric->active();
  MFGState z = project_cone(z0, cfg.m_floor);
  double sigma = cfg.step0;
  SolveStats stats;
  MFGState best = z;
  double best_res = std::numeric_limits<double>::infinity();
  int accepted_since_double = 0;

  for (int it = 0; it < cfg.max_iter; ++it) {
    const OperatorOutput Az = op(z);
    const double res = residual_from(z, Az, sigma, cfg.m_floor);
    stats.iterations = it;
    stats.sigma_min_seen = std::min(stats.sigma_min_seen, sigma);
    stats.sigma_max_seen = std::max(stats.sigma_max_seen, sigma);
    if (res < best_res) {
      best_res = res;
      best = z;
    }
    int probes_this_iter = 0;
    bool traced = false;
    if (cfg.trace_stride > 0 && it % cfg.trace_stride == 0) {
      stats.trace.push_back({it, sigma, res, 0});
      traced = true;
    }
    if (res <= cfg.tol_natural) {
      stats.converged = true;
      stats.final_residual = res;
      stats.sigma_final = sigma;
      if (traced) stats.trace.back().pairing_check = 0;
      return {z, stats};
    }

    const OperatorOutput Bz = preconditioned(Az, metric);

    // Backtracked half-step: zbar and A(zbar) are recomputed after every
    // rejection because zbar depends on sigma. Acceptance needs both the
    // monotone pairing test and the norm test; the latter is what keeps
    // skew couplings (whose pairing vanishes) contractive.
    MFGState zbar = z;
    OperatorOutput Bzbar;
    bool accepted = false;
    while (sigma >= cfg.step_min) {
      zbar = projected_step(z, Bz, sigma, cfg.m_floor);
      const MFGState d = state_diff(z, zbar);
      const OperatorOutput Azbar = op(zbar);
      ++probes_this_iter;
      double n2;  // ||d||^2 in the iteration metric
      if (use_metric) {
        n2 = inner(d.m, d.m) + inner(metric->multiply(d.u), d.u);
      } else {
        n2 = state_inner(d, d);
      }
      Bzbar = preconditioned(Azbar, metric);
      if (n2 == 0.0) {
        accepted = true;
        break;
      }
      OperatorOutput dA{Az.eta, Az.nu};
      OperatorOutput dB{Bz.eta, Bz.nu};
      for (int x = 0; x < z.grid().node_count; ++x) {
        dA.eta[x] -= Azbar.eta[x];
        dA.nu[x] -= Azbar.nu[x];
        dB.eta[x] -= Bzbar.eta[x];
        dB.nu[x] -= Bzbar.nu[x];
      }
      // <B(z)-B(zbar), d>_M = <A(z)-A(zbar), d>_h : the metric cancels.
      const double pairing = inner(dA.eta, d.m) + inner(dA.nu, d.u);
      // ||B(z)-B(zbar)||_M^2 = ||deta||^2 + <M^{-1} dnu, dnu>
      const double dB_norm2 = inner(dB.eta, dB.eta) + inner(dB.nu, dA.nu);
      const double nu2 = cfg.lipschitz_margin * cfg.lipschitz_margin;
      if (pairing <= 0.5 * n2 / sigma && sigma * sigma * dB_norm2 <= nu2 * n2) {
        accepted = true;
        break;
      }
      sigma *= cfg.backtrack_ratio;
    }
    if (accepted) ++stats.pairing_checks;  // probes that passed
    if (traced) stats.trace.back().pairing_check = probes_this_iter;
    if (!accepted) {
      stats.iterations = it;
      break;  // sigma underflow
    }

    z = projected_step(z, Bzbar, sigma, cfg.m_floor);
    if (cfg.observer) cfg.observer(z, it);
    if (++accepted_since_double >= cfg.doubling_period) {
      sigma = std::min(sigma / cfg.backtrack_ratio, cfg.step_max);
      accepted_since_double = 0;
    }
    stats.iterations = it + 1;
  }

  // The last accepted step was never residual-checked inside the loop.
  {
    const double res = residual_from(z, op(z), sigma, cfg.m_floor);
    if (res < best_res) {
      best_res = res;
      best = z;
    }
  }
  stats.converged = false;
  stats.final_residual = best_res;
  stats.sigma_final = sigma;
  return {best, stats};
}

namespace {

// Coefficient scale of the transport-row diffusion, used for the default
// metric weight.
double default_metric_scale(const ProblemData& data) {
  const double pe = data.spec.p_exponent();
  double c = data.spec.a_max() * pe * std::max(1.0, pe - 1.0);
  if (data.spec.family == Family::Weak) {
    double gmax = 0.0;
    for (double v : data.spec.g.values) gmax = std::max(gmax, v);
    c += 4.0 * gmax;
  }
  return std::max(1.0, c);
}

}  // namespace

SolveResult extragradient_solve(const ProblemData& data, const MFGState& z0,
                                const SolverConfig& cfg) {
  if (data.spec.family == Family::Congestion && !(cfg.m_floor >= data.m_floor)) {
    throw std::invalid_argument("solver: cone floor below the problem's density floor");
  }
  USlotMetric metric;
  if (cfg.precondition_scale != 0.0) {
    const double c = cfg.precondition_scale > 0.0 ? cfg.precondition_scale
                                                  : default_metric_scale(data);
    metric = USlotMetric(data.grid, c);
  }
  return extragradient_solve_op(
      [&data](const MFGState& z) { return apply(data, z); }, z0, cfg,
      metric.active() ? &metric : nullptr);
}

}  // namespace mfg
