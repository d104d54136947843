#include "mfg/continuation.hpp"

#include <cmath>

namespace mfg {

void ContinuationSchedule::validate() const {
  if (!(eps0 > 0.0 && eps0 <= 1.0))
    throw std::invalid_argument("schedule: eps0 must lie in (0,1]");
  if (!(ratio > 0.0 && ratio < 1.0))
    throw std::invalid_argument("schedule: ratio must lie in (0,1)");
  if (stages < 1) throw std::invalid_argument("schedule: stages must be >= 1");
  if (!(tols.hj_pos > 0.0 && tols.hj_support > 0.0 && tols.transport_l1 > 0.0 &&
        tols.mass_gap > 0.0 && tols.weak_certificate > 0.0))
    throw std::invalid_argument("schedule: tolerances must be > 0");
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::StrongCandidate: return "strong-candidate";
    case Verdict::WeakCandidate: return "weak-candidate";
    case Verdict::Unconverged: return "unconverged";
  }
  return "?";
}

namespace {

double apriori_M(const ProblemData& data, const MFGState& z) {
  ScalarField mpow(data.grid);
  for (int x = 0; x < data.grid.node_count; ++x)
    mpow[x] = rpow(z.m[x], data.exponents.beta_bar);
  return integral(mpow) + sobolev_norm_pow(z.u, data.exponents.gamma_bar);
}

}  // namespace

ContinuationResult run_continuation(const ProblemData& data_template,
                                    const ContinuationSchedule& schedule,
                                    const SolverConfig& solver_cfg,
                                    const MFGState* z0) {
  schedule.validate();
  solver_cfg.validate();
  data_template.spec.validate_for_solve();

  ProblemData data = data_template;
  if (data.spec.family == Family::Weak) data.use_envelope = true;

  ContinuationResult result;
  const MFGState cold_start(data.grid, 1.0, 0.0);
  MFGState z = z0 ? *z0 : cold_start;

  for (int k = 0; k < schedule.stages; ++k) {
    data.epsilon = schedule.epsilon_at(k);
    data.m_floor = schedule.floor_for(data.spec.family, data.epsilon);

    SolverConfig cfg = solver_cfg;
    cfg.m_floor = data.m_floor;
    if (!schedule.warm_start && k > 0) z = z0 ? *z0 : cold_start;

    SolveResult sr = extragradient_solve(data, z, cfg);
    z = sr.z;
    if (cfg.trace_stride > 0) result.stage_traces.push_back(std::move(sr.stats.trace));

    const HJResidual hj = hj_residual(data, z);
    const TransportResidual tr = transport_residual(data, z);
    StageRecord rec;
    rec.epsilon = data.epsilon;
    rec.delta = data.m_floor;
    rec.iterations = sr.stats.iterations;
    rec.natural_residual = sr.stats.final_residual;
    rec.hj_max_pos = hj.max_pos;
    rec.hj_max_on_support = hj.max_on_support;
    rec.transport_l1 = tr.l1;
    rec.mass_gap = tr.mass_gap;
    rec.M = apriori_M(data, z);
    rec.mean_m = integral(z.m);
    rec.min_m = min_value(z.m);
    int floored = 0;
    for (double v : z.m.values)
      if (v <= data.m_floor) ++floored;
    rec.floored_fraction = static_cast<double>(floored) / data.grid.node_count;
    rec.solver_converged = sr.stats.converged;
    result.track.stages.push_back(rec);

    if (!sr.stats.converged) {
      result.final_state = z;
      result.solver_failed = true;
      result.verdict = Verdict::Unconverged;
      return result;
    }
  }

  result.final_state = z;
  const StageRecord& last = result.track.stages.back();
  const ContinuationTols& t = schedule.tols;
  const bool strong = last.hj_max_pos <= t.hj_pos &&
                      last.hj_max_on_support <= t.hj_support &&
                      last.transport_l1 <= t.transport_l1 &&
                      std::fabs(last.mass_gap) <= t.mass_gap;

  const WeakCertificate wc =
      weak_solution_certificate(data, z, standard_test_battery(data.grid));
  result.weak_certificate_min = wc.min_value;

  if (strong) {
    result.verdict = Verdict::StrongCandidate;
  } else if (wc.min_value >= -t.weak_certificate) {
    result.verdict = Verdict::WeakCandidate;
  } else {
    result.verdict = Verdict::Unconverged;
  }
  return result;
}

AprioriMonitor apriori_monitor(const AprioriTrack& track, double alarm_ratio) {
  if (track.stages.size() < 2)
    throw std::invalid_argument("apriori_monitor: need at least 2 recorded stages");
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const StageRecord& r : track.stages) {
    lo = std::min(lo, r.M);
    hi = std::max(hi, r.M);
  }
  AprioriMonitor mon;
  mon.max_over_min_ratio = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  mon.alarm = mon.max_over_min_ratio > alarm_ratio;
  return mon;
}

std::vector<MFGState> standard_test_battery(const TorusGrid& grid) {
  // Low integer modes; in 2D the four lowest lattice directions stand in for
  // the mode numbers 1..4 of the 1D battery.
  const double two_pi = 2.0 * M_PI;
  std::vector<std::array<double, 2>> modes;
  if (grid.dim == 1) {
    modes = {{1.0, 0.0}, {2.0, 0.0}, {3.0, 0.0}, {4.0, 0.0}};
  } else {
    modes = {{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {2.0, 0.0}};
  }
  std::vector<MFGState> battery;
  battery.reserve(16);
  for (const auto& km : modes) {
    for (const auto& jm : modes) {
      MFGState t(grid, 0.0, 0.0);
      for (int x = 0; x < grid.node_count; ++x) {
        const auto pos = grid.position(x);
        const double kx = km[0] * pos[0] + km[1] * pos[1];
        const double jx = jm[0] * pos[0] + jm[1] * pos[1];
        t.m[x] = 1.0 + 0.5 * std::sin(two_pi * kx);
        t.u[x] = 0.3 * std::cos(two_pi * jx);
      }
      battery.push_back(std::move(t));
    }
  }
  return battery;
}

}  // namespace mfg
