#pragma once

#include <string>

#include "mfg/vi_solver.hpp"

namespace mfg {

struct ContinuationTols {
  double hj_pos = 1e-4;
  double hj_support = 1e-4;
  double transport_l1 = 1e-4;
  double mass_gap = 1e-5;
  double weak_certificate = 1e-5;
};

// Geometric schedule eps_k = eps0 ratio^k driving the regularization to zero,
// with the congestion density floor delta(eps) = max(floor_min, eps) tied to
// it. Power/weak couplings run with a zero floor.
struct ContinuationSchedule {
  double eps0 = 0.1;    // (0, 1]
  double ratio = 0.1;   // (0, 1)
  int stages = 4;       // >= 1
  double congestion_floor_min = 1e-6;
  ContinuationTols tols;
  bool warm_start = true;

  double epsilon_at(int k) const { return eps0 * std::pow(ratio, k); }
  double floor_for(Family family, double eps) const {
    return family == Family::Congestion ? std::max(congestion_floor_min, eps) : 0.0;
  }
  void validate() const;
};

struct StageRecord {
  double epsilon = 0.0;
  double delta = 0.0;  // density floor used at this stage
  int iterations = 0;
  double natural_residual = 0.0;
  double hj_max_pos = 0.0;
  double hj_max_on_support = 0.0;
  double transport_l1 = 0.0;
  double mass_gap = 0.0;
  double M = 0.0;  // |m|_{beta_bar}^{beta_bar} + |u|_{W^{1,gamma_bar}}^{gamma_bar}
  double mean_m = 0.0;
  double min_m = 0.0;
  double floored_fraction = 0.0;
  bool solver_converged = false;
};

struct AprioriTrack {
  std::vector<StageRecord> stages;
};

enum class Verdict { StrongCandidate, WeakCandidate, Unconverged };

std::string to_string(Verdict v);

struct ContinuationResult {
  MFGState final_state;
  AprioriTrack track;
  Verdict verdict = Verdict::Unconverged;
  double weak_certificate_min = std::numeric_limits<double>::infinity();
  bool solver_failed = false;
  std::vector<std::vector<TraceRow>> stage_traces;
};

// Warm-started continuation over the schedule. Each stage re-solves with the
// stage epsilon and floor from the previous iterate (or from (m,u) = (1,0)
// when cold). Weak-family runs always evaluate through the envelope with the
// stage epsilon. The verdict grades the final iterate: strong-candidate when
// every residual target is met, else weak-candidate when the certificate
// battery stays above -tols.weak_certificate, else unconverged. A stage
// solver failure aborts with the partial track.
ContinuationResult run_continuation(const ProblemData& data_template,
                                    const ContinuationSchedule& schedule,
                                    const SolverConfig& solver_cfg,
                                    const MFGState* z0 = nullptr);

struct AprioriMonitor {
  double max_over_min_ratio = 1.0;
  bool alarm = false;
};

// Ratio of max to min of M across recorded stages; alarms above the given
// ratio, flagging growth inconsistent with an eps-uniform bound.
AprioriMonitor apriori_monitor(const AprioriTrack& track, double alarm_ratio = 10.0);

// 16 smooth positive test pairs (1 + 0.5 sin(2 pi k.x), 0.3 cos(2 pi j.x))
// over low modes, for the weak-solution certificate.
std::vector<MFGState> standard_test_battery(const TorusGrid& grid);

}  // namespace mfg
