#pragma once

#include <functional>

#include "mfg/metric.hpp"
#include "mfg/mfg_operator.hpp"

namespace mfg {

struct SolverConfig {
  double step0 = 0.1;            // initial sigma
  double backtrack_ratio = 0.5;  // sigma multiplier on a rejected step
  int max_iter = 200000;
  double tol_natural = 1e-9;
  double m_floor = 0.0;          // cone {m >= m_floor} x (unconstrained u)
  uint64_t rng_seed = 0;
  double step_max = 4.0;
  double step_min = 1e-14;
  int doubling_period = 20;      // accepted steps between tentative doublings
  double lipschitz_margin = 0.9; // nu in the norm safeguard below
  // u-slot metric M = I - c Laplacian. The grid Laplacian in the transport
  // row scales like 1/h^2, which caps the plain step at O(h^2) and makes the
  // slow O(1) eigendirections (the mass/discount coupling) unreachable at
  // fine grids; stepping in the M-metric bounds the preconditioned spectrum
  // independently of h. 0 disables, negative requests the coefficient-scale
  // default. Projection is untouched (the m-slot metric stays nodal).
  double precondition_scale = -1.0;
  int trace_stride = 0;          // 0 disables the residual trace
  std::function<void(const MFGState&, int)> observer;  // after each accepted step

  void validate() const;
};

struct TraceRow {
  int iteration = 0;
  double sigma = 0.0;
  double natural_residual = 0.0;
  int pairing_check = 0;  // backtracking probes spent on this iteration;
                          // values above 1 mark sigma reductions
};

struct SolveStats {
  int iterations = 0;
  double final_residual = std::numeric_limits<double>::infinity();
  double sigma_final = 0.0;
  double sigma_min_seen = std::numeric_limits<double>::infinity();
  double sigma_max_seen = 0.0;
  long pairing_checks = 0;  // accepted monotonicity probes
  bool converged = false;
  std::vector<TraceRow> trace;
};

struct SolveResult {
  MFGState z;
  SolveStats stats;
};

// Nodewise m <- max(m, m_floor); u unchanged.
MFGState project_cone(MFGState z, double m_floor);

// || z - project(z - step apply(z)) ||_h / step over both slots.
double natural_residual(const ProblemData& data, const MFGState& z, double step);

using StateOperator = std::function<OperatorOutput(const MFGState&)>;

// Projected extragradient (two half-steps through the operator) for the
// monotone variational inequality over {m >= m_floor} x u. Backtracking
// multiplies sigma by backtrack_ratio until both
//   <A(z) - A(zbar), z - zbar> <= (1/(2 sigma)) ||z - zbar||^2   and
//   sigma ||A(z) - A(zbar)|| <= nu ||z - zbar||
// hold; the second test is what keeps purely skew couplings contractive
// (their pairing vanishes identically) and is the inequality the Fejer
// descent estimate actually consumes. Sigma is tentatively un-halved every
// doubling_period accepted steps. Stops when the natural residual at the
// current sigma falls below tol_natural; hitting max_iter returns the best
// iterate seen with converged = false.
SolveResult extragradient_solve_op(const StateOperator& op, const MFGState& z0,
                                   const SolverConfig& cfg,
                                   const USlotMetric* metric = nullptr);

SolveResult extragradient_solve(const ProblemData& data, const MFGState& z0,
                                const SolverConfig& cfg);

}  // namespace mfg
