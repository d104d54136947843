#pragma once

#include "mfg/hamiltonian.hpp"

namespace mfg {

// Penalty kernel of the envelope: K(q) = |q| + |q|^alpha, strictly convex,
// K(0) = 0, subdifferential at 0 equal to the closed unit ball.
double envelope_kernel(const Vec& q, int dim, double alpha);
double envelope_kernel_scalar(double s, double alpha);

// Envelope configuration: replaces H by
//   H_eps(x,p,m) = inf_q { H(x,p-q,m) + K(q)/eps },  0 < eps <= 1.
struct EnvelopeSpec {
  const HamiltonianSpec* base = nullptr;
  double epsilon = 1.0;

  EnvelopeSpec() = default;
  EnvelopeSpec(const HamiltonianSpec& b, double eps);
};

struct EnvelopeValue {
  double value = 0.0;   // H_eps
  Vec q_star{0.0, 0.0}; // unique minimizer
  Vec grad_p{0.0, 0.0}; // D_p H_eps = D_pH(x, p - q_star, m)
  bool converged = true;
  int iterations = 0;
};

// Evaluates the envelope. The minimizer is found by the radial reduction:
// if |D_pH(x,p,m)| <= (1 - 1e-12)/eps the zero shortcut applies (q = 0 and
// the envelope collapses to H); otherwise q = s p/|p| with s in (0,|p|)
// located by bisection on the strictly decreasing optimality residual
//   dphi(|p| - s) - (1 + alpha s^{alpha-1})/eps,
// driven below 1e-12 (or to interval exhaustion). Requires m > 0 for the
// congestion family; m >= 0 otherwise (the p-part is then m-free).
EnvelopeValue envelope(const EnvelopeSpec& spec, int node, const Vec& p, double m);

// Fallback path that never uses the radial structure: damped proximal-gradient
// iteration q <- prox_{tK/eps}(q + t D_pH(x,p-q,m)) with the closed-form prox
// for alpha = 2 and scalar Newton on the radial prox equation otherwise.
// Stops at step norm <= 1e-10; gives up after max_iter (default 200) with
// converged = false and the last iterate.
EnvelopeValue envelope_prox(const EnvelopeSpec& spec, int node, const Vec& p,
                            double m, int max_iter = 200);

// Radius within which the true minimizer is guaranteed to lie (coercivity of
// the penalized objective).
double envelope_box_radius(const EnvelopeSpec& spec, int node, const Vec& p, double m);

// Brute-force minimum of H(x,p-q,m) + K(q)/eps over a uniform q-grid of
// grid_n points per axis on [-box_radius, box_radius]^dim. Pass
// box_radius <= 0 to use envelope_box_radius. Independent of envelope().
double envelope_oracle(const EnvelopeSpec& spec, int node, const Vec& p, double m,
                       double box_radius, int grid_n);

// Lipschitz bound of the penalized objective over the oracle box; the grid
// minimum exceeds the true minimum by at most bound * (half cell diagonal).
double envelope_oracle_lipschitz(const EnvelopeSpec& spec, int node, const Vec& p,
                                 double m, double box_radius);

struct EnvelopeBoundsWitness {
  SamplePoint sample;
  int inequality = 0;  // 0 upper, 1 gradient, 2 lower, 3 lagrangian
  double epsilon = 0.0;
};

struct EnvelopeBoundsReport {
  double worst_slack = std::numeric_limits<double>::infinity();
  EnvelopeBoundsWitness witness;
};

// Sampled slacks of the four envelope estimates with explicit constants
// derived from the coefficient bounds: the eps-dependent upper bound, the
// gradient bound through the minimizer-radius chain, the eps-uniform
// coercive lower bound, and the eps-uniform Lagrangian lower bound.
EnvelopeBoundsReport check_envelope_bounds(const EnvelopeSpec& spec, int sample_count,
                                           uint64_t rng_seed);

}  // namespace mfg
