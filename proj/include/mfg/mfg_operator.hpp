#pragma once

#include <functional>
#include <vector>

#include "mfg/infconv.hpp"

namespace mfg {

// The unknown pair (m, u) on a shared grid, m >= 0 nodewise when admissible.
struct MFGState {
  ScalarField m;
  ScalarField u;

  MFGState() = default;
  MFGState(const TorusGrid& g, double m0, double u0) : m(g, m0), u(g, u0) {}
  const TorusGrid& grid() const { return m.grid; }
};

// Nodal representation of the operator value. eta pairs against variations
// of m, nu against variations of u, both under the h-weighted inner product:
// <A[z],(eta_t,nu_t)> = <eta,eta_t>_h + <nu,nu_t>_h for all test fields.
struct OperatorOutput {
  ScalarField eta;
  ScalarField nu;
};

struct ProblemData {
  TorusGrid grid;
  HamiltonianSpec spec;
  ScalarField V;
  ExponentSet exponents{};
  double epsilon = 0.0;        // gamma_bar-Laplacian weight, also the
                               // envelope parameter when use_envelope
  bool use_envelope = false;
  double m_floor = 0.0;        // > 0 required for the congestion family
  double support_threshold_factor = 1e-8;

  static ProblemData make(const TorusGrid& grid, HamiltonianSpec spec,
                          ScalarField V, double epsilon, bool use_envelope,
                          double m_floor);
  double support_threshold(const MFGState& z) const;
};

// Assembles the regularized operator at z = (m,u) with p = gradient(u):
//   eta(x) = -u - H(x,p,m) + V(x)
//   nu     = -div(m DpH(x,p,m) + eps |p|^{gb-2} p) + (m-1) + eps |u|^{gb-2} u
// H and DpH are replaced by the envelope pair when use_envelope and eps > 0.
OperatorOutput apply(const ProblemData& data, const MFGState& z);

// <apply(z1) - apply(z2), z1 - z2>_h over both slots. Nonnegative for every
// monotone coupling because the discrete divergence is the exact negative
// adjoint of the gradient.
double monotonicity_pairing(const ProblemData& data, const MFGState& z1,
                            const MFGState& z2);

struct HJResidual {
  ScalarField field;          // u + H(x,Du,m) - V
  double max_pos = 0.0;       // max over nodes of the positive part
  double max_on_support = 0.0;  // max |field| where m exceeds the threshold
};

HJResidual hj_residual(const ProblemData& data, const MFGState& z);

struct TransportResidual {
  ScalarField field;     // nu slot of apply
  double l1 = 0.0;       // integral(|field|)
  double mass_gap = 0.0; // integral(m-1) + eps integral(|u|^{gb-2} u)
};

TransportResidual transport_residual(const ProblemData& data, const MFGState& z);

struct WeakCertificate {
  double min_value = std::numeric_limits<double>::infinity();
  int witness_pair = -1;
};

// Evaluates, for each supplied test pair (mu, upsilon) with min mu > 0,
//   integral[ (-ups - H(x,Dups,mu) + V)(mu - m)
//             + mu DpH(x,Dups,mu).(Dups - Du) + (mu-1)(ups - u) ]
// against z = (m,u) and returns the minimum with its witness index.
// Nonnegative values are the defining inequality of a weak solution.
WeakCertificate weak_solution_certificate(const ProblemData& data, const MFGState& z,
                                          const std::vector<MFGState>& test_pairs);

// State arithmetic used by the solver, h-weighted over both slots.
double state_inner(const MFGState& a, const MFGState& b);
double state_norm(const MFGState& a);
double output_inner(const OperatorOutput& a, const OperatorOutput& b);

}  // namespace mfg
