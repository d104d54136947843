#pragma once

#include <limits>
#include <string>

#include "mfg/grid.hpp"
#include "mfg/rng.hpp"

namespace mfg {

enum class Family { Power, Congestion, Weak };

// Convex C^1 kernels for the weak family, radial in p with h(0) = 0. Any
// convex m-independent kernel preserves the coupling monotonicity: grouping
// its contribution to the inequality per sample pair leaves
//   m1 [h(p2) - h(p1) - Dh(p1).(p2-p1)] + m2 [h(p1) - h(p2) - Dh(p2).(p1-p2)],
// two Bregman gaps of h weighted by positive densities, each >= 0 by
// convexity; the power/density terms are monotone on their own.
enum class WeakKernel { ExpSquare, CoshRadial };  // e^{|p|^2}-1, cosh(|p|)-1

std::string to_string(Family f);
std::string to_string(WeakKernel k);

// One of three coupling families on a grid:
//   Power:       H(x,p,m) = a(x)|p|^alpha - b(x) m^beta
//   Congestion:  H(x,p,m) = a(x)|p|^{alpha(1+tau/beta)} / m^tau - b(x) m^beta
//   Weak:        H(x,p,m) = g(x) h(p) + a(x)|p|^alpha - b(x) m^beta
// Values at m = 0 are the monotone limits; m * D_pH extends continuously.
struct HamiltonianSpec {
  Family family = Family::Power;
  double alpha = 2.0;  // > 1
  double beta = 1.0;   // > 0
  double tau = 0.0;    // [0,1], congestion only
  ScalarField a;       // essinf > 0
  ScalarField b;       // essinf > 0 for a monotone coupling
  ScalarField g;       // >= 0, weak only
  WeakKernel kernel = WeakKernel::ExpSquare;

  const TorusGrid& grid() const { return a.grid; }

  // Exponent of the p-power term: alpha(1+tau/beta) for congestion, alpha else.
  double p_exponent() const {
    return family == Family::Congestion ? alpha * (1.0 + tau / beta) : alpha;
  }

  double a_min() const { return min_value(a); }
  double a_max() const { return max_coeff(a); }
  double b_min() const { return min_value(b); }
  double b_max() const { return max_coeff(b); }

  // Parameter ranges only; coefficient positivity is checked separately so
  // that the certificate battery can run on deliberately broken couplings.
  void validate_ranges() const;
  // Full solve-path validation, includes essinf a > 0, essinf b > 0, g >= 0.
  void validate_for_solve() const;

 private:
  static double max_coeff(const ScalarField& f) {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : f.values) m = std::max(m, v);
    return m;
  }
};

HamiltonianSpec make_power(const TorusGrid& grid, double alpha, double beta,
                           double a = 1.0, double b = 1.0);
HamiltonianSpec make_congestion(const TorusGrid& grid, double alpha, double beta,
                                double tau, double a = 1.0, double b = 1.0);
HamiltonianSpec make_weak(const TorusGrid& grid, double alpha, double beta,
                          WeakKernel kernel, double g = 1.0, double a = 1.0,
                          double b = 1.0);

// beta_bar = beta + 1, gamma_bar = alpha(beta+1)/beta, plus conjugates.
struct ExponentSet {
  double beta_bar;
  double gamma_bar;
  double beta_bar_conj;
  double gamma_bar_conj;

  static ExponentSet from(double alpha, double beta);
};

// Extended evaluation: finite for m > 0; at m = 0 returns the monotone limit
// (+infinity for the congestion family when tau > 0 and p != 0).
double eval_H(const HamiltonianSpec& spec, int node, const Vec& p, double m);

// Analytic p-gradient, m > 0 required. The p = 0 value is the minimal-norm
// subgradient selection (zero) for every built-in family.
Vec eval_DpH(const HamiltonianSpec& spec, int node, const Vec& p, double m);

// m * D_pH with its continuous extension to m = 0.
Vec eval_mDpH(const HamiltonianSpec& spec, int node, const Vec& p, double m);

// Like eval_DpH but also defined at m = 0 for families whose p-part is
// m-free (power, weak). Internal building block for the envelope and the
// operator assembly at floored densities.
Vec eval_DpH_extended(const HamiltonianSpec& spec, int node, const Vec& p, double m);

// Radial structure of the p-part: H(x,p,m) = phi(|p|) + psi(m) for every
// built-in family. Used by the envelope solver and the fast operator path.
// dphi(r) is the radial derivative; dphi_over_r(r) = dphi(r)/r extended by
// its limit at r = 0. Accepts m = 0 for families whose p-part is m-free.
double radial_phi(const HamiltonianSpec& spec, int node, double r, double m);
double radial_dphi(const HamiltonianSpec& spec, int node, double r, double m);
double radial_dphi_over_r(const HamiltonianSpec& spec, int node, double r, double m);

struct SamplePoint {
  int node = 0;
  Vec p{0.0, 0.0};
  double m = 0.0;
};

struct MonotonicityWitness {
  SamplePoint s1;
  SamplePoint s2;
};

struct MonotonicityReport {
  double min_lhs = std::numeric_limits<double>::infinity();
  MonotonicityWitness witness;
};

// Left-hand side of the density-coupling monotonicity inequality at a pair:
//   (-H(x,p1,m1)+H(x,p2,m2))(m1-m2)
//     + (m1 DpH(x,p1,m1) - m2 DpH(x,p2,m2)) . (p1-p2) >= 0.
double monotonicity_lhs(const HamiltonianSpec& spec, int node, const Vec& p1,
                        double m1, const Vec& p2, double m2);

// Random-sample certificate for the monotonicity inequality. Samples
// m log-uniform in [max(m_floor, tiny), 10], p uniform in [-10,10]^dim,
// x uniform over nodes. A min below -1e-10 is the caller's failure signal.
MonotonicityReport check_monotonicity(const HamiltonianSpec& spec,
                                      int sample_count, double m_floor,
                                      uint64_t rng_seed);

enum class GrowthInequality {
  HUpperAtZero,       // H(x,0,m) <= -(1/C) m^beta + C
  DpHUpper,           // family-specific |D_pH| upper bound
  HLower,             // coercive lower bound on H
  LagrangianLower,    // D_pH.p - H >= (1/C) m^beta - C
  HUpper,             // H <= C(|p|^alpha + 1) - (1/C) m^beta   (power growth)
  LagrangianPair,     // H >= -C(m^beta+1)  and  D_pH.p - H >= (1/C)(|p|^alpha+m^beta) - C
  HUpperCongestion,   // H <= C(1/m + 1/m^tau)(|p|^sigma + 1) - (1/C) m^beta
};

std::string to_string(GrowthInequality id);

// The constant of one growth inequality; constants are reusable upward, so
// C >= 1 always.
struct GrowthCertificate {
  GrowthInequality inequality_id;
  double C = 1.0;
};

bool growth_applicable(Family family, GrowthInequality id);

// Smallest documented constant (clamped to >= 1) for which the inequality
// holds for the given built-in family, in terms of the coefficient bounds.
GrowthCertificate default_certificate(const HamiltonianSpec& spec,
                                      GrowthInequality id);

struct GrowthReport {
  double worst_slack = std::numeric_limits<double>::infinity();
  SamplePoint witness;
};

// Sampled slack (LHS - RHS, oriented so slack >= 0 certifies) of the selected
// inequality with the certified constant. Throws on family mismatch.
GrowthReport check_growth(const HamiltonianSpec& spec, const GrowthCertificate& cert,
                          int sample_count, uint64_t rng_seed);

// Slack of the inequality at one sample, same orientation as check_growth.
double growth_slack(const HamiltonianSpec& spec, const GrowthCertificate& cert,
                    int node, const Vec& p, double m);

}  // namespace mfg
