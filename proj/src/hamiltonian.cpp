#include "mfg/hamiltonian.hpp"

#include <cmath>

namespace mfg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_finite(const Vec& p, int dim) {
  for (int k = 0; k < dim; ++k) {
    if (!std::isfinite(p[k])) throw std::invalid_argument("non-finite p component");
  }
}

// Radial kernel h(r) and h'(r) for the weak family.
double kernel_value(WeakKernel k, double r) {
  switch (k) {
    case WeakKernel::ExpSquare:
      return std::expm1(r * r);
    case WeakKernel::CoshRadial:
      return std::cosh(r) - 1.0;
  }
  return 0.0;
}

double kernel_deriv(WeakKernel k, double r) {
  switch (k) {
    case WeakKernel::ExpSquare:
      return 2.0 * r * std::exp(r * r);
    case WeakKernel::CoshRadial:
      return std::sinh(r);
  }
  return 0.0;
}

// h'(r)/r extended by its limit at r = 0 (both kernels have h'(0) = 0 with
// finite curvature).
double kernel_deriv_over_r(WeakKernel k, double r) {
  switch (k) {
    case WeakKernel::ExpSquare:
      return 2.0 * std::exp(r * r);
    case WeakKernel::CoshRadial:
      if (r < 1e-8) return 1.0 + r * r / 6.0;
      return std::sinh(r) / r;
  }
  return 0.0;
}

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::Power: return "power";
    case Family::Congestion: return "congestion";
    case Family::Weak: return "weak";
  }
  return "?";
}

std::string to_string(WeakKernel k) {
  switch (k) {
    case WeakKernel::ExpSquare: return "exp";
    case WeakKernel::CoshRadial: return "cosh";
  }
  return "?";
}

void HamiltonianSpec::validate_ranges() const {
  if (!(alpha > 1.0)) throw std::invalid_argument("hamiltonian: alpha must be > 1");
  if (!(beta > 0.0)) throw std::invalid_argument("hamiltonian: beta must be > 0");
  if (!(tau >= 0.0 && tau <= 1.0))
    throw std::invalid_argument("hamiltonian: tau must lie in [0,1]");
  if (family != Family::Congestion && tau != 0.0)
    throw std::invalid_argument("hamiltonian: tau is congestion-only");
  if (a.grid != b.grid) throw std::invalid_argument("hamiltonian: a/b grid mismatch");
  if (family == Family::Weak && g.grid != a.grid)
    throw std::invalid_argument("hamiltonian: g grid mismatch");
}

void HamiltonianSpec::validate_for_solve() const {
  validate_ranges();
  if (!(a_min() > 0.0)) throw std::invalid_argument("hamiltonian: essinf a must be > 0");
  if (!(b_min() > 0.0)) throw std::invalid_argument("hamiltonian: essinf b must be > 0");
  if (family == Family::Weak && min_value(g) < 0.0)
    throw std::invalid_argument("hamiltonian: g must be >= 0");
}

HamiltonianSpec make_power(const TorusGrid& grid, double alpha, double beta,
                           double a, double b) {
  HamiltonianSpec s;
  s.family = Family::Power;
  s.alpha = alpha;
  s.beta = beta;
  s.a = ScalarField(grid, a);
  s.b = ScalarField(grid, b);
  s.validate_ranges();
  return s;
}

HamiltonianSpec make_congestion(const TorusGrid& grid, double alpha, double beta,
                                double tau, double a, double b) {
  HamiltonianSpec s;
  s.family = Family::Congestion;
  s.alpha = alpha;
  s.beta = beta;
  s.tau = tau;
  s.a = ScalarField(grid, a);
  s.b = ScalarField(grid, b);
  s.validate_ranges();
  return s;
}

HamiltonianSpec make_weak(const TorusGrid& grid, double alpha, double beta,
                          WeakKernel kernel, double g, double a, double b) {
  HamiltonianSpec s;
  s.family = Family::Weak;
  s.alpha = alpha;
  s.beta = beta;
  s.kernel = kernel;
  s.a = ScalarField(grid, a);
  s.b = ScalarField(grid, b);
  s.g = ScalarField(grid, g);
  s.validate_ranges();
  return s;
}

ExponentSet ExponentSet::from(double alpha, double beta) {
  if (!(alpha > 1.0) || !(beta > 0.0))
    throw std::invalid_argument("exponents: need alpha > 1, beta > 0");
  ExponentSet e;
  e.beta_bar = beta + 1.0;
  e.beta_bar_conj = e.beta_bar / (e.beta_bar - 1.0);
  e.gamma_bar = alpha * e.beta_bar_conj;
  e.gamma_bar_conj = e.gamma_bar / (e.gamma_bar - 1.0);
  return e;
}

double radial_phi(const HamiltonianSpec& spec, int node, double r, double m) {
  switch (spec.family) {
    case Family::Power:
      return spec.a[node] * rpow(r, spec.alpha);
    case Family::Congestion: {
      const double sigma = spec.p_exponent();
      if (m <= 0.0) {
        if (spec.tau == 0.0) return spec.a[node] * rpow(r, sigma);
        return r == 0.0 ? 0.0 : kInf;
      }
      return spec.a[node] * rpow(r, sigma) / rpow(m, spec.tau);
    }
    case Family::Weak:
      return spec.g[node] * kernel_value(spec.kernel, r) + spec.a[node] * rpow(r, spec.alpha);
  }
  return 0.0;
}

double radial_dphi(const HamiltonianSpec& spec, int node, double r, double m) {
  switch (spec.family) {
    case Family::Power:
      return spec.a[node] * spec.alpha * rpow(r, spec.alpha - 1.0);
    case Family::Congestion: {
      const double sigma = spec.p_exponent();
      if (m <= 0.0) {
        if (spec.tau == 0.0) return spec.a[node] * sigma * rpow(r, sigma - 1.0);
        return r == 0.0 ? 0.0 : kInf;
      }
      return spec.a[node] * sigma * rpow(r, sigma - 1.0) / rpow(m, spec.tau);
    }
    case Family::Weak:
      return spec.g[node] * kernel_deriv(spec.kernel, r) +
             spec.a[node] * spec.alpha * rpow(r, spec.alpha - 1.0);
  }
  return 0.0;
}

double radial_dphi_over_r(const HamiltonianSpec& spec, int node, double r, double m) {
  if (r == 0.0) {
    // Limit of dphi(r)/r: the power term contributes 0 above exponent 2,
    // its coefficient at exactly 2, and diverges below 2 (the radial kink);
    // the weak kernels contribute their finite curvature.
    const double e = spec.p_exponent();
    if (spec.a[node] > 0.0 && e < 2.0) return kInf;
    double v = 0.0;
    if (e == 2.0) {
      double coeff = spec.a[node] * e;
      if (spec.family == Family::Congestion && spec.tau > 0.0) {
        if (m <= 0.0) return kInf;
        coeff /= rpow(m, spec.tau);
      }
      v += coeff;
    }
    if (spec.family == Family::Weak)
      v += spec.g[node] * kernel_deriv_over_r(spec.kernel, 0.0);
    return v;
  }
  return radial_dphi(spec, node, r, m) / r;
}

double eval_H(const HamiltonianSpec& spec, int node, const Vec& p, double m) {
  const int dim = spec.grid().dim;
  require_finite(p, dim);
  if (m < 0.0) throw std::invalid_argument("eval_H: m must be >= 0");
  const double r = norm(p, dim);
  const double pp = radial_phi(spec, node, r, m);
  if (pp == kInf) return kInf;
  return pp - spec.b[node] * rpow(m, spec.beta);
}

Vec eval_DpH(const HamiltonianSpec& spec, int node, const Vec& p, double m) {
  const int dim = spec.grid().dim;
  require_finite(p, dim);
  if (!(m > 0.0)) throw std::invalid_argument("eval_DpH: m must be > 0");
  const double r = norm(p, dim);
  if (r == 0.0) return Vec{0.0, 0.0};
  const double f = radial_dphi_over_r(spec, node, r, m);
  Vec out{f * p[0], 0.0};
  if (dim == 2) out[1] = f * p[1];
  return out;
}

Vec eval_DpH_extended(const HamiltonianSpec& spec, int node, const Vec& p, double m) {
  const int dim = spec.grid().dim;
  const double r = norm(p, dim);
  if (r == 0.0) return Vec{0.0, 0.0};
  const double f = radial_dphi_over_r(spec, node, r, m);
  Vec out{f * p[0], 0.0};
  if (dim == 2) out[1] = f * p[1];
  return out;
}

Vec eval_mDpH(const HamiltonianSpec& spec, int node, const Vec& p, double m) {
  const int dim = spec.grid().dim;
  require_finite(p, dim);
  if (m < 0.0) throw std::invalid_argument("eval_mDpH: m must be >= 0");
  if (m > 0.0) {
    Vec d = eval_DpH(spec, node, p, m);
    d[0] *= m;
    d[1] *= m;
    return d;
  }
  // m = 0 limits: zero except the tau = 1 congestion case, where the
  // m-singularity of D_pH exactly cancels the m factor.
  if (spec.family == Family::Congestion && spec.tau == 1.0) {
    const double r = norm(p, dim);
    if (r == 0.0) return Vec{0.0, 0.0};
    const double sigma = spec.p_exponent();
    const double f = spec.a[node] * sigma * rpow(r, sigma - 2.0);
    Vec out{f * p[0], 0.0};
    if (dim == 2) out[1] = f * p[1];
    return out;
  }
  return Vec{0.0, 0.0};
}

double monotonicity_lhs(const HamiltonianSpec& spec, int node, const Vec& p1,
                        double m1, const Vec& p2, double m2) {
  const int dim = spec.grid().dim;
  const double h1 = eval_H(spec, node, p1, m1);
  const double h2 = eval_H(spec, node, p2, m2);
  const Vec j1 = eval_mDpH(spec, node, p1, m1);
  const Vec j2 = eval_mDpH(spec, node, p2, m2);
  const Vec dp{p1[0] - p2[0], p1[1] - p2[1]};
  const Vec dj{j1[0] - j2[0], j1[1] - j2[1]};
  return (-h1 + h2) * (m1 - m2) + dot(dj, dp, dim);
}

MonotonicityReport check_monotonicity(const HamiltonianSpec& spec, int sample_count,
                                      double m_floor, uint64_t rng_seed) {
  if (sample_count < 1) throw std::invalid_argument("check_monotonicity: sample_count >= 1");
  if (spec.family == Family::Congestion && !(m_floor > 0.0))
    throw std::invalid_argument("check_monotonicity: congestion needs m_floor > 0");
  const int dim = spec.grid().dim;
  const double m_lo = std::max(m_floor, 1e-8);
  Rng rng = Rng(rng_seed).split(0x6d6f6e6fu);  // "mono"
  MonotonicityReport rep;
  for (int i = 0; i < sample_count; ++i) {
    SamplePoint s1, s2;
    s1.node = rng.next_int(spec.grid().node_count);
    s2.node = s1.node;  // the inequality is pointwise in x
    for (int k = 0; k < dim; ++k) {
      s1.p[k] = rng.uniform(-10.0, 10.0);
      s2.p[k] = rng.uniform(-10.0, 10.0);
    }
    s1.m = rng.log_uniform(m_lo, 10.0);
    s2.m = rng.log_uniform(m_lo, 10.0);
    const double lhs = monotonicity_lhs(spec, s1.node, s1.p, s1.m, s2.p, s2.m);
    if (lhs < rep.min_lhs) {
      rep.min_lhs = lhs;
      rep.witness = {s1, s2};
    }
  }
  return rep;
}

std::string to_string(GrowthInequality id) {
  switch (id) {
    case GrowthInequality::HUpperAtZero: return "h-upper-at-zero";
    case GrowthInequality::DpHUpper: return "dph-upper";
    case GrowthInequality::HLower: return "h-lower";
    case GrowthInequality::LagrangianLower: return "lagrangian-lower";
    case GrowthInequality::HUpper: return "h-upper";
    case GrowthInequality::LagrangianPair: return "lagrangian-pair";
    case GrowthInequality::HUpperCongestion: return "h-upper-congestion";
  }
  return "?";
}

bool growth_applicable(Family family, GrowthInequality id) {
  switch (id) {
    case GrowthInequality::HUpperAtZero:
    case GrowthInequality::HLower:
    case GrowthInequality::LagrangianLower:
      return true;
    case GrowthInequality::DpHUpper:
      return family != Family::Weak;
    case GrowthInequality::HUpper:
      return family == Family::Power;
    case GrowthInequality::LagrangianPair:
      return family == Family::Power || family == Family::Weak;
    case GrowthInequality::HUpperCongestion:
      return family == Family::Congestion;
  }
  return false;
}

GrowthCertificate default_certificate(const HamiltonianSpec& spec, GrowthInequality id) {
  if (!growth_applicable(spec.family, id)) {
    throw std::invalid_argument("growth inequality '" + to_string(id) +
                                "' does not apply to family " + to_string(spec.family));
  }
  const double a_min = spec.a_min();
  const double a_max = spec.a_max();
  const double b_min = spec.b_min();
  const double b_max = spec.b_max();
  if (!(a_min > 0.0) || !(b_min > 0.0)) {
    // No certified constant exists; C = 1 lets the sampler exhibit a witness.
    return {id, 1.0};
  }
  double C = 1.0;
  switch (id) {
    case GrowthInequality::HUpperAtZero:
      C = 1.0 / b_min;
      break;
    case GrowthInequality::DpHUpper:
      C = a_max * spec.p_exponent();
      break;
    case GrowthInequality::HLower:
      C = std::max(1.0 / a_min, b_max);
      break;
    case GrowthInequality::LagrangianLower:
      C = 1.0 / b_min;
      break;
    case GrowthInequality::HUpper:
      C = std::max(a_max, 1.0 / b_min);
      break;
    case GrowthInequality::LagrangianPair:
      C = std::max({b_max, 1.0 / b_min, 1.0 / ((spec.alpha - 1.0) * a_min)});
      break;
    case GrowthInequality::HUpperCongestion:
      C = std::max(a_max, 1.0 / b_min);
      break;
  }
  return {id, std::max(1.0, C)};
}

double growth_slack(const HamiltonianSpec& spec, const GrowthCertificate& cert,
                    int node, const Vec& p, double m) {
  const int dim = spec.grid().dim;
  const double C = cert.C;
  const double r = norm(p, dim);
  const double mb = rpow(m, spec.beta);
  switch (cert.inequality_id) {
    case GrowthInequality::HUpperAtZero: {
      const double h0 = eval_H(spec, node, Vec{0.0, 0.0}, m);
      return (-mb / C + C) - h0;
    }
    case GrowthInequality::DpHUpper: {
      const double dn = norm(eval_DpH(spec, node, p, m), dim);
      const double mpow = rpow(m, spec.beta - spec.beta / spec.alpha);
      if (spec.family == Family::Congestion) {
        const double sigma = spec.p_exponent();
        return C * (1.0 / m + rpow(m, -spec.tau)) * rpow(r, sigma - 1.0) +
               C * (mpow + 1.0 / m) - dn;
      }
      return C * (rpow(r, spec.alpha - 1.0) + mpow + 1.0) - dn;
    }
    case GrowthInequality::HLower: {
      const double h = eval_H(spec, node, p, m);
      if (spec.family == Family::Congestion) {
        const double sigma = spec.p_exponent();
        const double rhs = rpow(r, sigma) / (C * (rpow(m, spec.tau) + 1.0)) - C * (mb + 1.0);
        return h - rhs;
      }
      return h - (rpow(r, spec.alpha) / C - C * (mb + 1.0));
    }
    case GrowthInequality::LagrangianLower: {
      const double h = eval_H(spec, node, p, m);
      const double lag = dot(eval_DpH(spec, node, p, m), p, dim) - h;
      return lag - (mb / C - C);
    }
    case GrowthInequality::HUpper: {
      const double h = eval_H(spec, node, p, m);
      return C * (rpow(r, spec.alpha) + 1.0) - mb / C - h;
    }
    case GrowthInequality::LagrangianPair: {
      const double h = eval_H(spec, node, p, m);
      const double s1 = h + C * (mb + 1.0);
      const double lag = dot(eval_DpH(spec, node, p, m), p, dim) - h;
      const double s2 = lag - ((rpow(r, spec.alpha) + mb) / C - C);
      return std::min(s1, s2);
    }
    case GrowthInequality::HUpperCongestion: {
      const double h = eval_H(spec, node, p, m);
      const double sigma = spec.p_exponent();
      return C * (1.0 / m + rpow(m, -spec.tau)) * (rpow(r, sigma) + 1.0) - mb / C - h;
    }
  }
  return 0.0;
}

GrowthReport check_growth(const HamiltonianSpec& spec, const GrowthCertificate& cert,
                          int sample_count, uint64_t rng_seed) {
  if (!growth_applicable(spec.family, cert.inequality_id)) {
    throw std::invalid_argument("growth inequality '" + to_string(cert.inequality_id) +
                                "' does not apply to family " + to_string(spec.family));
  }
  const int dim = spec.grid().dim;
  Rng rng = Rng(rng_seed).split(0x67726f77u);  // "grow"
  GrowthReport rep;
  const double m_lo = spec.family == Family::Congestion ? 1e-3 : 1e-8;
  for (int i = 0; i < sample_count; ++i) {
    SamplePoint s;
    s.node = rng.next_int(spec.grid().node_count);
    for (int k = 0; k < dim; ++k) s.p[k] = rng.uniform(-10.0, 10.0);
    s.m = rng.log_uniform(m_lo, 10.0);
    const double slack = growth_slack(spec, cert, s.node, s.p, s.m);
    if (slack < rep.worst_slack) {
      rep.worst_slack = slack;
      rep.witness = s;
    }
  }
  return rep;
}

}  // namespace mfg
