#include "mfg/infconv.hpp"

#include <cmath>

namespace mfg {

namespace {

constexpr double kZeroMargin = 1e-12;   // shortcut band half-width
constexpr double kOptTol = 1e-12;       // scalar optimality residual target

double penalized_objective(const EnvelopeSpec& spec, int node, const Vec& p,
                           const Vec& q, double m) {
  const int dim = spec.base->grid().dim;
  const Vec shifted{p[0] - q[0], p[1] - q[1]};
  return eval_H(*spec.base, node, shifted, m) +
         envelope_kernel(q, dim, spec.base->alpha) / spec.epsilon;
}

}  // namespace

double envelope_kernel_scalar(double s, double alpha) {
  return s + rpow(s, alpha);
}

double envelope_kernel(const Vec& q, int dim, double alpha) {
  return envelope_kernel_scalar(norm(q, dim), alpha);
}

EnvelopeSpec::EnvelopeSpec(const HamiltonianSpec& b, double eps)
    : base(&b), epsilon(eps) {
  if (!(eps > 0.0 && eps <= 1.0))
    throw std::invalid_argument("envelope: epsilon must lie in (0,1]");
}

EnvelopeValue envelope(const EnvelopeSpec& spec, int node, const Vec& p, double m) {
  const HamiltonianSpec& base = *spec.base;
  const int dim = base.grid().dim;
  const double eps = spec.epsilon;
  if (base.family == Family::Congestion && !(m > 0.0))
    throw std::invalid_argument("envelope: congestion requires m > 0");
  if (m < 0.0) throw std::invalid_argument("envelope: m must be >= 0");

  const double r = norm(p, dim);
  const double alpha = base.alpha;

  EnvelopeValue out;
  const double dH = r == 0.0 ? 0.0 : radial_dphi(base, node, r, m);
  // Zero region of the minimizer: the kernel's subdifferential at 0 is the
  // unit ball, so |D_pH| <= 1/eps collapses the envelope to H itself. A
  // strict margin avoids dithering at the boundary.
  if (dH * eps <= 1.0 - kZeroMargin || dH - 1.0 / eps <= 0.0) {
    out.value = eval_H(base, node, p, m);
    out.grad_p = r == 0.0 ? Vec{0.0, 0.0} : eval_DpH_extended(base, node, p, m);
    return out;
  }

  // Radial reduction: q = s p/|p|, s in (0, r). The optimality residual
  //   G(s) = dphi(r - s) - (1 + alpha s^{alpha-1}) / eps
  // is strictly decreasing with G(0) > 0 > G(r).
  auto residual = [&](double s) {
    return radial_dphi(base, node, r - s, m) -
           (1.0 + alpha * rpow(s, alpha - 1.0)) / eps;
  };
  double lo = 0.0, hi = r;
  double s = 0.5 * r;
  int it = 0;
  for (; it < 200; ++it) {
    s = 0.5 * (lo + hi);
    const double g = residual(s);
    if (std::fabs(g) <= kOptTol) break;
    if (g > 0.0)
      lo = s;
    else
      hi = s;
    if (hi - lo <= 1e-16 * std::max(1.0, r)) {
      s = 0.5 * (lo + hi);
      break;
    }
  }
  out.iterations = it;
  const double scale = s / r;
  out.q_star = Vec{scale * p[0], scale * p[1]};
  const double t = r - s;
  const Vec shifted{p[0] - out.q_star[0], p[1] - out.q_star[1]};
  out.value = eval_H(base, node, shifted, m) +
              envelope_kernel_scalar(s, alpha) / eps;
  const double f = t == 0.0 ? 0.0 : radial_dphi(base, node, t, m) / r;
  out.grad_p = Vec{f * p[0], f * p[1]};
  return out;
}

namespace {

// prox_{(t/eps) K}(y): radial shrinkage with threshold t/eps from the |q|
// term, then the power term. Closed form for alpha = 2, bisection otherwise.
Vec kernel_prox(const Vec& y, int dim, double alpha, double t_over_eps) {
  const double r = norm(y, dim);
  const double target = r - t_over_eps;
  if (target <= 0.0) return Vec{0.0, 0.0};
  double rho;
  if (alpha == 2.0) {
    rho = target / (1.0 + 2.0 * t_over_eps);
  } else {
    // rho + (t/eps) alpha rho^{alpha-1} = target, increasing in rho
    double lo = 0.0, hi = target;
    for (int i = 0; i < 80; ++i) {
      const double mid = 0.5 * (lo + hi);
      const double g = mid + t_over_eps * alpha * rpow(mid, alpha - 1.0) - target;
      if (g > 0.0)
        hi = mid;
      else
        lo = mid;
    }
    rho = 0.5 * (lo + hi);
  }
  const double f = rho / r;
  Vec out{f * y[0], 0.0};
  if (dim == 2) out[1] = f * y[1];
  return out;
}

}  // namespace

EnvelopeValue envelope_prox(const EnvelopeSpec& spec, int node, const Vec& p,
                            double m, int max_iter) {
  const HamiltonianSpec& base = *spec.base;
  const int dim = base.grid().dim;
  const double eps = spec.epsilon;
  if (base.family == Family::Congestion && !(m > 0.0))
    throw std::invalid_argument("envelope_prox: congestion requires m > 0");

  EnvelopeValue out;
  Vec q{0.0, 0.0};
  double fval = penalized_objective(spec, node, p, q, m);
  double t = eps;  // so the initial shrinkage threshold is 1
  bool converged = false;
  int it = 0;
  for (; it < max_iter; ++it) {
    const Vec shifted{p[0] - q[0], p[1] - q[1]};
    const Vec grad = eval_DpH_extended(base, node, shifted, m);
    Vec next = q;
    double fnext = fval;
    bool accepted = false;
    double tt = t;
    for (int bt = 0; bt < 50; ++bt) {
      const Vec y{q[0] + tt * grad[0], q[1] + tt * grad[1]};
      next = kernel_prox(y, dim, base.alpha, tt / eps);
      fnext = penalized_objective(spec, node, p, next, m);
      if (fnext <= fval + 1e-15 * (1.0 + std::fabs(fval))) {
        accepted = true;
        break;
      }
      tt *= 0.5;
    }
    if (!accepted) break;
    t = std::min(tt * 2.0, 1e3 * eps);
    const Vec step{next[0] - q[0], next[1] - q[1]};
    q = next;
    fval = fnext;
    if (norm(step, dim) <= 1e-10) {
      converged = true;
      ++it;
      break;
    }
  }
  out.q_star = q;
  const Vec shifted{p[0] - q[0], p[1] - q[1]};
  out.value = fval;
  out.grad_p = eval_DpH_extended(base, node, shifted, m);
  out.converged = converged;
  out.iterations = it;
  return out;
}

double envelope_box_radius(const EnvelopeSpec& spec, int node, const Vec& p, double m) {
  const HamiltonianSpec& base = *spec.base;
  const int dim = base.grid().dim;
  const double h = eval_H(base, node, p, m);
  if (!std::isfinite(h)) throw std::invalid_argument("envelope_box_radius: H not finite");
  const double cb = std::max(1.0, base.b_max());
  const double cm = cb * (rpow(m, base.beta) + 1.0);
  return norm(p, dim) + rpow(spec.epsilon * (std::fabs(h) + cm), 1.0 / base.alpha);
}

double envelope_oracle(const EnvelopeSpec& spec, int node, const Vec& p, double m,
                       double box_radius, int grid_n) {
  if (grid_n < 3) throw std::invalid_argument("envelope_oracle: grid_n >= 3");
  const HamiltonianSpec& base = *spec.base;
  const int dim = base.grid().dim;
  const double R = box_radius > 0.0 ? box_radius : envelope_box_radius(spec, node, p, m);
  const double step = 2.0 * R / (grid_n - 1);
  double best = std::numeric_limits<double>::infinity();
  if (dim == 1) {
    for (int i = 0; i < grid_n; ++i) {
      const Vec q{-R + i * step, 0.0};
      best = std::min(best, penalized_objective(spec, node, p, q, m));
    }
  } else {
    for (int i = 0; i < grid_n; ++i) {
      for (int j = 0; j < grid_n; ++j) {
        const Vec q{-R + i * step, -R + j * step};
        best = std::min(best, penalized_objective(spec, node, p, q, m));
      }
    }
  }
  return best;
}

double envelope_oracle_lipschitz(const EnvelopeSpec& spec, int node, const Vec& p,
                                 double m, double box_radius) {
  const HamiltonianSpec& base = *spec.base;
  const int dim = base.grid().dim;
  const double R = box_radius > 0.0 ? box_radius : envelope_box_radius(spec, node, p, m);
  const double corner = R * std::sqrt(static_cast<double>(dim));
  const double rmax = norm(p, dim) + corner;
  return radial_dphi(base, node, rmax, m) +
         (1.0 + base.alpha * rpow(corner, base.alpha - 1.0)) / spec.epsilon;
}

EnvelopeBoundsReport check_envelope_bounds(const EnvelopeSpec& spec, int sample_count,
                                           uint64_t rng_seed) {
  const HamiltonianSpec& base = *spec.base;
  if (base.family == Family::Congestion)
    throw std::invalid_argument("check_envelope_bounds: power or weak families only");
  const int dim = base.grid().dim;
  const double eps = spec.epsilon;
  const double alpha = base.alpha;
  const double beta = base.beta;
  const double cu = std::max(1.0, 1.0 / base.b_min());
  const double ca = std::max(1.0, 1.0 / base.a_min());
  const double cb = std::max(1.0, base.b_max());
  const double clow = rpow(2.0, alpha) * (ca + 1.0);

  Rng rng = Rng(rng_seed).split(0x656e7642u);  // "envB"
  EnvelopeBoundsReport rep;
  auto update = [&rep](double slack, const SamplePoint& s, int ineq, double eps_used) {
    if (slack < rep.worst_slack) {
      rep.worst_slack = slack;
      rep.witness = {s, ineq, eps_used};
    }
  };

  for (int i = 0; i < sample_count; ++i) {
    SamplePoint s;
    s.node = rng.next_int(base.grid().node_count);
    for (int k = 0; k < dim; ++k) s.p[k] = rng.uniform(-10.0, 10.0);
    s.m = rng.log_uniform(1e-8, 10.0);
    const EnvelopeValue env = envelope(spec, s.node, s.p, s.m);
    const double r = norm(s.p, dim);
    const double mb = rpow(s.m, beta);
    const double h = eval_H(base, s.node, s.p, s.m);

    // eps-dependent upper bound (take q = p in the infimum).
    update((2.0 / eps) * (rpow(r, alpha) + 1.0) - mb / cu + cu - env.value, s, 0, eps);

    // gradient bound via the minimizer-radius chain:
    // K(q*)/eps <= H - H_eps and the kernel inclusion at q*. The radicand is
    // nonnegative whenever the coercive lower bound holds.
    const double qbound = rpow(std::max(0.0, eps * (h + cb * (mb + 1.0))), 1.0 / alpha);
    update((1.0 + alpha * rpow(qbound, alpha - 1.0)) / eps - norm(env.grad_p, dim),
           s, 1, eps);

    // eps-uniform coercive lower bound.
    update(env.value - (rpow(r, alpha) / clow - cb * (mb + 1.0)), s, 2, eps);

    // eps-uniform Lagrangian lower bound.
    update(dot(env.grad_p, s.p, dim) - env.value - (mb / cu - cu), s, 3, eps);
  }
  return rep;
}

}  // namespace mfg
