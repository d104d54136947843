#include <cmath>

#include "doctest.h"
#include "mfg/infconv.hpp"

using namespace mfg;

namespace {

const TorusGrid g4 = TorusGrid::make(1, 4);

}  // namespace

TEST_SUITE_BEGIN("infconv");

TEST_CASE("penalty kernel values") {
  CHECK(envelope_kernel(Vec{0.0, 0.0}, 1, 2.0) == 0.0);
  CHECK(envelope_kernel(Vec{1.0, 0.0}, 1, 2.0) == doctest::Approx(2.0));
  CHECK(envelope_kernel(Vec{0.75, 0.0}, 1, 2.0) == doctest::Approx(1.3125));
  CHECK(envelope_kernel(Vec{3.0, 4.0}, 2, 2.0) == doctest::Approx(30.0));
}

TEST_CASE("envelope spec validation") {
  const HamiltonianSpec s = make_power(g4, 2.0, 1.0);
  CHECK_THROWS_AS(EnvelopeSpec(s, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(EnvelopeSpec(s, 1.5), std::invalid_argument);
  CHECK_NOTHROW(EnvelopeSpec(s, 1.0));
}

TEST_CASE("zero-minimizer region") {
  const HamiltonianSpec s = make_power(g4, 2.0, 1.0);
  const EnvelopeSpec env(s, 1.0);

  SUBCASE("small gradient collapses to H") {
    // |D_pH| = 0.2 <= 1: q* = 0 and the envelope equals H = 0.01 - 1.
    const EnvelopeValue v = envelope(env, 0, Vec{0.1, 0.0}, 1.0);
    CHECK(v.q_star[0] == 0.0);
    CHECK(v.value == doctest::Approx(-0.99));
    CHECK(v.grad_p[0] == doctest::Approx(0.2));
  }
  SUBCASE("p = 0 always collapses") {
    for (double eps : {1.0, 0.1, 0.01}) {
      const EnvelopeSpec e(s, eps);
      const EnvelopeValue v = envelope(e, 0, Vec{0.0, 0.0}, 0.7);
      CHECK(v.q_star[0] == 0.0);
      CHECK(v.value == doctest::Approx(-0.7));
    }
  }
  SUBCASE("strict margin boundary") {
    // |D_pH| = 2p; choose p so 2p eps sits just inside the margin.
    const double eps = 0.5;
    const EnvelopeSpec e(s, eps);
    const double p_edge = (1.0 - 1e-12) / eps / 2.0;
    CHECK(envelope(e, 0, Vec{p_edge, 0.0}, 1.0).q_star[0] == 0.0);
  }
}

TEST_CASE("hand case p=2, eps=1, alpha=2: q*=0.75, p-part 2.875") {
  const HamiltonianSpec s = make_power(g4, 2.0, 1.0);
  const EnvelopeSpec env(s, 1.0);
  const double m = 1.0;
  const EnvelopeValue v = envelope(env, 0, Vec{2.0, 0.0}, m);
  CHECK(v.q_star[0] == doctest::Approx(0.75).epsilon(1e-9));
  // p-part of the envelope: add back the m-term -b m^beta = -1.
  CHECK(v.value + 1.0 == doctest::Approx(2.875).epsilon(1e-9));
  // optimality: 2(2 - 0.75) = 1 + 2*0.75
  CHECK(std::fabs(2.0 * (2.0 - v.q_star[0]) - (1.0 + 2.0 * v.q_star[0])) <= 1e-9);
  // cross-check by brute force over q
  const double oracle = envelope_oracle(env, 0, Vec{2.0, 0.0}, m, 0.0, 4001);
  const double R = envelope_box_radius(env, 0, Vec{2.0, 0.0}, m);
  const double L = envelope_oracle_lipschitz(env, 0, Vec{2.0, 0.0}, m, R);
  CHECK(std::fabs(v.value - oracle) <= L * (R / 4000.0) + 1e-12);
}

TEST_CASE("oracle agreement on random samples") {
  Rng rng(51);
  for (int dim : {1, 2}) {
    const TorusGrid g = TorusGrid::make(dim, 4);
    const HamiltonianSpec s = make_power(g, 2.0, 1.0);
    const int grid_n = dim == 1 ? 2001 : 301;
    for (int trial = 0; trial < (dim == 1 ? 60 : 40); ++trial) {
      Vec p{rng.uniform(-6.0, 6.0), 0.0};
      if (dim == 2) p[1] = rng.uniform(-6.0, 6.0);
      const double m = rng.log_uniform(0.05, 5.0);
      const double eps = rng.log_uniform(0.01, 1.0);
      const EnvelopeSpec env(s, eps);
      const EnvelopeValue v = envelope(env, 0, p, m);
      const double R = envelope_box_radius(env, 0, p, m);
      const double oracle = envelope_oracle(env, 0, p, m, R, grid_n);
      const double L = envelope_oracle_lipschitz(env, 0, p, m, R);
      const double bound = L * (R / (grid_n - 1)) * std::sqrt(double(dim)) + 1e-10;
      CAPTURE(p[0]); CAPTURE(m); CAPTURE(eps);
      CHECK(oracle - v.value >= -1e-9);          // grid minimum cannot beat the true one
      CHECK(std::fabs(v.value - oracle) <= bound);
    }
  }
}

TEST_CASE("oracle at p=0 returns H exactly") {
  const HamiltonianSpec s = make_power(g4, 2.0, 1.0);
  const EnvelopeSpec env(s, 0.5);
  // odd grid count puts q = 0 on the grid
  const double oracle = envelope_oracle(env, 0, Vec{0.0, 0.0}, 2.0, 1.0, 401);
  CHECK(oracle == doctest::Approx(eval_H(s, 0, Vec{0.0, 0.0}, 2.0)).epsilon(1e-14));
}

TEST_CASE("envelope never exceeds H and grows with eps") {
  Rng rng(53);
  const HamiltonianSpec specs[] = {
      make_power(g4, 2.0, 1.0),
      make_power(g4, 1.5, 0.5),
      make_weak(g4, 2.0, 1.0, WeakKernel::CoshRadial),
  };
  for (const auto& s : specs) {
    for (int trial = 0; trial < 100; ++trial) {
      const Vec p{rng.uniform(-8.0, 8.0), 0.0};
      const double m = rng.log_uniform(0.01, 8.0);
      const double h = eval_H(s, 0, p, m);
      for (double eps : {0.75, 0.25, 0.05}) {
        const EnvelopeValue v = envelope(EnvelopeSpec(s, eps), 0, p, m);
        CHECK(v.value <= h + 1e-10);
      }
      // larger eps -> weaker penalty -> smaller envelope
      const double v1 = envelope(EnvelopeSpec(s, 1.0), 0, p, m).value;
      const double v01 = envelope(EnvelopeSpec(s, 0.1), 0, p, m).value;
      const double v001 = envelope(EnvelopeSpec(s, 0.01), 0, p, m).value;
      CHECK(v1 <= v01 + 1e-10);
      CHECK(v01 <= v001 + 1e-10);
    }
  }
}

TEST_CASE("optimality identity at nonzero minimizers") {
  Rng rng(57);
  const HamiltonianSpec s = make_power(g4, 2.0, 1.0);
  int nonzero = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const Vec p{rng.uniform(-8.0, 8.0), 0.0};
    const double m = rng.log_uniform(0.05, 5.0);
    const double eps = rng.log_uniform(0.01, 1.0);
    const EnvelopeValue v = envelope(EnvelopeSpec(s, eps), 0, p, m);
    const double q = std::fabs(v.q_star[0]);
    if (q == 0.0) continue;
    ++nonzero;
    const double lhs = std::fabs(v.grad_p[0]);
    const double rhs = (1.0 + s.alpha * std::pow(q, s.alpha - 1.0)) / eps;
    CHECK(std::fabs(lhs - rhs) <= 1e-9 * std::max(1.0, rhs));
    // value identity of the returned triple
    const double recomputed =
        eval_H(s, 0, Vec{p[0] - v.q_star[0], 0.0}, m) +
        envelope_kernel(v.q_star, 1, s.alpha) / eps;
    CHECK(std::fabs(v.value - recomputed) <= 1e-9 * std::max(1.0, std::fabs(v.value)));
  }
  CHECK(nonzero > 50);
}

TEST_CASE("gradient matches central finite differences") {
  Rng rng(61);
  const HamiltonianSpec specs[] = {
      make_power(g4, 2.0, 1.0),
      make_weak(g4, 2.0, 1.0, WeakKernel::ExpSquare),
  };
  for (const auto& s : specs) {
    for (int trial = 0; trial < 60; ++trial) {
      const Vec p{rng.uniform(-4.0, 4.0), 0.0};
      const double m = rng.log_uniform(0.1, 4.0);
      const double eps = rng.log_uniform(0.05, 1.0);
      const EnvelopeSpec env(s, eps);
      const double dp = 1e-6 * std::max(1.0, std::fabs(p[0]));
      const double fp = envelope(env, 0, Vec{p[0] + dp, 0.0}, m).value;
      const double fm = envelope(env, 0, Vec{p[0] - dp, 0.0}, m).value;
      const double fd = (fp - fm) / (2.0 * dp);
      const double an = envelope(env, 0, p, m).grad_p[0];
      CHECK(std::fabs(fd - an) <= 1e-6 * std::max(1.0, std::fabs(an)));
    }
  }
}

TEST_CASE("monotonicity transfers to the envelope pair") {
  const int samples = 10000;
  const HamiltonianSpec s = make_weak(g4, 2.0, 1.0, WeakKernel::ExpSquare);
  for (double eps : {1.0, 0.1}) {
    const EnvelopeSpec env(s, eps);
    Rng rng = Rng(71).split(static_cast<uint64_t>(eps * 1000));
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
      const Vec p1{rng.uniform(-10.0, 10.0), 0.0};
      const Vec p2{rng.uniform(-10.0, 10.0), 0.0};
      const double m1 = rng.log_uniform(1e-8, 10.0);
      const double m2 = rng.log_uniform(1e-8, 10.0);
      const EnvelopeValue v1 = envelope(env, 0, p1, m1);
      const EnvelopeValue v2 = envelope(env, 0, p2, m2);
      const double lhs = (-v1.value + v2.value) * (m1 - m2) +
                         (m1 * v1.grad_p[0] - m2 * v2.grad_p[0]) * (p1[0] - p2[0]);
      worst = std::min(worst, lhs);
    }
    CHECK(worst >= -1e-10);
  }
}

TEST_CASE("sampled envelope bounds stay nonnegative") {
  for (double eps : {1.0, 0.1, 0.01}) {
    const HamiltonianSpec s = make_power(g4, 2.0, 1.0);
    const EnvelopeSpec env(s, eps);
    const EnvelopeBoundsReport rep = check_envelope_bounds(env, 4000, 81);
    CAPTURE(eps);
    CHECK(rep.worst_slack >= 0.0);
  }
  const HamiltonianSpec w = make_weak(g4, 2.0, 1.0, WeakKernel::ExpSquare);
  const EnvelopeBoundsReport rep = check_envelope_bounds(EnvelopeSpec(w, 0.1), 4000, 83);
  CHECK(rep.worst_slack >= 0.0);
}

TEST_CASE("prox fallback agrees with the radial path") {
  Rng rng(91);
  const HamiltonianSpec s = make_power(g4, 2.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const Vec p{rng.uniform(-6.0, 6.0), 0.0};
    const double m = rng.log_uniform(0.1, 4.0);
    const double eps = rng.log_uniform(0.05, 1.0);
    const EnvelopeSpec env(s, eps);
    const EnvelopeValue radial = envelope(env, 0, p, m);
    const EnvelopeValue prox = envelope_prox(env, 0, p, m, 2000);
    CHECK(prox.converged);
    CHECK(std::fabs(prox.value - radial.value) <= 1e-7 * std::max(1.0, std::fabs(radial.value)));
    CHECK(std::fabs(prox.q_star[0] - radial.q_star[0]) <= 1e-5);
  }
  // 2D sanity
  const TorusGrid g2 = TorusGrid::make(2, 4);
  const HamiltonianSpec s2 = make_power(g2, 2.0, 1.0);
  const EnvelopeSpec env2(s2, 0.2);
  const Vec p{3.0, -4.0};
  const EnvelopeValue radial = envelope(env2, 0, p, 1.0);
  const EnvelopeValue prox = envelope_prox(env2, 0, p, 1.0, 2000);
  CHECK(prox.converged);
  CHECK(std::fabs(prox.value - radial.value) <= 1e-7 * std::max(1.0, std::fabs(radial.value)));
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("infconv");

TEST_CASE("kernel inclusion at nonzero minimizers") {
  // Outside the zero region the gradient at the shifted point meets the
  // kernel's subdifferential: it can never fall below the ball radius 1/eps,
  // and it equals (1 + alpha |q*|^{alpha-1})/eps exactly.
  Rng rng(171);
  const HamiltonianSpec specs[] = {
      make_power(g4, 2.0, 1.0),
      make_power(g4, 1.5, 1.0),
      make_weak(g4, 2.0, 1.0, WeakKernel::CoshRadial),
  };
  int checked = 0;
  for (const auto& s : specs) {
    for (int trial = 0; trial < 200; ++trial) {
      const Vec p{rng.uniform(-8.0, 8.0), 0.0};
      const double m = rng.log_uniform(0.05, 5.0);
      const double eps = rng.log_uniform(0.02, 1.0);
      const EnvelopeValue v = envelope(EnvelopeSpec(s, eps), 0, p, m);
      const double q = std::fabs(v.q_star[0]);
      if (q == 0.0) continue;
      ++checked;
      const double grad = std::fabs(v.grad_p[0]);
      CHECK(grad - 1.0 / eps >= -1e-9);
      const double target = (1.0 + s.alpha * std::pow(q, s.alpha - 1.0)) / eps;
      CHECK(std::fabs(grad - target) <= 1e-9 * std::max(1.0, target));
    }
  }
  CHECK(checked > 100);
}

TEST_SUITE_END();
