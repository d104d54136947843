#include <cmath>

#include "doctest.h"
#include "mfg/hamiltonian.hpp"

using namespace mfg;

namespace {

const TorusGrid g4 = TorusGrid::make(1, 4);

HamiltonianSpec broken_power(const TorusGrid& g) {
  // Sign-flipped b: H = |p|^2 + m, deliberately non-monotone. Built without
  // the range validation the factory functions run.
  HamiltonianSpec s;
  s.family = Family::Power;
  s.alpha = 2.0;
  s.beta = 1.0;
  s.a = ScalarField(g, 1.0);
  s.b = ScalarField(g, -1.0);
  return s;
}

}  // namespace

TEST_SUITE_BEGIN("hamiltonian");

TEST_CASE("eval_H family formulas") {
  SUBCASE("power, a=b=1, alpha=2, beta=1") {
    const HamiltonianSpec s = make_power(g4, 2.0, 1.0);
    CHECK(eval_H(s, 0, Vec{1.0, 0.0}, 1.0) == doctest::Approx(0.0));
    CHECK(eval_H(s, 0, Vec{2.0, 0.0}, 3.0) == doctest::Approx(1.0));
  }
  SUBCASE("congestion, tau=1") {
    const HamiltonianSpec s = make_congestion(g4, 2.0, 1.0, 1.0);
    // sigma = alpha(1 + tau/beta) = 4; |p|^4/m - m
    CHECK(eval_H(s, 0, Vec{1.0, 0.0}, 2.0) == doctest::Approx(-1.5));
  }
  SUBCASE("congestion monotone limit at m=0 is +inf off p=0") {
    const HamiltonianSpec s = make_congestion(g4, 2.0, 1.0, 1.0);
    CHECK(eval_H(s, 0, Vec{1.0, 0.0}, 0.0) ==
          std::numeric_limits<double>::infinity());
    CHECK(eval_H(s, 0, Vec{0.0, 0.0}, 0.0) == 0.0);
  }
  SUBCASE("power and weak extend finitely to m=0") {
    const HamiltonianSpec s = make_power(g4, 2.0, 1.0);
    CHECK(eval_H(s, 0, Vec{3.0, 0.0}, 0.0) == doctest::Approx(9.0));
    const HamiltonianSpec w = make_weak(g4, 2.0, 1.0, WeakKernel::ExpSquare);
    CHECK(eval_H(w, 0, Vec{1.0, 0.0}, 0.0) ==
          doctest::Approx(std::exp(1.0) - 1.0 + 1.0));
  }
  SUBCASE("non-finite p rejected") {
    const HamiltonianSpec s = make_power(g4, 2.0, 1.0);
    CHECK_THROWS_AS(eval_H(s, 0, Vec{std::nan(""), 0.0}, 1.0), std::invalid_argument);
  }
}

TEST_CASE("eval_DpH") {
  SUBCASE("power 2p") {
    const HamiltonianSpec s = make_power(g4, 2.0, 1.0);
    CHECK(eval_DpH(s, 0, Vec{3.0, 0.0}, 1.0)[0] == doctest::Approx(6.0));
    CHECK(eval_DpH(s, 0, Vec{3.0, 0.0}, 17.0)[0] == doctest::Approx(6.0));
  }
  SUBCASE("zero at p=0 for every family, including kinked powers") {
    for (double alpha : {1.5, 2.0, 3.0}) {
      const HamiltonianSpec s = make_power(g4, alpha, 1.0);
      const Vec d = eval_DpH(s, 0, Vec{0.0, 0.0}, 2.0);
      CHECK(d[0] == 0.0);
    }
  }
  SUBCASE("congestion 4|p|^2 p / m") {
    const HamiltonianSpec s = make_congestion(g4, 2.0, 1.0, 1.0);
    CHECK(eval_DpH(s, 0, Vec{1.0, 0.0}, 2.0)[0] == doctest::Approx(2.0));
  }
  SUBCASE("m <= 0 rejected") {
    const HamiltonianSpec s = make_power(g4, 2.0, 1.0);
    CHECK_THROWS_AS(eval_DpH(s, 0, Vec{1.0, 0.0}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(eval_DpH(s, 0, Vec{1.0, 0.0}, -1.0), std::invalid_argument);
  }
}

TEST_CASE("eval_mDpH extensions at m=0") {
  SUBCASE("power vanishes") {
    const HamiltonianSpec s = make_power(g4, 2.0, 1.0);
    for (double pv : {0.0, 1.0, -4.0}) {
      CHECK(eval_mDpH(s, 0, Vec{pv, 0.0}, 0.0)[0] == 0.0);
    }
  }
  SUBCASE("congestion tau=1 keeps the finite limit") {
    const HamiltonianSpec s = make_congestion(g4, 2.0, 1.0, 1.0);
    CHECK(eval_mDpH(s, 0, Vec{1.0, 0.0}, 0.0)[0] == doctest::Approx(4.0));
  }
  SUBCASE("congestion tau<1 vanishes") {
    const HamiltonianSpec s = make_congestion(g4, 2.0, 1.0, 0.5);
    CHECK(eval_mDpH(s, 0, Vec{1.0, 0.0}, 0.0)[0] == 0.0);
  }
  SUBCASE("continuity along m = 2^-k") {
    const HamiltonianSpec cg = make_congestion(g4, 2.0, 1.0, 1.0);
    const HamiltonianSpec ch = make_congestion(g4, 2.0, 1.0, 0.5);
    const HamiltonianSpec pw = make_power(g4, 1.5, 0.5);
    const Vec p{1.25, 0.0};
    for (const HamiltonianSpec* s : {&cg, &ch, &pw}) {
      const double limit = eval_mDpH(*s, 0, p, 0.0)[0];
      double prev_gap = std::numeric_limits<double>::infinity();
      for (int k = 4; k <= 40; k += 4) {
        const double m = std::ldexp(1.0, -k);
        const double gap = std::fabs(eval_mDpH(*s, 0, p, m)[0] - limit);
        CHECK(gap <= prev_gap + 1e-15);
        prev_gap = gap;
      }
      CHECK(prev_gap <= 1e-5);
    }
  }
}

TEST_CASE("exponent identities") {
  SUBCASE("hand values") {
    const ExponentSet e = ExponentSet::from(2.0, 1.0);
    CHECK(e.beta_bar == doctest::Approx(2.0));
    CHECK(e.gamma_bar == doctest::Approx(4.0));
  }
  SUBCASE("identities exact over random (alpha, beta)") {
    Rng rng(23);
    for (int i = 0; i < 50; ++i) {
      const double alpha = rng.uniform(1.01, 4.0);
      const double beta = rng.uniform(0.3, 3.0);
      const ExponentSet e = ExponentSet::from(alpha, beta);
      CHECK(std::fabs(1.0 / e.beta_bar + 1.0 / e.beta_bar_conj - 1.0) <= 1e-14);
      CHECK(std::fabs(e.gamma_bar - alpha * e.beta_bar_conj) <= 1e-14 * e.gamma_bar);
      // Hoelder split used by the flux integrability bound.
      const double lhs = 1.0 / e.gamma_bar_conj;
      const double rhs = 1.0 / e.beta_bar + (alpha - 1.0) / e.gamma_bar;
      CHECK(std::fabs(lhs - rhs) <= 1e-14);
    }
  }
}

TEST_CASE("monotonicity LHS hand values") {
  SUBCASE("power pair gives 4") {
    const HamiltonianSpec s = make_power(g4, 2.0, 1.0);
    const double lhs =
        monotonicity_lhs(s, 0, Vec{1.0, 0.0}, 1.0, Vec{0.0, 0.0}, 2.0);
    CHECK(lhs == doctest::Approx(4.0));
  }
  SUBCASE("weak exp kernel pair gives 3e+5") {
    const HamiltonianSpec s = make_weak(g4, 2.0, 1.0, WeakKernel::ExpSquare);
    const double lhs =
        monotonicity_lhs(s, 0, Vec{0.0, 0.0}, 1.0, Vec{1.0, 0.0}, 2.0);
    CHECK(lhs == doctest::Approx(3.0 * std::exp(1.0) + 5.0).epsilon(1e-10));
    CHECK(lhs == doctest::Approx(13.1548).epsilon(1e-4));
  }
  SUBCASE("sign-flipped b is detected") {
    const HamiltonianSpec s = broken_power(g4);
    const double lhs =
        monotonicity_lhs(s, 0, Vec{0.0, 0.0}, 1.0, Vec{0.0, 0.0}, 2.0);
    CHECK(lhs == doctest::Approx(-1.0));
    const MonotonicityReport rep = check_monotonicity(s, 1000, 0.0, 3);
    CHECK(rep.min_lhs < -1e-10);
  }
}

TEST_CASE("sampled monotonicity certificate for every built-in family") {
  const int samples = 10000;
  for (int dim : {1, 2}) {
    const TorusGrid g = TorusGrid::make(dim, 4);
    std::vector<HamiltonianSpec> specs;
    specs.push_back(make_power(g, 2.0, 1.0));
    specs.push_back(make_power(g, 1.5, 0.5));
    specs.push_back(make_congestion(g, 2.0, 1.0, 0.5));
    specs.push_back(make_congestion(g, 2.0, 1.0, 1.0));
    specs.push_back(make_weak(g, 2.0, 1.0, WeakKernel::ExpSquare));
    specs.push_back(make_weak(g, 3.0, 2.0, WeakKernel::CoshRadial));
    for (const auto& s : specs) {
      const double floor = s.family == Family::Congestion ? 1e-3 : 0.0;
      const MonotonicityReport rep = check_monotonicity(s, samples, floor, 42);
      CAPTURE(to_string(s.family));
      CHECK(rep.min_lhs >= -1e-10);
    }
  }
}

TEST_CASE("m-monotone and p-convex on sampled lines") {
  Rng rng(29);
  const HamiltonianSpec specs[] = {
      make_power(g4, 2.0, 1.0),
      make_congestion(g4, 2.0, 1.0, 0.5),
      make_weak(g4, 2.0, 1.0, WeakKernel::CoshRadial),
  };
  for (const auto& s : specs) {
    for (int trial = 0; trial < 200; ++trial) {
      const Vec p{rng.uniform(-5.0, 5.0), 0.0};
      const double m1 = rng.log_uniform(1e-2, 5.0);
      const double m2 = m1 * rng.uniform(1.0, 3.0);
      CHECK(eval_H(s, 0, p, m2) <= eval_H(s, 0, p, m1) + 1e-12);

      // convexity along a p-line at fixed m
      const Vec q{rng.uniform(-5.0, 5.0), 0.0};
      const Vec mid{0.5 * (p[0] + q[0]), 0.0};
      const double hm = eval_H(s, 0, mid, m1);
      CHECK(hm <= 0.5 * eval_H(s, 0, p, m1) + 0.5 * eval_H(s, 0, q, m1) + 1e-10);
    }
  }
}

TEST_CASE("growth certificate hand slacks, a=b=1 so C=1") {
  const HamiltonianSpec s = make_power(g4, 2.0, 1.0);

  SUBCASE("lagrangian lower at p=1, m=3 has slack 2") {
    const GrowthCertificate cert{GrowthInequality::LagrangianLower, 1.0};
    CHECK(growth_slack(s, cert, 0, Vec{1.0, 0.0}, 3.0) == doctest::Approx(2.0));
  }
  SUBCASE("upper bound slack is identically 1") {
    const GrowthCertificate cert{GrowthInequality::HUpper, 1.0};
    Rng rng(31);
    for (int i = 0; i < 100; ++i) {
      const Vec p{rng.uniform(-10.0, 10.0), 0.0};
      const double m = rng.log_uniform(1e-6, 10.0);
      CHECK(growth_slack(s, cert, 0, p, m) == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
  SUBCASE("coercive lower slack is identically 1") {
    const GrowthCertificate cert{GrowthInequality::HLower, 1.0};
    Rng rng(37);
    for (int i = 0; i < 100; ++i) {
      const Vec p{rng.uniform(-10.0, 10.0), 0.0};
      const double m = rng.log_uniform(1e-6, 10.0);
      CHECK(growth_slack(s, cert, 0, p, m) == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("default certificates keep sampled slacks nonnegative") {
  const TorusGrid g = TorusGrid::make(1, 8);
  std::vector<HamiltonianSpec> specs;
  specs.push_back(make_power(g, 2.0, 1.0));
  specs.push_back(make_power(g, 1.5, 2.0, 0.7, 2.5));
  specs.push_back(make_congestion(g, 2.0, 1.0, 1.0, 1.3, 0.6));
  specs.push_back(make_weak(g, 2.0, 1.0, WeakKernel::ExpSquare, 2.0, 0.5, 1.5));
  for (const auto& s : specs) {
    for (GrowthInequality id :
         {GrowthInequality::HUpperAtZero, GrowthInequality::DpHUpper,
          GrowthInequality::HLower, GrowthInequality::LagrangianLower,
          GrowthInequality::HUpper, GrowthInequality::LagrangianPair,
          GrowthInequality::HUpperCongestion}) {
      if (!growth_applicable(s.family, id)) continue;
      const GrowthCertificate cert = default_certificate(s, id);
      CHECK(cert.C >= 1.0);
      const GrowthReport rep = check_growth(s, cert, 5000, 99);
      CAPTURE(to_string(s.family));
      CAPTURE(to_string(id));
      CHECK(rep.worst_slack >= 0.0);
    }
  }
}

TEST_CASE("inequality/family mismatch is rejected") {
  const HamiltonianSpec s = make_weak(g4, 2.0, 1.0, WeakKernel::ExpSquare);
  const GrowthCertificate cert{GrowthInequality::HUpper, 1.0};
  CHECK_THROWS_AS(check_growth(s, cert, 10, 0), std::invalid_argument);
  CHECK_THROWS_AS(default_certificate(s, GrowthInequality::DpHUpper),
                  std::invalid_argument);
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(make_power(g4, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_power(g4, 2.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_congestion(g4, 2.0, 1.0, 1.5), std::invalid_argument);
  CHECK_NOTHROW(make_power(g4, 2.0, 1.0).validate_for_solve());
  CHECK_THROWS_AS(broken_power(g4).validate_for_solve(), std::invalid_argument);
}

TEST_SUITE_END();
