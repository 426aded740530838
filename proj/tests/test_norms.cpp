#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "mo/norms.hpp"
#include "mo/rng.hpp"
#include "mo/variable_lebesgue.hpp"
#include "oracles.hpp"

using mo::AtomicMeasureSpace;
using mo::SimpleFunction;
using mo::YoungFunction;

TEST_CASE("modular") {
  SECTION("single atom of mass one") {
    const auto space = AtomicMeasureSpace::uniform(1);
    const auto phi = YoungFunction::power(1, 2.0);
    REQUIRE(mo::modular(phi, space, SimpleFunction{1.0}, 1.0).value() == 1.0);
    REQUIRE_THROWS_AS(mo::modular(phi, space, SimpleFunction{1.0}, 0.0), std::domain_error);
  }

  SECTION("hand quadrature over two atoms") {
    const auto space = AtomicMeasureSpace({"a", "b"}, {0.5, 0.5});
    const auto phi = YoungFunction::power(2, 2.0);
    REQUIRE(mo::modular(phi, space, SimpleFunction{1.0, 2.0}, 1.0).value() ==
            Catch::Approx(2.5).epsilon(1e-15));
  }

  SECTION("vanishes monotonically as lambda grows") {
    const auto space = AtomicMeasureSpace::uniform(3);
    const auto phi = YoungFunction::variable_exponent({1.5, 2.0, 3.0});
    const SimpleFunction f{2.0, -1.0, 3.0};
    double prev = std::numeric_limits<double>::infinity();
    for (double lambda : {1.0, 10.0, 100.0}) {
      const double cur = mo::modular(phi, space, f, lambda).value();
      REQUIRE(cur <= prev);
      prev = cur;
    }
    REQUIRE(prev <= 1e-3);
  }

  SECTION("infinity absorbs") {
    const auto psi1 = YoungFunction::holder_conjugate_power({1.0, 2.0});
    const auto space = AtomicMeasureSpace::uniform(2);
    REQUIRE(!mo::modular(psi1, space, SimpleFunction{3.0, 1.0}, 1.0).is_finite());
  }
}

TEST_CASE("luxemburg norm") {
  SECTION("indicator of an atom set of mass 1/4 under x^2") {
    const auto space = AtomicMeasureSpace::uniform(4);  // weights 0.25 each
    const auto phi = YoungFunction::power(4, 2.0);
    const SimpleFunction f{1.0, 0.0, 0.0, 0.0};
    // analytic: (1/lambda)^2 * 0.25 <= 1  iff  lambda >= 0.5
    const mo::NormResult r = mo::luxemburg_norm(phi, space, f);
    REQUIRE(r.converged);
    REQUIRE(r.value == Catch::Approx(0.5).epsilon(1e-11));
    REQUIRE(r.residual <= mo::kLuxemburgTol);
    REQUIRE(mo::modular(phi, space, f, r.value).value() <= 1.0 + 1e-9);
  }

  SECTION("zero function") {
    const auto space = AtomicMeasureSpace::uniform(2);
    const auto phi = YoungFunction::power(2, 2.0);
    REQUIRE(mo::luxemburg_norm(phi, space, SimpleFunction(2)).value == 0.0);
  }

  SECTION("homogeneity") {
    mo::Rng rng(7);
    const auto space = AtomicMeasureSpace::uniform(3);
    for (int i = 0; i < 50; ++i) {
      const auto phi = oracle::random_family(rng, 3);
      const SimpleFunction f = oracle::random_function(rng, 3);
      if (f.is_zero()) continue;
      const double c = rng.uniform(0.1, 5.0);
      const double lhs = mo::luxemburg_norm(phi, space, c * f).value;
      const double rhs = c * mo::luxemburg_norm(phi, space, f).value;
      REQUIRE(lhs == Catch::Approx(rhs).epsilon(1e-10));
    }
  }

  SECTION("the modular at the norm is admissible") {
    mo::Rng rng(8);
    const auto space = AtomicMeasureSpace::uniform(4);
    for (int i = 0; i < 50; ++i) {
      const auto phi = oracle::random_family(rng, 4);
      const SimpleFunction f = oracle::random_function(rng, 4);
      if (f.is_zero()) continue;
      const mo::NormResult r = mo::luxemburg_norm(phi, space, f);
      REQUIRE(r.converged);
      REQUIRE(mo::modular(phi, space, f, r.value).value_or(2.0) <= 1.0 + 1e-9);
    }
  }

  SECTION("triangle inequality") {
    mo::Rng rng(9);
    const auto space = AtomicMeasureSpace::uniform(3);
    for (int i = 0; i < 1000; ++i) {
      const auto phi = oracle::random_family(rng, 3);
      const SimpleFunction f = oracle::random_function(rng, 3);
      const SimpleFunction g = oracle::random_function(rng, 3);
      const double nf = mo::luxemburg_norm(phi, space, f).value;
      const double ng = mo::luxemburg_norm(phi, space, g).value;
      const double nfg = mo::luxemburg_norm(phi, space, f + g).value;
      REQUIRE(nfg <= nf + ng + 1e-9);
    }
  }

  SECTION("constant exponent reduces to the classical L^p norm") {
    mo::Rng rng(10);
    for (int i = 0; i < 100; ++i) {
      const std::size_t n = 1 + std::size_t(rng.integer(5));
      std::vector<double> w(n);
      for (double& x : w) x = rng.uniform(0.1, 2.0);
      std::vector<std::string> ids(n);
      for (std::size_t t = 0; t < n; ++t) ids[t] = "a" + std::to_string(t);
      const AtomicMeasureSpace space(ids, w);
      const double p = rng.uniform(1.2, 4.0);
      const SimpleFunction f = oracle::random_function(rng, n);
      if (f.is_zero()) continue;
      double classical = 0.0;
      for (std::size_t t = 0; t < n; ++t)
        classical += std::pow(std::fabs(f[t]), p) * space.weights[t];
      classical = std::pow(classical, 1.0 / p);
      const double got = mo::luxemburg_norm(YoungFunction::power(n, p), space, f).value;
      REQUIRE(got == Catch::Approx(classical).epsilon(1e-10));
    }
  }
}

TEST_CASE("amemiya norm") {
  const auto space = AtomicMeasureSpace::uniform(2);
  const auto phi = YoungFunction::power(2, 2.0);

  SECTION("unit-L^2 function attains value 2 at lambda = 1") {
    // sum f^2 mu = 1: objective (1 + lambda^2)/lambda, minimized at lambda=1.
    const SimpleFunction f{1.0, 1.0};
    REQUIRE(mo::modular(phi, space, f, 1.0).value() == Catch::Approx(1.0));
    const mo::NormResult r = mo::amemiya_norm(phi, space, f);
    REQUIRE(r.converged);
    REQUIRE(r.value == Catch::Approx(2.0).epsilon(1e-10));
    // the final bracket hugs the minimizer lambda = 1 (the objective is flat
    // to machine precision there, so straddling is not guaranteed)
    REQUIRE(r.bracket_lo == Catch::Approx(1.0).epsilon(1e-7));
    REQUIRE(r.bracket_hi == Catch::Approx(1.0).epsilon(1e-7));
  }

  SECTION("zero function") {
    REQUIRE(mo::amemiya_norm(phi, space, SimpleFunction(2)).value == 0.0);
  }

  SECTION("homogeneity") {
    mo::Rng rng(12);
    for (int i = 0; i < 50; ++i) {
      const auto fam = oracle::random_family(rng, 2);
      const SimpleFunction f = oracle::random_function(rng, 2);
      if (f.is_zero()) continue;
      const double c = rng.uniform(0.2, 4.0);
      const double lhs = mo::amemiya_norm(fam, space, c * f).value;
      const double rhs = c * mo::amemiya_norm(fam, space, f).value;
      REQUIRE(lhs == Catch::Approx(rhs).epsilon(1e-10));
    }
  }

  SECTION("sampled objective is unimodal for the built-in families") {
    mo::Rng rng(13);
    for (int rep = 0; rep < 30; ++rep) {
      const auto fam = oracle::random_family(rng, 2);
      const SimpleFunction f = oracle::random_function(rng, 2);
      if (f.is_zero()) continue;
      auto objective = [&](double lambda) -> double {
        mo::ExtReal acc(1.0);
        for (std::size_t t = 0; t < 2; ++t)
          acc += space.weights[t] * fam.value(t, lambda * std::fabs(f[t]));
        return acc.value_or(std::numeric_limits<double>::infinity()) / lambda;
      };
      bool seen_increase = false;
      int violations = 0;
      double prev = objective(std::pow(10.0, -6.0));
      for (int i = 1; i <= 240; ++i) {
        const double cur = objective(std::pow(10.0, -6.0 + 12.0 * double(i) / 240.0));
        if (std::isinf(prev) || std::isinf(cur)) {
          prev = cur;
          continue;
        }
        const double tol = 1e-12 * (std::fabs(prev) + std::fabs(cur));
        if (cur > prev + tol) seen_increase = true;
        if (cur < prev - tol && seen_increase) ++violations;
        prev = cur;
      }
      REQUIRE(violations == 0);
    }
  }
}

TEST_CASE("norm equivalence (the factor-2 sandwich)") {
  const auto space = AtomicMeasureSpace::uniform(2);
  const auto phi = YoungFunction::power(2, 2.0);

  SECTION("unit-L^2 attains the upper constant") {
    const SimpleFunction f{1.0, 1.0};
    REQUIRE(mo::check_equivalence(phi, space, f) == Catch::Approx(2.0).epsilon(1e-9));
  }

  SECTION("an indicator with Luxemburg norm one") {
    const auto space4 = AtomicMeasureSpace::uniform(4);
    const auto phi4 = YoungFunction::power(4, 2.0);
    SimpleFunction f{1.0, 0.0, 0.0, 0.0};
    const double lux = mo::luxemburg_norm(phi4, space4, f).value;
    f *= 1.0 / lux;
    const double ratio = mo::check_equivalence(phi4, space4, f);
    REQUIRE(ratio >= 1.0 - 1e-9);
    REQUIRE(ratio <= 2.0 + 1e-9);
  }

  SECTION("random families stay inside [1, 2]") {
    mo::Rng rng(14);
    const auto space3 = AtomicMeasureSpace::uniform(3);
    for (int i = 0; i < 200; ++i) {
      const auto fam = oracle::random_family(rng, 3);
      const SimpleFunction f = oracle::random_function(rng, 3);
      if (f.is_zero()) continue;
      const double ratio = mo::check_equivalence(fam, space3, f);
      REQUIRE(ratio >= 1.0 - 1e-9);
      REQUIRE(ratio <= 2.0 + 1e-9);
    }
  }

  SECTION("zero function is rejected") {
    REQUIRE_THROWS_AS(mo::check_equivalence(phi, space, SimpleFunction(2)), std::domain_error);
  }
}

TEST_CASE("variable lebesgue specialization") {
  SECTION("constant p = 2 is the classical L^2 space") {
    const auto space = AtomicMeasureSpace({"a", "b", "c"}, {0.2, 0.3, 0.5});
    const auto vl = mo::variable_lebesgue(space, {2.0, 2.0, 2.0});
    const SimpleFunction f{1.0, -2.0, 0.5};
    double l2 = 0.0;
    for (std::size_t t = 0; t < 3; ++t) l2 += f[t] * f[t] * space.weights[t];
    l2 = std::sqrt(l2);
    REQUIRE(mo::luxemburg_norm(vl.phi, space, f).value == Catch::Approx(l2).epsilon(1e-10));
    REQUIRE(vl.p_plus == 2.0);
    REQUIRE(vl.p_minus == 2.0);
  }

  SECTION("exponent range bookkeeping") {
    const auto space = AtomicMeasureSpace::uniform(2);
    const auto vl = mo::variable_lebesgue(space, {1.5, 3.0});
    REQUIRE(vl.p_plus == 3.0);
    REQUIRE(vl.p_minus == 1.5);
  }

  SECTION("p = 1 atoms get the indicator branch in the named conjugate") {
    const auto space = AtomicMeasureSpace::uniform(2);
    const auto vl = mo::variable_lebesgue(space, {1.0, 2.0});
    REQUIRE(vl.psi_holder.value(0, 0.5).value() == 0.0);
    REQUIRE(!vl.psi_holder.value(0, 2.0).is_finite());
  }

  SECTION("exponents below one are rejected") {
    const auto space = AtomicMeasureSpace::uniform(1);
    REQUIRE_THROWS_AS(mo::variable_lebesgue(space, {0.8}), std::domain_error);
  }

  SECTION("exact and named conjugates agree up to the constant c_p") {
    const auto space = AtomicMeasureSpace::uniform(1);
    const auto vl = mo::variable_lebesgue(space, {2.0});
    // Psi_exact = x^2/4, Psi_paper = x^2.
    REQUIRE(vl.psi_exact.value(0, 2.0).value() == Catch::Approx(1.0).epsilon(1e-8));
    REQUIRE(vl.psi_holder.value(0, 2.0).value() == 4.0);
  }
}
