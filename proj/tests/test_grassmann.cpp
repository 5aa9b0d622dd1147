#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sigma/grassmann.hpp"
#include "sigma/rng.hpp"

using namespace sigma;

namespace {

GrassmannElement random_even(int k, CounterRng& rng) {
  GrassmannElement e(k);
  for (std::uint32_t m = 0; m < (std::uint32_t{1} << k); ++m)
    if (!(__builtin_popcount(m) & 1)) e.coeff(m) = 2.0 * rng.uniform() - 1.0;
  return e;
}

GrassmannElement random_any(int k, CounterRng& rng) {
  GrassmannElement e(k);
  for (std::uint32_t m = 0; m < (std::uint32_t{1} << k); ++m)
    e.coeff(m) = 2.0 * rng.uniform() - 1.0;
  return e;
}

GrassmannElement random_parity(int k, int parity, CounterRng& rng) {
  GrassmannElement e(k);
  for (std::uint32_t m = 0; m < (std::uint32_t{1} << k); ++m)
    if ((__builtin_popcount(m) & 1) == parity) e.coeff(m) = 2.0 * rng.uniform() - 1.0;
  return e;
}

}  // namespace

TEST_CASE("generators anticommute and square to zero") {
  const int k = 6;
  for (int i = 0; i < k; ++i) {
    GrassmannElement ci = GrassmannElement::generator(k, i);
    CHECK((ci * ci).is_zero());
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      GrassmannElement cj = GrassmannElement::generator(k, j);
      CHECK((ci * cj + cj * ci).is_zero());
    }
  }
}

TEST_CASE("algebra axioms at random elements") {
  const int k = 6;
  CounterRng rng(21);
  for (int t = 0; t < 50; ++t) {
    GrassmannElement a = random_any(k, rng), b = random_any(k, rng), c = random_any(k, rng);
    CHECK(((a * b) * c - a * (b * c)).max_abs_coeff() < 1e-12);
    CHECK((a * (b + c) - a * b - a * c).max_abs_coeff() < 1e-12);
    // even elements are central
    GrassmannElement e = random_even(k, rng);
    CHECK((e * a - a * e).max_abs_coeff() < 1e-12);
  }
}

TEST_CASE("graded commutativity of homogeneous elements") {
  const int k = 6;
  CounterRng rng(22);
  for (int t = 0; t < 30; ++t) {
    GrassmannElement o1 = random_parity(k, 1, rng), o2 = random_parity(k, 1, rng);
    CHECK((o1 * o2 + o2 * o1).max_abs_coeff() < 1e-12);  // odd * odd anticommutes
    CHECK(o1.is_odd());
    CHECK((o1 * o2).is_even());
  }
}

TEST_CASE("left derivative") {
  const int k = 4;
  GrassmannElement x0 = GrassmannElement::generator(k, 0);
  GrassmannElement x1 = GrassmannElement::generator(k, 1);
  CHECK(x0.derivative(0).body() == 1.0);
  CHECK(x0.derivative(1).is_zero());

  // d_0 (x0 x1) = x1, d_1 (x0 x1) = -x0 (x1 must pass x0)
  GrassmannElement m = x0 * x1;
  CHECK((m.derivative(0) - x1).is_zero());
  CHECK((m.derivative(1) + x0).is_zero());

  // derivatives anticommute
  CounterRng rng(23);
  for (int t = 0; t < 20; ++t) {
    GrassmannElement a = random_any(k, rng);
    CHECK((a.derivative(0).derivative(1) + a.derivative(1).derivative(0)).max_abs_coeff() < 1e-12);
    CHECK(a.derivative(2).derivative(2).is_zero());
  }
}

TEST_CASE("derivative satisfies the graded Leibniz rule") {
  const int k = 6;
  CounterRng rng(24);
  for (int t = 0; t < 30; ++t) {
    for (int parity = 0; parity <= 1; ++parity) {
      GrassmannElement a = random_parity(k, parity, rng);
      GrassmannElement b = random_any(k, rng);
      for (int i = 0; i < k; ++i) {
        GrassmannElement lhs = (a * b).derivative(i);
        GrassmannElement rhs = a.derivative(i) * b +
                               (parity ? -1.0 : 1.0) * (a * b.derivative(i));
        CHECK((lhs - rhs).max_abs_coeff() < 1e-12);
      }
    }
  }
}

TEST_CASE("top derivative sign convention") {
  // d_xi d_eta (c xi eta) = -c with left derivatives, xi = gen 0, eta = gen 1
  const int k = 2;
  GrassmannElement xi = GrassmannElement::generator(k, 0);
  GrassmannElement eta = GrassmannElement::generator(k, 1);
  GrassmannElement m = (xi * eta) * 3.0;
  CHECK(m.derivative(1).derivative(0).body() == Catch::Approx(-3.0));
}

TEST_CASE("parity queries") {
  const int k = 4;
  CounterRng rng(25);
  GrassmannElement e = random_even(k, rng);
  CHECK(e.is_even());
  CHECK(!e.nilpotent_part().is_odd());
  CHECK(e.nilpotent_part().body() == 0.0);
  CHECK(GrassmannElement::generator(k, 2).is_odd());
}

TEST_CASE("function lifts") {
  const int k = 6;
  CounterRng rng(26);
  for (int t = 0; t < 25; ++t) {
    GrassmannElement a = random_even(k, rng);
    a.coeff(0) = 1.5 + rng.uniform();  // positive body for sqrt/log/reciprocal

    GrassmannElement s = lift_sqrt(a);
    CHECK((s * s - a).max_abs_coeff() < 1e-12);

    GrassmannElement r = lift_reciprocal(a);
    CHECK((r * a - GrassmannElement::constant(k, 1.0)).max_abs_coeff() < 1e-12);

    GrassmannElement l = lift_log(a);
    CHECK((lift_exp(l) - a).max_abs_coeff() < 1e-11);

    // cosh^2 - sinh^2 = 1
    GrassmannElement ch = lift_cosh(a), sh = lift_sinh(a);
    CHECK((ch * ch - sh * sh - GrassmannElement::constant(k, 1.0)).max_abs_coeff() < 1e-11);

    // exp is a homomorphism on (commuting) even elements
    GrassmannElement b = random_even(k, rng);
    CHECK((lift_exp(a + b) - lift_exp(a) * lift_exp(b)).max_abs_coeff() < 1e-10);
  }
}

TEST_CASE("lift of a purely nilpotent exponent truncates exactly") {
  const int k = 2;
  GrassmannElement n = GrassmannElement::generator(k, 0) * GrassmannElement::generator(k, 1);
  GrassmannElement e = lift_exp(n * 2.0);
  // exp(2 xi eta) = 1 + 2 xi eta
  CHECK(e.body() == Catch::Approx(1.0));
  CHECK(e.coeff(0b11) == Catch::Approx(2.0));
}

TEST_CASE("domain guards") {
  const int k = 2;
  GrassmannElement neg = GrassmannElement::constant(k, -1.0);
  CHECK_THROWS_AS(lift_sqrt(neg), std::domain_error);
  CHECK_THROWS_AS(lift_log(neg), std::domain_error);
  CHECK_THROWS_AS(lift_reciprocal(GrassmannElement(k)), std::domain_error);
  CHECK_THROWS_AS(lift_exp(GrassmannElement::generator(k, 0)), std::domain_error);
  CHECK_THROWS_AS(GrassmannElement(kMaxGenerators + 1), std::invalid_argument);
  CHECK_THROWS_AS(GrassmannElement::generator(2, 2), std::invalid_argument);
}
