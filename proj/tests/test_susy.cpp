#include <catch2/catch_amalgamated.hpp>

#include "sigma/rng.hpp"
#include "sigma/susy.hpp"
#include "sigma/susy_check.hpp"

using namespace sigma;

TEST_CASE("inner product basics") {
  const int k = 4;
  SuperVector o = origin_point(k);
  CHECK(super_inner_product(o, o).body() == Catch::Approx(-1.0));
  CHECK(super_inner_product(o, o).nilpotent_part().is_zero());

  SuperVector a = make_even_vector(k, 1.0, 2.0, 3.0);
  SuperVector b = make_even_vector(k, -1.0, 0.5, 2.0);
  CHECK(super_inner_product(a, b).body() == Catch::Approx(1.0 * -1.0 + 2.0 * 0.5 - 3.0 * 2.0));
}

TEST_CASE("inner product is supersymmetric") {
  CounterRng rng(31);
  for (int t = 0; t < 50; ++t) {
    SuperVector v = random_supervector(4, rng), w = random_supervector(4, rng);
    CHECK((super_inner_product(v, w) - super_inner_product(w, v)).max_abs_coeff() < 1e-12);
  }
}

TEST_CASE("horospherical points lie on the supermanifold") {
  const int k = 2;
  CounterRng rng(32);
  for (int t = 0; t < 50; ++t) {
    double u = 4.0 * rng.uniform() - 2.0;
    double s = 4.0 * rng.uniform() - 2.0;
    GrassmannElement psibar = GrassmannElement::generator(k, 0) * (2.0 * rng.uniform() - 1.0);
    GrassmannElement psi = GrassmannElement::generator(k, 1) * (2.0 * rng.uniform() - 1.0);
    SuperVector v = horospherical_to_cartesian(GrassmannElement::constant(k, u),
                                               GrassmannElement::constant(k, s), psibar, psi);
    GrassmannElement vv = super_inner_product(v, v);
    CHECK((vv + GrassmannElement::constant(k, 1.0)).max_abs_coeff() < 1e-12);
    // x + z = e^u exactly: the nilpotent corrections cancel
    GrassmannElement xz = v.x + v.z;
    CHECK(xz.body() == Catch::Approx(std::exp(u)));
    CHECK(xz.nilpotent_part().max_abs_coeff() < 1e-14);
  }
}

TEST_CASE("horospherical parity guards") {
  const int k = 2;
  GrassmannElement even = GrassmannElement::constant(k, 1.0);
  GrassmannElement odd = GrassmannElement::generator(k, 0);
  CHECK_THROWS_AS(horospherical_to_cartesian(odd, even, odd, odd), std::domain_error);
  CHECK_THROWS_AS(horospherical_to_cartesian(even, even, even, odd), std::domain_error);
}

TEST_CASE("inner combo partials are exact") {
  CounterRng rng(33);
  const int k = 4;
  for (int t = 0; t < 20; ++t) {
    std::vector<SuperVector> vs{random_supervector(k, rng), random_supervector(k, rng)};
    InnerCombo combo;
    combo.terms.push_back({0.7, 0, 1});
    combo.terms.push_back({-0.3, 0, -1});
    // bump an even component and compare against the analytic partial
    double h = 1e-6;
    GrassmannElement before = eval_inner_combo(combo, vs);
    std::vector<SuperVector> bumped = vs;
    bumped[0].x += GrassmannElement::constant(k, h);
    GrassmannElement diff = (eval_inner_combo(combo, bumped) - before) * (1.0 / h);
    GrassmannElement partial = inner_combo_partial(combo, vs, 0, 1);
    CHECK((diff - partial).max_abs_coeff() < 1e-6);
  }
}

TEST_CASE("symmetry operators annihilate the pairing") {
  auto res = susy_residual_battery(77, 100);
  CHECK(res.annihilation_l < 1e-12);
  CHECK(res.annihilation_q < 1e-12);
  CHECK(res.chain_rule < 1e-12);
}

TEST_CASE("residual battery detects a corrupted operator") {
  // the annihilation identity is sign-sensitive: flipping the relative
  // sign inside L_ij must leave a visible residual
  CounterRng rng(34);
  const int k = 4;
  std::vector<SuperVector> vs{random_supervector(k, rng), random_supervector(k, rng)};
  InnerCombo pairing;
  pairing.terms.push_back({1.0, 0, 1});
  double worst = 0;
  for (int i = 1; i <= 5; ++i) {
    for (int j = 1; j <= 5; ++j) {
      if (i == j) continue;
      GrassmannElement sum(k);
      for (int l = 0; l < 2; ++l) {
        const SuperVector& v = vs[l];
        GrassmannElement di = inner_combo_partial(pairing, vs, l, i);
        GrassmannElement dj = inner_combo_partial(pairing, vs, l, j);
        sum += metric_contraction(v, j) * di +
               susy_sign(i, j) * metric_contraction(v, i) * dj;  // wrong sign
      }
      worst = std::max(worst, sum.max_abs_coeff());
    }
  }
  CHECK(worst > 1e-3);
}

TEST_CASE("single operator does not annihilate the pairing") {
  // L_12 acting on one slot only is a genuine rotation generator; it
  // vanishes only after summing both slots
  CounterRng rng(35);
  const int k = 4;
  std::vector<SuperVector> vs{random_supervector(k, rng), random_supervector(k, rng)};
  InnerCombo pairing;
  pairing.terms.push_back({1.0, 0, 1});
  CHECK(susy_L(1, 2, pairing, vs, 0).max_abs_coeff() > 1e-3);
}

TEST_CASE("operator index guards") {
  CounterRng rng(36);
  std::vector<SuperVector> vs{random_supervector(4, rng)};
  InnerCombo combo;
  combo.terms.push_back({1.0, 0, -1});
  CHECK_THROWS_AS(susy_L(0, 2, combo, vs, 0), std::invalid_argument);
  CHECK_THROWS_AS(susy_L(1, 6, combo, vs, 0), std::invalid_argument);
}
