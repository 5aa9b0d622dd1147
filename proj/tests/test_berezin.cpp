#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sigma/berezin.hpp"
#include "sigma/rng.hpp"

using namespace sigma;

namespace {

ModelSpec one_site(double eps) {
  ModelSpec spec;
  spec.tree_height = 0;
  spec.vertices = {root()};
  spec.W = {0.0};
  spec.h = {eps};
  return spec;
}

ModelSpec two_site(double w, double h0, double h1) {
  ModelSpec spec;
  spec.tree_height = 1;
  spec.vertices = {make_word(0, 1), make_word(1, 1)};
  spec.W = {0.0, w, w, 0.0};
  spec.h = {h0, h1};
  return spec;
}

}  // namespace

TEST_CASE("constrained site satisfies the constraint") {
  SuperVector v = constrained_site(1, 0, 0.7, -1.2);
  GrassmannElement vv = super_inner_product(v, v);
  CHECK((vv + GrassmannElement::constant(2, 1.0)).max_abs_coeff() < 1e-12);
}

TEST_CASE("action combo matches the scalar action") {
  CounterRng rng(41);
  ModelSpec spec = two_site(0.8, 1.3, 0.4);
  for (int t = 0; t < 30; ++t) {
    std::vector<double> xy{4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0,
                           4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0};
    std::vector<SuperVector> vs;
    for (int j = 0; j < 2; ++j) vs.push_back(constrained_site(2, j, xy[2 * j], xy[2 * j + 1]));
    double body = eval_inner_combo(action_combo(spec), vs).body();
    CHECK(body == Catch::Approx(action_body(spec, xy)).margin(1e-10));
  }
}

TEST_CASE("single site normalization is exact") {
  for (double eps : {0.3, 1.0, 5.0}) {
    double v = berezin_superintegral(one_site(eps));
    CHECK(std::abs(v - 1.0) < 1e-8);
  }
}

TEST_CASE("single site super Laplace transform matches the closed form") {
  // x + z = e^u on the supermanifold, so the tilt (b, 0, -b) computes
  // E[exp(b e^u)] = exp(eps - sqrt(eps^2 - 2 eps b))
  for (double eps : {0.5, 2.0}) {
    for (double b : {-0.5, -2.0}) {
      double predicted = std::exp(eps - std::sqrt(eps * eps - 2.0 * eps * b));
      double v = berezin_superintegral(one_site(eps), exponential_tilt({{b, 0.0, -b}}));
      CHECK(v == Catch::Approx(predicted).epsilon(1e-7));
    }
  }
}

TEST_CASE("horospherical density oracle matches the model density, one site") {
  CounterRng rng(42);
  ModelSpec spec = one_site(1.0);
  for (int t = 0; t < 25; ++t) {
    FieldConfig cfg;
    cfg.u = {3.0 * rng.uniform() - 1.5};
    cfg.s = {3.0 * rng.uniform() - 1.5};
    double oracle = horospherical_density_oracle(spec, cfg);
    double direct = std::exp(log_density(spec, cfg));
    CHECK(oracle == Catch::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("horospherical density oracle matches the model density, two sites") {
  CounterRng rng(43);
  ModelSpec spec = two_site(0.7, 1.0, 0.0);
  for (int t = 0; t < 10; ++t) {
    FieldConfig cfg;
    cfg.u = {2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
    cfg.s = {2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
    double oracle = horospherical_density_oracle(spec, cfg);
    double direct = std::exp(log_density(spec, cfg));
    CHECK(oracle == Catch::Approx(direct).epsilon(1e-11));
  }
}

TEST_CASE("density oracle detects corrupted weights") {
  ModelSpec spec = two_site(0.7, 1.0, 0.0);
  ModelSpec corrupted = two_site(1.4, 1.0, 0.0);
  FieldConfig cfg;
  cfg.u = {0.4, -0.3};
  cfg.s = {0.2, 0.9};
  double oracle = horospherical_density_oracle(spec, cfg);
  double wrong = std::exp(log_density(corrupted, cfg));
  CHECK(std::abs(oracle - wrong) / oracle > 1e-3);
}

TEST_CASE("Ward identity residuals vanish") {
  ModelSpec spec = one_site(1.0);
  for (auto [i, j] : {std::pair{1, 2}, {1, 5}, {3, 4}}) {
    CHECK(std::abs(ward_residual(spec, i, j)) < 1e-7);
  }
}

TEST_CASE("oracle refuses more than two sites") {
  ModelSpec spec;
  spec.tree_height = 2;
  spec.vertices = block_leaves(root(), 2);
  spec.W.assign(16, 0.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j) spec.W[i * 4 + j] = 1.0;
  spec.h.assign(4, 1.0);
  CHECK_THROWS_AS(berezin_superintegral(spec), std::domain_error);
}
