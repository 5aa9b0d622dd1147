#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "sigma/rng.hpp"
#include "sigma/stats.hpp"

using namespace sigma;

namespace {

std::vector<std::vector<double>> normal_chains(int m, int n, double shift, std::uint64_t seed) {
  std::vector<std::vector<double>> chains(m);
  for (int c = 0; c < m; ++c) {
    CounterRng rng(seed, c);
    chains[c].reserve(n);
    for (int i = 0; i < n; ++i) chains[c].push_back(rng.normal() + shift);
  }
  return chains;
}

// the documented algorithm, written out independently of CounterRng
std::uint64_t doc_mix(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

}  // namespace

TEST_CASE("counter rng follows its documented algorithm") {
  const std::uint64_t seed = 987654321, stream = 7;
  CounterRng rng(seed, stream);
  std::uint64_t key = doc_mix(seed ^ doc_mix(stream + 1));
  for (std::uint64_t i = 1; i <= 10; ++i)
    CHECK(rng.next_u64() == doc_mix(key + i * 0x9E3779B97F4A7C15ull));
}

TEST_CASE("counter rng streams are deterministic and distinct") {
  CounterRng a(42, 0), b(42, 0), c(42, 1);
  bool same = true, differ = false;
  for (int i = 0; i < 100; ++i) {
    std::uint64_t va = a.next_u64();
    same = same && (va == b.next_u64());
    differ = differ || (va != c.next_u64());
  }
  CHECK(same);
  CHECK(differ);
}

TEST_CASE("uniform and normal moments") {
  CounterRng rng(43);
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0;
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    su += u;
    double z = rng.normal();
    sn += z;
    sn2 += z * z;
  }
  CHECK(su / n == Catch::Approx(0.5).margin(0.005));
  CHECK(sn / n == Catch::Approx(0.0).margin(0.01));
  CHECK(sn2 / n == Catch::Approx(1.0).margin(0.02));
}

TEST_CASE("normal cdf and erfcx") {
  CHECK(normal_cdf(0.0) == Catch::Approx(0.5));
  CHECK(normal_cdf(1.96) == Catch::Approx(0.9750021049).epsilon(1e-8));
  CHECK(normal_cdf(-1.96) == Catch::Approx(0.0249978951).epsilon(1e-8));
  CHECK(erfcx(0.0) == Catch::Approx(1.0));
  // high-precision references on both sides of the branch switch at x = 12
  CHECK(erfcx(11.999) == Catch::Approx(0.046858099197526282).epsilon(1e-11));
  CHECK(erfcx(12.001) == Catch::Approx(0.046850343471997564).epsilon(1e-11));
  CHECK(erfcx(50.0) == Catch::Approx(1.0 / (50.0 * std::sqrt(M_PI))).epsilon(1e-3));
}

TEST_CASE("two-sample ks distance by hand") {
  // F_a jumps by 1/3 at {.1,.2,.3}, F_b by 1/4 at {.15,.25,.35,.45};
  // the largest gap is 1/2, attained just after 0.3
  std::vector<double> a{0.3, 0.1, 0.2};
  std::vector<double> b{0.45, 0.15, 0.35, 0.25};
  CHECK(ks_two_sample(a, b) == Catch::Approx(0.5));
  CHECK(ks_two_sample(b, a) == Catch::Approx(0.5));
  CHECK(ks_two_sample(a, a) == Catch::Approx(0.0));
  CHECK_THROWS_AS(ks_two_sample({}, b), std::invalid_argument);
}

TEST_CASE("one-sample ks distance by hand") {
  auto ident = [](double x) { return x; };
  CHECK(ks_one_sample({0.5}, ident) == Catch::Approx(0.5));
  CHECK(ks_one_sample({0.25, 0.75}, ident) == Catch::Approx(0.25));
  CHECK(ks_critical(0.05, 100.0) ==
        Catch::Approx(std::sqrt(-0.5 * std::log(0.025)) / 10.0));
  CHECK(ks_critical_two(0.05, 100.0, 100.0) ==
        Catch::Approx(std::sqrt(2.0) * ks_critical(0.05, 100.0)));
}

TEST_CASE("autocorrelation time of white noise is about one") {
  CounterRng rng(44);
  std::vector<double> x(20000);
  for (double& v : x) v = rng.normal();
  CHECK(autocorr_time(x) == Catch::Approx(1.0).margin(0.15));
  CHECK(ess_of_chain(x) > 0.85 * x.size());
}

TEST_CASE("autocorrelation time of an AR(1) chain") {
  // tau = (1+rho)/(1-rho) for AR(1)
  const double rho = 0.7;
  CounterRng rng(45);
  std::vector<double> x(200000);
  double state = 0;
  for (double& v : x) {
    state = rho * state + std::sqrt(1.0 - rho * rho) * rng.normal();
    v = state;
  }
  double tau = autocorr_time(x);
  CHECK(tau == Catch::Approx((1.0 + rho) / (1.0 - rho)).epsilon(0.2));
  CHECK(ess_of_chain(x) == Catch::Approx(x.size() / tau));
}

TEST_CASE("split rhat near one for matching chains, large for shifted") {
  auto chains = normal_chains(4, 4000, 0.0, 46);
  CHECK(split_rhat(chains) == Catch::Approx(1.0).margin(0.02));
  chains[0] = normal_chains(1, 4000, 2.0, 47)[0];
  CHECK(split_rhat(chains) > 1.2);
  CHECK(std::isnan(split_rhat({{1.0, 2.0}})));
}

TEST_CASE("wilson upper bound") {
  // textbook 95% interval for 10 successes out of 100: (0.0552, 0.1744)
  CHECK(wilson_upper(10.0, 100.0, 1.96) == Catch::Approx(0.1744).margin(5e-4));
  CHECK(wilson_upper(0.0, 50.0, 2.0) > 0.0);      // zero counts still give a positive bound
  CHECK(wilson_upper(10.0, 100.0, 2.0) > 0.1);    // bound exceeds the point estimate
  CHECK(wilson_upper(1e6, 1e9, 2.0) == Catch::Approx(1e-3).epsilon(0.01));
  CHECK(wilson_upper(1.0, 0.0, 2.0) == 1.0);
}

TEST_CASE("thinning shortens correlated chains") {
  const double rho = 0.9;
  CounterRng rng(48);
  std::vector<double> x(50000);
  double state = 0;
  for (double& v : x) {
    state = rho * state + std::sqrt(1.0 - rho * rho) * rng.normal();
    v = state;
  }
  auto thinned = thin_chains({x});
  REQUIRE(thinned.size() == 1);
  CHECK(thinned[0].size() < x.size() / 10);
  // thinned output is close to white
  CHECK(autocorr_time(thinned[0]) < 2.0);
}

TEST_CASE("two-sample ks test accepts equal laws and rejects a shift") {
  auto a = normal_chains(4, 5000, 0.0, 49);
  auto b = normal_chains(4, 5000, 0.0, 50);
  auto c = normal_chains(4, 5000, 0.25, 51);
  CounterRng boot(52);
  CHECK(two_sample_ks_test(a, b, 0.01, 400, boot).pass);
  auto rej = two_sample_ks_test(a, c, 0.01, 400, boot);
  CHECK(!rej.pass);
  CHECK(rej.statistic > rej.threshold);
}

TEST_CASE("one-sample ks test against the normal cdf") {
  auto a = normal_chains(4, 5000, 0.0, 53);
  CHECK(one_sample_ks_test(a, [](double x) { return normal_cdf(x); }, 0.01).pass);
  CHECK(!one_sample_ks_test(a, [](double x) { return normal_cdf(x - 0.2); }, 0.01).pass);
}

TEST_CASE("energy statistic vanishes on identical samples") {
  CounterRng rng(54);
  std::vector<double> x;
  for (int i = 0; i < 100; ++i) x.push_back(rng.normal());
  CHECK(energy_statistic(x, x, 2) == Catch::Approx(0.0).margin(1e-12));
  CHECK_THROWS_AS(energy_statistic({}, x, 2), std::invalid_argument);
}

TEST_CASE("energy distance test on two-dimensional laws") {
  CounterRng gen(55);
  auto draw = [&](double shift, int n) {
    std::vector<double> rows;
    rows.reserve(2 * n);
    for (int i = 0; i < n; ++i) {
      double z1 = gen.normal(), z2 = gen.normal();
      // correlated pair; the marginals of the shifted law stay standard
      rows.push_back(z1 + shift);
      rows.push_back(0.6 * z1 + 0.8 * z2);
    }
    return rows;
  };
  auto x = draw(0.0, 900);
  auto y = draw(0.0, 900);
  auto z = draw(0.35, 900);
  CounterRng boot(56);
  CHECK(energy_distance_test(x, y, 2, 0.01, 200, boot).pass);
  CHECK(!energy_distance_test(x, z, 2, 0.01, 200, boot).pass);
}
