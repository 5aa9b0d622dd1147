#ifndef SIGMA_SUSY_CHECK_HPP_
#define SIGMA_SUSY_CHECK_HPP_

// Residual battery for the symmetry operators: annihilation of the inner
// product by every L_ij and by Q, and the chain rule for exp checked
// against an independent Taylor evaluation of the exponential.

#include <algorithm>
#include <cmath>
#include <vector>

#include "sigma/grassmann.hpp"
#include "sigma/rng.hpp"
#include "sigma/susy.hpp"

namespace sigma {

/// Random parity-correct Grassmann element: all coefficients of the
/// requested parity drawn uniformly from [-1, 1).
inline GrassmannElement random_element(int k, bool odd, CounterRng& rng) {
  GrassmannElement e(k);
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << k); ++mask) {
    int bits = __builtin_popcount(mask);
    if ((bits % 2 == 1) == odd) e.coeff(mask) = 2.0 * rng.uniform() - 1.0;
  }
  return e;
}

inline SuperVector random_supervector(int k, CounterRng& rng) {
  SuperVector v;
  v.x = random_element(k, false, rng);
  v.y = random_element(k, false, rng);
  v.z = random_element(k, false, rng);
  v.xi = random_element(k, true, rng);
  v.eta = random_element(k, true, rng);
  return v;
}

/// exp of an even element by scalar exp of the body times a hand-rolled
/// Taylor series in the nilpotent part; independent of lift_exp.
inline GrassmannElement manual_exp(const GrassmannElement& p) {
  const int k = p.num_generators();
  GrassmannElement nil = p.nilpotent_part();
  GrassmannElement sum = GrassmannElement::constant(k, 1.0);
  GrassmannElement power = GrassmannElement::constant(k, 1.0);
  double factorial = 1.0;
  for (int n = 1; n <= k / 2 + 1; ++n) {
    power = power * nil;
    factorial *= n;
    if (power.is_zero()) break;
    sum += power * (1.0 / factorial);
  }
  return sum * std::exp(p.body());
}

struct SusyResiduals {
  double annihilation_l = 0;  // max over pairs of |sum_slots L_ij <v,v'>|
  double annihilation_q = 0;  // |sum_slots Q <v,v'>|
  double chain_rule = 0;      // max |L_ij e^P - (L_ij P) e^P|

  double max() const { return std::max({annihilation_l, annihilation_q, chain_rule}); }
};

/// One random point: two supervectors over 4 generators, P a random
/// three-term inner combination involving the reference point.
inline SusyResiduals susy_residuals_at(CounterRng& rng) {
  const int k = 4;
  std::vector<SuperVector> vs{random_supervector(k, rng), random_supervector(k, rng)};

  InnerCombo pairing;  // the plain inner product of the two vectors
  pairing.terms.push_back({1.0, 0, 1});

  InnerCombo p;  // generic combination for the chain rule
  auto rnd = [&] { return 2.0 * rng.uniform() - 1.0; };
  p.terms.push_back({rnd(), 0, 1});
  p.terms.push_back({rnd(), 0, -1});
  p.terms.push_back({rnd(), 1, -1});

  SusyResiduals res;
  for (int i = 1; i <= 5; ++i) {
    for (int j = 1; j <= 5; ++j) {
      res.annihilation_l =
          std::max(res.annihilation_l, susy_apply(i, j, pairing, vs).max_abs_coeff());
      GrassmannElement via_lift = susy_apply(i, j, p, vs, SusyForm::kExp);
      GrassmannElement via_taylor = susy_apply(i, j, p, vs) * manual_exp(eval_inner_combo(p, vs));
      res.chain_rule = std::max(res.chain_rule, (via_lift - via_taylor).max_abs_coeff());
    }
  }
  GrassmannElement q = susy_Q(pairing, vs, 0) + susy_Q(pairing, vs, 1);
  res.annihilation_q = q.max_abs_coeff();
  return res;
}

inline SusyResiduals susy_residual_battery(std::uint64_t seed, int points) {
  CounterRng rng(seed, 0x5059);
  SusyResiduals worst;
  for (int t = 0; t < points; ++t) {
    SusyResiduals r = susy_residuals_at(rng);
    worst.annihilation_l = std::max(worst.annihilation_l, r.annihilation_l);
    worst.annihilation_q = std::max(worst.annihilation_q, r.annihilation_q);
    worst.chain_rule = std::max(worst.chain_rule, r.chain_rule);
  }
  return worst;
}

}  // namespace sigma

#endif  // SIGMA_SUSY_CHECK_HPP_
