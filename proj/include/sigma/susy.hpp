#ifndef SIGMA_SUSY_HPP_
#define SIGMA_SUSY_HPP_

// Supervectors with three even and two odd components, the indefinite
// super inner product, horospherical coordinates, and the fifteen
// first-order symmetry operators L_ij together with the odd generator Q.

#include <array>
#include <stdexcept>
#include <vector>

#include "sigma/grassmann.hpp"

namespace sigma {

struct SuperVector {
  GrassmannElement x, y, z, xi, eta;

  int num_generators() const { return x.num_generators(); }

  const GrassmannElement& component(int i) const {
    switch (i) {
      case 1: return x;
      case 2: return y;
      case 3: return z;
      case 4: return xi;
      case 5: return eta;
    }
    throw std::invalid_argument("component index must be in [1,5]");
  }
};

inline SuperVector make_even_vector(int k, double x, double y, double z) {
  return SuperVector{GrassmannElement::constant(k, x), GrassmannElement::constant(k, y),
                     GrassmannElement::constant(k, z), GrassmannElement(k), GrassmannElement(k)};
}

/// The reference point o = (0,0,1,0,0).
inline SuperVector origin_point(int k) { return make_even_vector(k, 0.0, 0.0, 1.0); }

/// <v,v'> = xx' + yy' - zz' + xi eta' - eta xi'.
inline GrassmannElement super_inner_product(const SuperVector& v, const SuperVector& w) {
  return v.x * w.x + v.y * w.y - v.z * w.z + v.xi * w.eta - v.eta * w.xi;
}

/// Horospherical parametrization of the supermanifold; u, s even and
/// psibar, psi odd.
inline SuperVector horospherical_to_cartesian(const GrassmannElement& u,
                                              const GrassmannElement& s,
                                              const GrassmannElement& psibar,
                                              const GrassmannElement& psi) {
  if (!u.is_even() || !s.is_even()) throw std::domain_error("u, s must be even");
  if (!psibar.is_odd() || !psi.is_odd()) throw std::domain_error("psibar, psi must be odd");
  GrassmannElement eu = lift_exp(u);
  GrassmannElement half_s2 = s * s * 0.5;
  GrassmannElement bump = (half_s2 + psibar * psi) * eu;
  SuperVector v;
  v.x = lift_sinh(u) - bump;
  v.y = s * eu;
  v.xi = psibar * eu;
  v.eta = psi * eu;
  v.z = lift_cosh(u) + bump;
  return v;
}

// ---------------------------------------------------------------------------
// Symmetry operators.
//
// With the metric g = diag(1,1,-1) (+) [[0,1],[-1,0]] and the sign
// sigma_ij = 1 for i,j <= 3 and -1 otherwise,
//   L_ij = sum_k [ v^k g_kj d/dv^i - sigma_ij v^k g_ki d/dv^j ].
// The operators are applied to functions of the form P or exp(P) with
// P a linear combination of inner products of the supplied vectors; the
// partial derivatives of P are then exact.

inline double susy_sign(int i, int j) { return (i <= 3 && j <= 3) ? 1.0 : -1.0; }

/// (v g)_i for the metric above: (x, y, -z, -eta, xi).
inline GrassmannElement metric_contraction(const SuperVector& v, int i) {
  switch (i) {
    case 1: return v.x;
    case 2: return v.y;
    case 3: return -v.z;
    case 4: return -v.eta;
    case 5: return v.xi;
  }
  throw std::invalid_argument("component index must be in [1,5]");
}

/// d<v,w>/dv^i (left derivative convention): (x_w, y_w, -z_w, eta_w, -xi_w).
inline GrassmannElement inner_product_gradient(const SuperVector& w, int i) {
  switch (i) {
    case 1: return w.x;
    case 2: return w.y;
    case 3: return -w.z;
    case 4: return w.eta;
    case 5: return -w.xi;
  }
  throw std::invalid_argument("component index must be in [1,5]");
}

/// A linear combination sum_t c_t <v_{a_t}, v_{b_t}> over a point list;
/// slot index -1 denotes the fixed reference point o.
struct InnerCombo {
  struct Term {
    double c;
    int a;
    int b;
  };
  std::vector<Term> terms;
};

inline GrassmannElement eval_inner_combo(const InnerCombo& combo,
                                         const std::vector<SuperVector>& vs) {
  if (vs.empty()) throw std::invalid_argument("empty point list");
  const int k = vs[0].num_generators();
  SuperVector o = origin_point(k);
  GrassmannElement p(k);
  for (const auto& t : combo.terms) {
    const SuperVector& va = (t.a < 0) ? o : vs.at(t.a);
    const SuperVector& vb = (t.b < 0) ? o : vs.at(t.b);
    p += super_inner_product(va, vb) * t.c;
  }
  return p;
}

/// dP/dv_l^i, exact because P is linear in every component.
inline GrassmannElement inner_combo_partial(const InnerCombo& combo,
                                            const std::vector<SuperVector>& vs, int l, int i) {
  const int k = vs[0].num_generators();
  SuperVector o = origin_point(k);
  GrassmannElement d(k);
  for (const auto& t : combo.terms) {
    if (t.a == l) d += inner_product_gradient((t.b < 0) ? o : vs.at(t.b), i) * t.c;
    if (t.b == l) d += inner_product_gradient((t.a < 0) ? o : vs.at(t.a), i) * t.c;
  }
  return d;
}

enum class SusyForm { kLinear, kExp };  // F = P or F = exp(P)

/// L_ij^{v_l} F evaluated at the point list.
inline GrassmannElement susy_L(int i, int j, const InnerCombo& combo,
                               const std::vector<SuperVector>& vs, int l,
                               SusyForm form = SusyForm::kLinear) {
  if (i < 1 || i > 5 || j < 1 || j > 5) throw std::invalid_argument("operator index out of [5]^2");
  const SuperVector& v = vs.at(l);
  GrassmannElement di = inner_combo_partial(combo, vs, l, i);
  GrassmannElement dj = inner_combo_partial(combo, vs, l, j);
  GrassmannElement r =
      metric_contraction(v, j) * di - susy_sign(i, j) * metric_contraction(v, i) * dj;
  if (form == SusyForm::kExp) r = r * lift_exp(eval_inner_combo(combo, vs));
  return r;
}

/// (sum_l L_ij^{v_l}) F over all supplied vectors.
inline GrassmannElement susy_apply(int i, int j, const InnerCombo& combo,
                                   const std::vector<SuperVector>& vs,
                                   SusyForm form = SusyForm::kLinear) {
  GrassmannElement sum(vs.at(0).num_generators());
  // chain rule: for exp form the exponential factor is shared
  for (std::size_t l = 0; l < vs.size(); ++l)
    sum += susy_L(i, j, combo, vs, static_cast<int>(l), SusyForm::kLinear);
  if (form == SusyForm::kExp) sum = sum * lift_exp(eval_inner_combo(combo, vs));
  return sum;
}

/// Q^{v_l} = L_15 - L_24.
inline GrassmannElement susy_Q(const InnerCombo& combo, const std::vector<SuperVector>& vs, int l,
                               SusyForm form = SusyForm::kLinear) {
  GrassmannElement r = susy_L(1, 5, combo, vs, l, SusyForm::kLinear) -
                       susy_L(2, 4, combo, vs, l, SusyForm::kLinear);
  if (form == SusyForm::kExp) r = r * lift_exp(eval_inner_combo(combo, vs));
  return r;
}

}  // namespace sigma

#endif  // SIGMA_SUSY_HPP_
