#ifndef SIGMA_BEREZIN_HPP_
#define SIGMA_BEREZIN_HPP_

// Exact superintegration oracle for one- and two-site models: the
// z-constraint is substituted symbolically, the Grassmann pair of every
// site is integrated out exactly as a top derivative, and the remaining
// even integral over (x_j, y_j) is done by quadrature.

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "sigma/grassmann.hpp"
#include "sigma/model.hpp"
#include "sigma/quadrature.hpp"
#include "sigma/susy.hpp"

namespace sigma {

/// Site j of an n-site system uses generators 2j (xi) and 2j+1 (eta).
inline SuperVector constrained_site(int n_sites, int j, double x, double y) {
  const int k = 2 * n_sites;
  SuperVector v;
  v.x = GrassmannElement::constant(k, x);
  v.y = GrassmannElement::constant(k, y);
  v.xi = GrassmannElement::generator(k, 2 * j);
  v.eta = GrassmannElement::generator(k, 2 * j + 1);
  // z = sqrt(1 + x^2 + y^2 + 2 xi eta) on the constraint surface
  GrassmannElement arg = GrassmannElement::constant(k, 1.0 + x * x + y * y) +
                         v.xi * v.eta * 2.0;
  v.z = lift_sqrt(arg);
  return v;
}

/// Applies prod_j d_xi_j d_eta_j and returns the remaining scalar.
inline double berezin_top(GrassmannElement e, int n_sites) {
  // d_xi d_eta: the eta derivative acts first
  for (int j = 0; j < n_sites; ++j) e = e.derivative(2 * j + 1).derivative(2 * j);
  // after the top derivatives only the scalar component can survive
  return e.body();
}

/// The action sum_{i<j} W_ij (1 + <v_i,v_j>) + sum_i h_i (1 + <v_i,o>)
/// as an inner-product combination; the scalar offset is encoded through
/// <o,o> = -1.  One term per unordered pair: this normalization is the
/// one under which the (u, s) marginal carries W_ij in front of
/// (B_ij - 1) and in the coupling matrix.
inline InnerCombo action_combo(const ModelSpec& spec) {
  InnerCombo combo;
  const int n = static_cast<int>(spec.size());
  double constant = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double wij = spec.weight(i, j);
      if (wij == 0) continue;
      constant += wij;
      combo.terms.push_back({wij, i, j});
    }
    constant += spec.h[i];
    if (spec.h[i] != 0) combo.terms.push_back({spec.h[i], i, -1});
  }
  if (constant != 0) combo.terms.push_back({-constant, -1, -1});
  return combo;
}

/// Scalar part of the action at bodies (x_j, y_j); used to skip grid
/// points where the integrand is negligible.
inline double action_body(const ModelSpec& spec, const std::vector<double>& xy) {
  const std::size_t n = spec.size();
  double s = 0;
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = xy[2 * i], y = xy[2 * i + 1];
    z[i] = std::sqrt(1.0 + x * x + y * y);
    s += spec.h[i] * (1.0 - z[i]);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      s += spec.weight(i, j) *
           (1.0 + xy[2 * i] * xy[2 * j] + xy[2 * i + 1] * xy[2 * j + 1] - z[i] * z[j]);
  return s;
}

using SuperFactor = std::function<GrassmannElement(const std::vector<SuperVector>&)>;

/// Grassmann top coefficient of (prod_j 1/z_j) * integrand at one even
/// grid point; `integrand` receives the constrained supervectors.
inline double berezin_pointwise(const ModelSpec& spec, const std::vector<double>& xy,
                                const SuperFactor& integrand) {
  const int n = static_cast<int>(spec.size());
  std::vector<SuperVector> vs;
  vs.reserve(n);
  for (int j = 0; j < n; ++j) vs.push_back(constrained_site(n, j, xy[2 * j], xy[2 * j + 1]));
  GrassmannElement val = integrand(vs);
  for (int j = 0; j < n; ++j) val = val * lift_reciprocal(vs[j].z);
  return berezin_top(val, n);
}

inline QuadratureOptions berezin_default_options(std::size_t n_sites) {
  QuadratureOptions opt;
  if (n_sites <= 1) {
    opt.abs_tol = 1e-9;
    opt.rel_tol = 1e-9;
    opt.step0 = 0.5;
    opt.max_refinements = 4;
  } else {
    opt.abs_tol = 1e-5;
    opt.rel_tol = 1e-5;
    opt.step0 = 0.8;
    opt.max_refinements = 2;
  }
  return opt;
}

/// Raw superintegral (2 pi)^{-n} int dx dy  top[ (prod 1/z_j) integrand ].
inline double superintegrate_raw(const ModelSpec& spec, const SuperFactor& integrand,
                                 QuadratureOptions opt, double skip_threshold = -70.0) {
  const int n = static_cast<int>(spec.size());
  if (n < 1 || n > 2)
    throw std::domain_error("Berezin oracle supports one or two sites only");
  // tolerances refer to the normalized value; the quadrature sees the
  // raw integral which is (2 pi)^n larger
  opt.abs_tol *= std::pow(2.0 * M_PI, n);
  double value = integrate_rn_checked(
      2 * n,
      [&](const std::vector<double>& xy) {
        if (action_body(spec, xy) < skip_threshold) return 0.0;
        return berezin_pointwise(spec, xy, integrand);
      },
      opt);
  return value / std::pow(2.0 * M_PI, n);
}

/// E[ extra_factor ] = int D v  e^S extra_factor; null factor means E[1].
inline double berezin_superintegral(const ModelSpec& spec, const SuperFactor& extra_factor = {},
                                    QuadratureOptions* custom_opt = nullptr) {
  spec.validate();
  InnerCombo s_combo = action_combo(spec);
  SuperFactor f = [&](const std::vector<SuperVector>& vs) {
    GrassmannElement e = lift_exp(eval_inner_combo(s_combo, vs));
    if (extra_factor) e = e * extra_factor(vs);
    return e;
  };
  QuadratureOptions opt = custom_opt ? *custom_opt : berezin_default_options(spec.size());
  return superintegrate_raw(spec, f, opt);
}

/// Factor e^{sum_j <a_j, v_j>} for real vectors a_j = (x,y,z) (even parts
/// only); used for super Laplace transforms.
inline SuperFactor exponential_tilt(std::vector<std::array<double, 3>> tilts) {
  return [tilts = std::move(tilts)](const std::vector<SuperVector>& vs) {
    const int k = vs[0].num_generators();
    GrassmannElement p(k);
    for (std::size_t j = 0; j < vs.size(); ++j) {
      const auto& a = tilts.at(j);
      SuperVector av = make_even_vector(k, a[0], a[1], a[2]);
      p += super_inner_product(av, vs[j]);
    }
    return lift_exp(p);
  };
}

/// Pointwise density of (x_j, y_j): the Grassmann top coefficient of
/// e^S / prod z divided by (2 pi)^n, no quadrature involved.
inline double pointwise_cartesian_density(const ModelSpec& spec, const std::vector<double>& xy) {
  InnerCombo s_combo = action_combo(spec);
  SuperFactor f = [&](const std::vector<SuperVector>& vs) {
    return lift_exp(eval_inner_combo(s_combo, vs));
  };
  return berezin_pointwise(spec, xy, f) / std::pow(2.0 * M_PI, spec.size());
}

/// Marginal density of the even horospherical coordinates (u, s): the
/// fermionic integral is done symbolically in the horospherical
/// parametrization, whose flat measure per site is
/// (2 pi)^{-1} e^{-u} du ds d_psibar d_psi.  Note that transforming the
/// cartesian pointwise density with the bosonic Jacobian alone would be
/// wrong, since u = log(x + z) mixes in the fermion bilinear through z.
/// Independent of model::log_density.
inline double horospherical_density_oracle(const ModelSpec& spec, const FieldConfig& cfg) {
  const int n = static_cast<int>(spec.size());
  const int k = 2 * n;
  std::vector<SuperVector> vs;
  vs.reserve(n);
  double sum_u = 0;
  for (int j = 0; j < n; ++j) {
    vs.push_back(horospherical_to_cartesian(GrassmannElement::constant(k, cfg.u[j]),
                                            GrassmannElement::constant(k, cfg.s[j]),
                                            GrassmannElement::generator(k, 2 * j),
                                            GrassmannElement::generator(k, 2 * j + 1)));
    sum_u += cfg.u[j];
  }
  GrassmannElement e = lift_exp(eval_inner_combo(action_combo(spec), vs));
  return berezin_top(e, n) * std::exp(-sum_u) / std::pow(2.0 * M_PI, n);
}

/// Residual of the Ward identity int D v L_ij e^S for a single-site
/// model; should vanish to quadrature accuracy.
inline double ward_residual(const ModelSpec& spec, int i, int j) {
  if (spec.size() != 1) throw std::domain_error("ward_residual is single-site");
  InnerCombo s_combo = action_combo(spec);
  SuperFactor f = [&](const std::vector<SuperVector>& vs) {
    return susy_L(i, j, s_combo, vs, 0, SusyForm::kExp);
  };
  QuadratureOptions opt = berezin_default_options(1);
  opt.abs_tol = 1e-8;
  opt.rel_tol = 1e300;  // residual is ~0, relative control is meaningless
  return superintegrate_raw(spec, f, opt);
}

}  // namespace sigma

#endif  // SIGMA_BEREZIN_HPP_
