#ifndef SIGMA_GRASSMANN_HPP_
#define SIGMA_GRASSMANN_HPP_

// Finite-dimensional Grassmann algebra with real coefficients.  An element
// is stored densely as one coefficient per generator subset (bitmask
// indexed), which is exact and fast for the small generator counts used
// here (K = 2 per site, K <= 12 guarded).

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace sigma {

inline constexpr int kMaxGenerators = 12;

class GrassmannElement {
 public:
  GrassmannElement() = default;

  explicit GrassmannElement(int num_generators)
      : k_(check_k(num_generators)), c_(std::size_t{1} << k_, 0.0) {}

  static GrassmannElement constant(int num_generators, double value) {
    GrassmannElement e(num_generators);
    e.c_[0] = value;
    return e;
  }

  static GrassmannElement generator(int num_generators, int index) {
    GrassmannElement e(num_generators);
    if (index < 0 || index >= num_generators)
      throw std::invalid_argument("generator index out of range");
    e.c_[std::size_t{1} << index] = 1.0;
    return e;
  }

  int num_generators() const { return k_; }
  double body() const { return c_.empty() ? 0.0 : c_[0]; }
  double coeff(std::uint32_t subset) const { return c_[subset]; }
  double& coeff(std::uint32_t subset) { return c_[subset]; }

  bool is_even() const { return has_parity_only(0); }
  bool is_odd() const { return has_parity_only(1); }

  bool is_zero(double tol = 0.0) const {
    for (double v : c_)
      if (std::abs(v) > tol) return false;
    return true;
  }

  double max_abs_coeff() const {
    double m = 0;
    for (double v : c_) m = std::max(m, std::abs(v));
    return m;
  }

  GrassmannElement nilpotent_part() const {
    GrassmannElement e = *this;
    e.c_[0] = 0.0;
    return e;
  }

  GrassmannElement& operator+=(const GrassmannElement& o) {
    check_same(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  GrassmannElement& operator-=(const GrassmannElement& o) {
    check_same(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  GrassmannElement& operator*=(double a) {
    for (double& v : c_) v *= a;
    return *this;
  }

  friend GrassmannElement operator+(GrassmannElement a, const GrassmannElement& b) { return a += b; }
  friend GrassmannElement operator-(GrassmannElement a, const GrassmannElement& b) { return a -= b; }
  friend GrassmannElement operator*(GrassmannElement a, double s) { return a *= s; }
  friend GrassmannElement operator*(double s, GrassmannElement a) { return a *= s; }
  friend GrassmannElement operator-(GrassmannElement a) { return a *= -1.0; }

  friend GrassmannElement operator*(const GrassmannElement& a, const GrassmannElement& b) {
    a.check_same(b);
    GrassmannElement r(a.k_);
    const std::size_t n = a.c_.size();
    for (std::size_t i = 0; i < n; ++i) {
      double ci = a.c_[i];
      if (ci == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        double cj = b.c_[j];
        if (cj == 0.0) continue;
        if (i & j) continue;  // repeated generator squares to zero
        r.c_[i | j] += merge_sign(static_cast<std::uint32_t>(i),
                                  static_cast<std::uint32_t>(j)) * ci * cj;
      }
    }
    return r;
  }

  /// Left Grassmann derivative with respect to generator `index`: the
  /// unique omega_1 in omega = omega_0 + chi * omega_1.
  GrassmannElement derivative(int index) const {
    if (index < 0 || index >= k_) throw std::invalid_argument("derivative index out of range");
    GrassmannElement r(k_);
    const std::uint32_t bit = 1u << index;
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (!(i & bit) || c_[i] == 0.0) continue;
      // moving chi_index to the front passes every lower generator in i
      int below = __builtin_popcount(static_cast<std::uint32_t>(i) & (bit - 1u));
      double sign = (below & 1) ? -1.0 : 1.0;
      r.c_[i & ~bit] += sign * c_[i];
    }
    return r;
  }

 private:
  static int check_k(int k) {
    if (k < 0 || k > kMaxGenerators) throw std::invalid_argument("generator count out of range");
    return k;
  }
  void check_same(const GrassmannElement& o) const {
    if (k_ != o.k_) throw std::domain_error("mismatched generator counts");
  }
  bool has_parity_only(int parity) const {
    for (std::size_t i = 0; i < c_.size(); ++i)
      if (c_[i] != 0.0 && (__builtin_popcount(static_cast<std::uint32_t>(i)) & 1) != parity)
        return false;
    return true;
  }
  // Sign of chi^I * chi^J (disjoint): each generator of J moves left past
  // the generators of I above it.
  static double merge_sign(std::uint32_t i, std::uint32_t j) {
    int inversions = 0;
    while (j) {
      int b = __builtin_ctz(j);
      inversions += __builtin_popcount(i >> (b + 1));
      j &= j - 1;
    }
    return (inversions & 1) ? -1.0 : 1.0;
  }

  int k_ = 0;
  std::vector<double> c_;
};

/// Lift of a smooth scalar function to an even element via the finite
/// Taylor expansion in the nilpotent part.  `dk(k, x)` must return the
/// k-th derivative of f at x; orders up to K/2 are requested.
template <class DerivFn>
inline GrassmannElement lift_even_function(DerivFn&& dk, const GrassmannElement& a) {
  if (!a.is_even()) throw std::domain_error("lift_even_function: argument must be even");
  const double b = a.body();
  GrassmannElement n = a.nilpotent_part();
  GrassmannElement result = GrassmannElement::constant(a.num_generators(), dk(0, b));
  GrassmannElement npow = GrassmannElement::constant(a.num_generators(), 1.0);
  double factorial = 1.0;
  const int max_order = a.num_generators() / 2;
  for (int k = 1; k <= max_order; ++k) {
    npow = npow * n;
    if (npow.is_zero()) break;
    factorial *= k;
    result += npow * (dk(k, b) / factorial);
  }
  return result;
}

inline GrassmannElement lift_exp(const GrassmannElement& a) {
  return lift_even_function([](int, double x) { return std::exp(x); }, a);
}

inline GrassmannElement lift_sqrt(const GrassmannElement& a) {
  if (a.body() <= 0.0) throw std::domain_error("lift_sqrt: body must be positive");
  return lift_even_function(
      [](int k, double x) {
        double c = 1.0, p = 0.5;
        for (int i = 0; i < k; ++i, p -= 1.0) c *= p;
        return c * std::pow(x, 0.5 - k);
      },
      a);
}

inline GrassmannElement lift_reciprocal(const GrassmannElement& a) {
  if (a.body() == 0.0) throw std::domain_error("lift_reciprocal: body must be nonzero");
  return lift_even_function(
      [](int k, double x) {
        double c = (k & 1) ? -1.0 : 1.0;
        for (int i = 2; i <= k; ++i) c *= i;
        return c * std::pow(x, -1.0 - k);
      },
      a);
}

inline GrassmannElement lift_log(const GrassmannElement& a) {
  if (a.body() <= 0.0) throw std::domain_error("lift_log: body must be positive");
  return lift_even_function(
      [](int k, double x) {
        if (k == 0) return std::log(x);
        double c = (k & 1) ? 1.0 : -1.0;
        for (int i = 2; i <= k - 1; ++i) c *= i;
        return c * std::pow(x, -static_cast<double>(k));
      },
      a);
}

inline GrassmannElement lift_sinh(const GrassmannElement& a) {
  return lift_even_function(
      [](int k, double x) { return (k & 1) ? std::cosh(x) : std::sinh(x); }, a);
}

inline GrassmannElement lift_cosh(const GrassmannElement& a) {
  return lift_even_function(
      [](int k, double x) { return (k & 1) ? std::sinh(x) : std::cosh(x); }, a);
}

}  // namespace sigma

#endif  // SIGMA_GRASSMANN_HPP_
