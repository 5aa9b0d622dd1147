#ifndef SIGMA_MODEL_HPP_
#define SIGMA_MODEL_HPP_

// Hierarchical weights and pinning, the effective-model builder, and the
// exact normalized log-density of the even horospherical coordinates.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <sstream>
#include <utility>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sigma/tree.hpp"

namespace sigma {

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Weight profiles w : N_0 -> [0, inf).

struct WeightProfile {
  enum class Kind { kConst, kGeom, kPoly, kTable };
  Kind kind = Kind::kConst;
  double c = 1.0;
  double r = 1.0;  // geom ratio
  double p = 1.0;  // poly exponent
  std::vector<double> table;

  double operator()(int l) const {
    if (l < 0) throw std::domain_error("weight profile: negative distance");
    switch (kind) {
      case Kind::kConst: return c;
      case Kind::kGeom: return c * std::pow(r, l);
      case Kind::kPoly: return c * std::pow(1.0 + l, -p);
      case Kind::kTable:
        if (static_cast<std::size_t>(l) >= table.size())
          throw std::domain_error("weight table too short");
        return table[l];
    }
    throw std::logic_error("unreachable");
  }

  // Inline syntax: const:c | geom:c,r | poly:c,p | table:v0,v1,...
  static WeightProfile parse(const std::string& text) {
    auto colon = text.find(':');
    std::string kind = text.substr(0, colon);
    std::string rest = (colon == std::string::npos) ? "" : text.substr(colon + 1);
    std::vector<double> args;
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) args.push_back(std::stod(item));
    WeightProfile w;
    if (kind == "const" && args.size() == 1) {
      w.kind = Kind::kConst;
      w.c = args[0];
    } else if (kind == "geom" && args.size() == 2) {
      w.kind = Kind::kGeom;
      w.c = args[0];
      w.r = args[1];
    } else if (kind == "poly" && args.size() == 2) {
      w.kind = Kind::kPoly;
      w.c = args[0];
      w.p = args[1];
    } else if (kind == "table" && !args.empty()) {
      w.kind = Kind::kTable;
      w.table = args;
    } else {
      throw std::invalid_argument("cannot parse weight profile: " + text);
    }
    for (int l = 0; l < (w.kind == Kind::kTable ? static_cast<int>(w.table.size()) : 8); ++l)
      if (w(l) < 0) throw std::invalid_argument("weight profile must be non-negative");
    return w;
  }

  std::string describe() const {
    std::ostringstream os;
    switch (kind) {
      case Kind::kConst: os << "const:" << c; break;
      case Kind::kGeom: os << "geom:" << c << "," << r; break;
      case Kind::kPoly: os << "poly:" << c << "," << p; break;
      case Kind::kTable:
        os << "table:";
        for (std::size_t i = 0; i < table.size(); ++i) os << (i ? "," : "") << table[i];
        break;
    }
    return os.str();
  }
};

struct PinningSpec {
  enum class Mode { kUniform, kPoint, kExplicit };
  Mode mode = Mode::kUniform;
  double epsilon = 1.0;
  TreeWord site;                // for kPoint
  std::vector<double> values;   // for kExplicit, indexed like the vertex list

  double at_leaf(const TreeWord& leaf, int tree_height) const {
    switch (mode) {
      case Mode::kUniform: return epsilon;
      case Mode::kPoint: return (leaf == site) ? epsilon : 0.0;
      case Mode::kExplicit: {
        if (leaf.len != tree_height) throw std::domain_error("explicit pinning expects leaves");
        return values.at(leaf.bits);
      }
    }
    throw std::logic_error("unreachable");
  }
};

// ---------------------------------------------------------------------------
// Model specification: vertex list, symmetric weight matrix, pinning.

struct ModelSpec {
  int tree_height = 0;
  std::vector<TreeWord> vertices;
  std::vector<double> W;  // n x n, symmetric, zero diagonal
  std::vector<double> h;

  std::size_t size() const { return vertices.size(); }
  double weight(std::size_t i, std::size_t j) const { return W[i * size() + j]; }
  double& weight(std::size_t i, std::size_t j) { return W[i * size() + j]; }

  int index_of(const TreeWord& v) const {
    for (std::size_t i = 0; i < vertices.size(); ++i)
      if (vertices[i] == v) return static_cast<int>(i);
    throw std::invalid_argument("vertex not in model: " + word_to_string(v));
  }

  /// Pinning must be positive somewhere in every connected component of
  /// the positive-weight graph.
  bool pinning_invariant_holds() const {
    const std::size_t n = size();
    std::vector<std::size_t> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
    std::function<std::size_t(std::size_t)> find = [&](std::size_t a) {
      while (parent[a] != a) a = parent[a] = parent[parent[a]];
      return a;
    };
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (weight(i, j) > 0) parent[find(i)] = find(j);
    std::vector<char> pinned(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      if (h[i] > 0) pinned[find(i)] = 1;
    for (std::size_t i = 0; i < n; ++i)
      if (!pinned[find(i)]) return false;
    return true;
  }

  void validate() const {
    const std::size_t n = size();
    if (W.size() != n * n || h.size() != n) throw std::invalid_argument("inconsistent model sizes");
    for (std::size_t i = 0; i < n; ++i) {
      if (weight(i, i) != 0) throw std::invalid_argument("weight diagonal must be zero");
      if (h[i] < 0) throw std::invalid_argument("pinning must be non-negative");
      for (std::size_t j = 0; j < n; ++j) {
        if (weight(i, j) < 0) throw std::invalid_argument("weights must be non-negative");
        if (weight(i, j) != weight(j, i)) throw std::invalid_argument("weights must be symmetric");
      }
    }
    if (!pinning_invariant_holds())
      throw std::domain_error("pinning vanishes on a whole connected component");
  }
};

/// Extended hierarchical weight 2^{l(i)+l(j)} w(l(i ^ j)); reduces to
/// w(d(i,j)) on leaves.  Zero on the diagonal.
inline double hierarchical_weight(const TreeWord& i, const TreeWord& j, const WeightProfile& w,
                                  int tree_height) {
  if (i == j) return 0.0;
  return std::exp2(level(i, tree_height) + level(j, tree_height)) *
         w(level(meet(i, j), tree_height));
}

/// Extended pinning H_j = sum of the leaf pinning over the block of j;
/// requires compatibility.
inline std::vector<double> extended_pinning(const Antichain& a, const PinningSpec& pin) {
  auto leaf_pin = [&](const TreeWord& leaf) { return pin.at_leaf(leaf, a.ambient_height); };
  if (!is_compatible(a, leaf_pin))
    throw std::domain_error("pinning is not compatible with the antichain");
  std::vector<double> H;
  H.reserve(a.members.size());
  for (const auto& j : a.members) {
    TreeWord any_leaf{j.bits << level(j, a.ambient_height), a.ambient_height};
    H.push_back(std::exp2(level(j, a.ambient_height)) * leaf_pin(any_leaf));
  }
  return H;
}

/// The model on an arbitrary maximal antichain with rescaled weights and
/// summed pinning; with A = full leaf set this is the original model.
inline ModelSpec effective_model(const Antichain& a, const WeightProfile& w,
                                 const PinningSpec& pin) {
  if (!is_maximal_antichain(a)) throw std::domain_error("effective model needs a maximal antichain");
  ModelSpec spec;
  spec.tree_height = a.ambient_height;
  spec.vertices = a.members;
  const std::size_t n = spec.vertices.size();
  spec.W.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j)
        spec.weight(i, j) =
            hierarchical_weight(spec.vertices[i], spec.vertices[j], w, a.ambient_height);
  spec.h = extended_pinning(a, pin);
  spec.validate();
  return spec;
}

/// The full model on all 2^N leaves.
inline ModelSpec leaf_model(int tree_height, const WeightProfile& w, const PinningSpec& pin) {
  Antichain a = Antichain::from(block_leaves(root(), tree_height), tree_height);
  return effective_model(a, w, pin);
}

// ---------------------------------------------------------------------------
// Field configurations and the density.

struct FieldConfig {
  std::vector<double> u, s;
};

/// B_ij = cosh(u_i-u_j) + (s_i-s_j)^2 e^{u_i+u_j}/2 and
/// B_i  = cosh(u_i) + s_i^2 e^{u_i}/2.
inline std::pair<double, double> b_terms(const FieldConfig& cfg, std::size_t i, std::size_t j) {
  double bij = std::cosh(cfg.u[i] - cfg.u[j]) +
               0.5 * (cfg.s[i] - cfg.s[j]) * (cfg.s[i] - cfg.s[j]) *
                   std::exp(cfg.u[i] + cfg.u[j]);
  double bi = std::cosh(cfg.u[i]) + 0.5 * cfg.s[i] * cfg.s[i] * std::exp(cfg.u[i]);
  return {bij, bi};
}

/// M_ii = h_i e^{u_i} + sum_k W_ik e^{u_i+u_k}, M_ij = -W_ij e^{u_i+u_j}.
inline std::vector<double> coupling_matrix(const ModelSpec& spec, const FieldConfig& cfg) {
  const std::size_t n = spec.size();
  std::vector<double> eu(n);
  for (std::size_t i = 0; i < n; ++i) eu[i] = std::exp(cfg.u[i]);
  std::vector<double> m(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double diag = spec.h[i] * eu[i];
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      double wik = spec.weight(i, k) * eu[i] * eu[k];
      diag += wik;
      m[i * n + k] = -wik;
    }
    m[i * n + i] = diag;
  }
  return m;
}

/// log det of a symmetric positive definite matrix by unpivoted Cholesky;
/// a tiny pivot signals a near-violation of the pinning invariant.
inline double spd_log_det(std::vector<double> m, std::size_t n) {
  double max_diag = 0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(m[i * n + i]));
  const double pivot_floor = 1e-30 * max_diag;
  double log_det = 0;
  for (std::size_t k = 0; k < n; ++k) {
    double pivot = m[k * n + k];
    for (std::size_t r = 0; r < k; ++r) pivot -= m[k * n + r] * m[k * n + r];
    if (!(pivot > pivot_floor) || !std::isfinite(pivot))
      throw NumericError("Cholesky pivot failure: matrix not positive definite");
    double l = std::sqrt(pivot);
    m[k * n + k] = l;
    log_det += 2.0 * std::log(l);
    for (std::size_t i = k + 1; i < n; ++i) {
      double v = m[i * n + k];
      for (std::size_t r = 0; r < k; ++r) v -= m[i * n + r] * m[k * n + r];
      m[i * n + k] = v / l;
    }
  }
  return log_det;
}

/// Log of the exact normalized density of (u, s).
inline double log_density(const ModelSpec& spec, const FieldConfig& cfg) {
  const std::size_t n = spec.size();
  if (cfg.u.size() != n || cfg.s.size() != n)
    throw std::invalid_argument("config size does not match model");
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(cfg.u[i]) > 700.0) throw std::range_error("u out of supported range");

  std::vector<double> eu(n);
  for (std::size_t i = 0; i < n; ++i) eu[i] = std::exp(cfg.u[i]);

  double action = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double wij = spec.weight(i, j);
      if (wij == 0) continue;
      double ds = cfg.s[i] - cfg.s[j];
      double bij_minus_1 =
          std::cosh(cfg.u[i] - cfg.u[j]) - 1.0 + 0.5 * ds * ds * eu[i] * eu[j];
      action -= wij * bij_minus_1;
    }
    double bi_minus_1 = std::cosh(cfg.u[i]) - 1.0 + 0.5 * cfg.s[i] * cfg.s[i] * eu[i];
    action -= spec.h[i] * bi_minus_1;
  }

  // in the far tail the coupling matrix can be positive definite yet so
  // ill-conditioned that the Cholesky pivots round to zero; the density
  // is zero beyond double precision there anyway (log det grows only
  // polynomially in u, the action decays exponentially)
  if (action < -5e3) return -std::numeric_limits<double>::infinity();

  double log_det = spd_log_det(coupling_matrix(spec, cfg), n);

  double sum_u = 0;
  for (double ui : cfg.u) sum_u += ui;
  return action + log_det - sum_u - static_cast<double>(n) * std::log(2.0 * M_PI);
}

/// Per-block observables of a leaf configuration along an antichain:
/// block means of e^{u} and of s e^{u}.
inline std::vector<std::pair<double, double>> block_observables(const FieldConfig& leaf_cfg,
                                                               const Antichain& a) {
  std::vector<std::pair<double, double>> out;
  out.reserve(a.members.size());
  for (const auto& j : a.members) {
    double m1 = 0, m2 = 0;
    std::size_t count = 0;
    for_each_block_leaf(j, a.ambient_height, [&](const TreeWord& leaf) {
      double e = std::exp(leaf_cfg.u.at(leaf.bits));
      m1 += e;
      m2 += leaf_cfg.s.at(leaf.bits) * e;
      ++count;
    });
    out.emplace_back(m1 / count, m2 / count);
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON serialization.

inline nlohmann::json pinning_to_json(const PinningSpec& pin) {
  nlohmann::json j;
  switch (pin.mode) {
    case PinningSpec::Mode::kUniform:
      j["mode"] = "uniform";
      j["epsilon"] = pin.epsilon;
      break;
    case PinningSpec::Mode::kPoint:
      j["mode"] = "point";
      j["epsilon"] = pin.epsilon;
      j["site"] = word_to_string(pin.site);
      break;
    case PinningSpec::Mode::kExplicit:
      j["mode"] = "explicit";
      j["values"] = pin.values;
      break;
  }
  return j;
}

inline PinningSpec pinning_from_json(const nlohmann::json& j) {
  PinningSpec pin;
  std::string mode = j.at("mode");
  if (mode == "uniform") {
    pin.mode = PinningSpec::Mode::kUniform;
    pin.epsilon = j.at("epsilon");
  } else if (mode == "point") {
    pin.mode = PinningSpec::Mode::kPoint;
    pin.epsilon = j.at("epsilon");
    pin.site = word_from_string(j.at("site"));
  } else if (mode == "explicit") {
    pin.mode = PinningSpec::Mode::kExplicit;
    pin.values = j.at("values").get<std::vector<double>>();
  } else {
    throw std::invalid_argument("unknown pinning mode: " + mode);
  }
  return pin;
}

inline nlohmann::json model_to_json(int tree_height, const std::vector<TreeWord>& vertices,
                                    const WeightProfile& w, const PinningSpec& pin) {
  nlohmann::json j;
  j["n"] = tree_height;
  std::vector<std::string> names;
  names.reserve(vertices.size());
  for (const auto& v : vertices) names.push_back(word_to_string(v));
  j["vertices"] = names;
  std::vector<double> profile;
  for (int l = 0; l <= tree_height; ++l) profile.push_back(w(l));
  j["w_profile"] = profile;
  j["pinning"] = pinning_to_json(pin);
  return j;
}

inline ModelSpec model_from_json(const nlohmann::json& j) {
  int n = j.at("n");
  std::vector<TreeWord> vertices;
  for (const auto& name : j.at("vertices")) vertices.push_back(word_from_string(name));
  WeightProfile w;
  w.kind = WeightProfile::Kind::kTable;
  w.table = j.at("w_profile").get<std::vector<double>>();
  PinningSpec pin = pinning_from_json(j.at("pinning"));
  Antichain a = Antichain::from(vertices, n);
  return effective_model(a, w, pin);
}

}  // namespace sigma

#endif  // SIGMA_MODEL_HPP_
