#ifndef SIGMA_SAMPLER_HPP_
#define SIGMA_SAMPLER_HPP_

// Samplers for the horospherical density: an adaptive random-walk
// Metropolis kernel for arbitrary specs, the exact one-site sampler built
// on the inverse Gaussian law, and chain diagnostics.

#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sigma/model.hpp"
#include "sigma/rng.hpp"
#include "sigma/stats.hpp"

namespace sigma {

struct SamplerConfig {
  std::uint64_t seed = 1;
  int chains = 4;
  long burn_in = 20000;
  long keep = 20000;       // kept samples per chain
  long thin = 10;          // kernel steps per kept sample
  double target_accept = 0.234;
  long adapt_window = 100; // sets the decay clock of the adaptation gain

  void validate() const {
    if (chains < 1 || keep < 1 || thin < 1 || burn_in < 0 || adapt_window < 1)
      throw std::invalid_argument("bad sampler configuration");
    if (!(target_accept > 0 && target_accept < 1))
      throw std::invalid_argument("target_accept must lie in (0,1)");
  }
};

// ---------------------------------------------------------------------------
// Inverse Gaussian IG(1, eps).

inline double inverse_gaussian_pdf(double eps, double t) {
  if (eps <= 0) throw std::domain_error("eps must be positive");
  if (t <= 0) throw std::domain_error("pdf needs t > 0");
  return std::sqrt(eps / (2.0 * M_PI * t * t * t)) *
         std::exp(-eps * (t - 1.0) * (t - 1.0) / (2.0 * t));
}

/// cdf of IG(1, eps); the e^{2 eps} Phi(-a) term is evaluated through
/// erfcx so large eps does not overflow.
inline double inverse_gaussian_cdf(double eps, double t) {
  if (eps <= 0) throw std::domain_error("eps must be positive");
  if (t <= 0) throw std::domain_error("cdf needs t > 0");
  double r = std::sqrt(eps / t);
  double first = normal_cdf(r * (t - 1.0));
  double a = r * (t + 1.0);
  // 2 eps - a^2 / 2 = -eps (t-1)^2 / (2 t) <= 0, no overflow
  double second = 0.5 * std::exp(2.0 * eps - 0.5 * a * a) * erfcx(a / std::sqrt(2.0));
  return std::min(1.0, first + second);
}

/// One draw from IG(1, eps) by the transformation-with-rejection method
/// (one squared Gaussian, one uniform).
inline double inverse_gaussian_sample(double eps, CounterRng& rng) {
  if (eps <= 0) throw std::domain_error("eps must be positive");
  double g = rng.normal();
  double v = g * g;
  double x = 1.0 + (v - std::sqrt(v * (v + 4.0 * eps))) / (2.0 * eps);
  if (rng.uniform() <= 1.0 / (1.0 + x)) return x;
  return 1.0 / x;
}

// ---------------------------------------------------------------------------
// Sample containers and diagnostics.

struct SampleBatch {
  std::size_t n_vertices = 0;
  long kept_per_chain = 0;
  int chains = 0;
  std::vector<FieldConfig> configs;  // chain-major: configs[c * kept + k]
  std::vector<double> accept_rate;   // per chain
  std::vector<double> ess;           // per default observable (u then s)
  std::vector<double> rhat;

  const FieldConfig& at(int chain, long k) const {
    return configs[static_cast<std::size_t>(chain) * kept_per_chain + k];
  }

  /// One scalar observable as a chains-by-samples matrix.
  std::vector<std::vector<double>> observable(
      const std::function<double(const FieldConfig&)>& f) const {
    std::vector<std::vector<double>> out(chains);
    for (int c = 0; c < chains; ++c) {
      out[c].reserve(kept_per_chain);
      for (long k = 0; k < kept_per_chain; ++k) out[c].push_back(f(at(c, k)));
    }
    return out;
  }
};

struct Diagnostics {
  std::vector<double> ess;
  std::vector<double> rhat;
  bool available = false;
};

inline Diagnostics diagnostics(
    const SampleBatch& batch,
    const std::vector<std::function<double(const FieldConfig&)>>& observables) {
  Diagnostics d;
  if (batch.kept_per_chain < 8) return d;  // unavailable, not an error
  for (const auto& f : observables) {
    auto m = batch.observable(f);
    d.ess.push_back(ess_total(m));
    d.rhat.push_back(batch.chains >= 2 ? split_rhat(m) : std::nan(""));
  }
  d.available = true;
  return d;
}

// ---------------------------------------------------------------------------
// Random-walk Metropolis kernel.

namespace detail {

/// One chain.  Proposals update every coordinate of (u, s) at once with
/// per-coordinate base scales; a single global log-scale is adapted
/// toward the target acceptance during burn-in and frozen afterwards.
/// Lower Cholesky factor in place; the upper triangle is zeroed.
inline void cholesky_lower(std::vector<double>& a, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = j; i < n; ++i) {
      double sum = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) sum -= a[i * n + k] * a[j * n + k];
      if (i == j) {
        if (!(sum > 0)) throw NumericError("matrix not positive definite in sampler");
        a[j * n + j] = std::sqrt(sum);
      } else {
        a[i * n + j] = sum / a[j * n + j];
      }
    }
    for (std::size_t i = 0; i < j; ++i) a[i * n + j] = 0.0;
  }
}

class McmcChain {
 public:
  McmcChain(const ModelSpec& spec, const SamplerConfig& cfg, std::uint64_t stream)
      : spec_(spec), cfg_(cfg), rng_(cfg.seed, stream) {
    const std::size_t n = spec.size();
    state_.u.assign(n, 0.0);
    state_.s.assign(n, 0.0);
    log_pi_ = log_density(spec_, state_);
    if (!std::isfinite(log_pi_))
      throw std::runtime_error("initialization: log-density not finite at the origin");
    // Proposal covariance A^{-1} with A = diag(h) + Laplacian(W), the Gaussian
    // shape of the target at the origin. An isotropic walk mixes the softly
    // pinned collective mode in O(kappa) steps where kappa is the condition
    // number of A; the preconditioned walk removes that factor.
    std::vector<double> a(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double diag = spec.h[i];
      for (std::size_t k = 0; k < n; ++k) {
        double wik = spec.weight(i, k);
        diag += wik;
        a[i * n + k] -= wik;
      }
      a[i * n + i] += diag;
    }
    chol_ = a;
    cholesky_lower(chol_, n);
    scratch_.resize(n);
    proposal_.u.resize(n);
    proposal_.s.resize(n);
  }

  void step(bool adapt) {
    const std::size_t n = spec_.size();
    double f = std::exp(log_scale_) * 2.38 / std::sqrt(2.0 * n);
    bool in_range = true;
    // x = L^{-T} z has covariance A^{-1}; the same factor serves both blocks
    auto precond_step = [&](std::vector<double>& out, const std::vector<double>& from) {
      for (std::size_t i = 0; i < n; ++i) scratch_[i] = rng_.normal();
      for (std::size_t ii = n; ii-- > 0;) {
        double sum = scratch_[ii];
        for (std::size_t k = ii + 1; k < n; ++k) sum -= chol_[k * n + ii] * scratch_[k];
        scratch_[ii] = sum / chol_[ii * n + ii];
        out[ii] = from[ii] + f * scratch_[ii];
      }
    };
    precond_step(proposal_.u, state_.u);
    precond_step(proposal_.s, state_.s);
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(proposal_.u[i]) > 300.0) in_range = false;
    double alpha = 0.0;
    if (in_range) {
      double log_pi_prop;
      try {
        log_pi_prop = log_density(spec_, proposal_);
      } catch (const NumericError& e) {
        throw NumericError(std::string(e.what()) + dump_state());
      }
      double delta = log_pi_prop - log_pi_;
      alpha = delta >= 0 ? 1.0 : std::exp(delta);
      if (rng_.uniform() < alpha) {
        state_.u.swap(proposal_.u);
        state_.s.swap(proposal_.s);
        log_pi_ = log_pi_prop;
        ++accepted_;
      }
    }
    ++steps_;
    if (adapt) {
      ++adapt_steps_;
      double gain = std::pow(1.0 + static_cast<double>(adapt_steps_) / cfg_.adapt_window, -0.7);
      log_scale_ += gain * (alpha - cfg_.target_accept);
    }
    refresh_s();
  }

  /// Exact conditional update: s | u is N(0, M(u)^{-1}) because s enters the
  /// density only through the quadratic form s^T M s / 2. Composing the
  /// Metropolis kernel with this Gibbs move keeps the target invariant and
  /// removes the funnel between u and the conditional scale of s.
  void refresh_s() {
    const std::size_t n = spec_.size();
    std::vector<double> m = coupling_matrix(spec_, state_);
    cholesky_lower(m, n);
    double q_old = 0.0, q_new = 0.0;
    for (std::size_t i = 0; i < n; ++i) scratch_[i] = rng_.normal();
    // q = s^T M s equals |L^T s|^2, already available for the new draw
    for (std::size_t i = 0; i < n; ++i) q_new += scratch_[i] * scratch_[i];
    for (std::size_t j = 0; j < n; ++j) {
      double row = 0.0;
      for (std::size_t i = j; i < n; ++i) row += m[i * n + j] * state_.s[i];
      q_old += row * row;
    }
    for (std::size_t ii = n; ii-- > 0;) {
      double sum = scratch_[ii];
      for (std::size_t k = ii + 1; k < n; ++k) sum -= m[k * n + ii] * scratch_[k];
      scratch_[ii] = sum / m[ii * n + ii];
      state_.s[ii] = scratch_[ii];
    }
    log_pi_ += 0.5 * (q_old - q_new);
  }

  void reset_accept_counter() {
    accepted_ = 0;
    steps_ = 0;
  }
  double accept_rate() const { return steps_ ? static_cast<double>(accepted_) / steps_ : 0.0; }
  const FieldConfig& state() const { return state_; }

 private:
  std::string dump_state() const {
    std::ostringstream os;
    os << "; chain state u=[";
    for (std::size_t i = 0; i < state_.u.size(); ++i) os << (i ? "," : "") << state_.u[i];
    os << "] s=[";
    for (std::size_t i = 0; i < state_.s.size(); ++i) os << (i ? "," : "") << state_.s[i];
    os << "]";
    return os.str();
  }

  const ModelSpec& spec_;
  const SamplerConfig& cfg_;
  CounterRng rng_;
  FieldConfig state_, proposal_;
  double log_pi_ = 0;
  std::vector<double> chol_, scratch_;
  double log_scale_ = 0;
  long accepted_ = 0, steps_ = 0, adapt_steps_ = 0;
};

}  // namespace detail

/// Runs the chains concurrently, delivering each kept configuration to
/// `sink(chain, kept_index, config)` from that chain's own thread; the
/// sink must only touch per-chain storage.  Returns per-chain acceptance
/// rates measured after burn-in.
template <class Sink>
std::vector<double> run_mcmc(const ModelSpec& spec, const SamplerConfig& cfg, Sink&& sink) {
  cfg.validate();
  spec.validate();
  auto run_one = [&](int chain) {
    detail::McmcChain mc(spec, cfg, static_cast<std::uint64_t>(chain));
    for (long t = 0; t < cfg.burn_in; ++t) mc.step(true);
    mc.reset_accept_counter();
    for (long k = 0; k < cfg.keep; ++k) {
      for (long t = 0; t < cfg.thin; ++t) mc.step(false);
      sink(chain, k, mc.state());
    }
    return mc.accept_rate();
  };
  std::vector<std::future<double>> futures;
  futures.reserve(cfg.chains);
  for (int c = 1; c < cfg.chains; ++c)
    futures.push_back(std::async(std::launch::async, run_one, c));
  std::vector<double> rates(cfg.chains);
  rates[0] = run_one(0);
  for (int c = 1; c < cfg.chains; ++c) rates[c] = futures[c - 1].get();
  return rates;
}

inline SampleBatch mcmc_sample(const ModelSpec& spec, const SamplerConfig& cfg) {
  SampleBatch batch;
  batch.n_vertices = spec.size();
  batch.kept_per_chain = cfg.keep;
  batch.chains = cfg.chains;
  batch.configs.assign(static_cast<std::size_t>(cfg.chains) * cfg.keep, FieldConfig{});
  batch.accept_rate = run_mcmc(spec, cfg, [&](int chain, long k, const FieldConfig& s) {
    batch.configs[static_cast<std::size_t>(chain) * cfg.keep + k] = s;
  });
  std::vector<std::function<double(const FieldConfig&)>> obs;
  for (std::size_t i = 0; i < spec.size(); ++i)
    obs.emplace_back([i](const FieldConfig& c) { return c.u[i]; });
  for (std::size_t i = 0; i < spec.size(); ++i)
    obs.emplace_back([i](const FieldConfig& c) { return c.s[i]; });
  Diagnostics d = diagnostics(batch, obs);
  batch.ess = d.ess;
  batch.rhat = d.rhat;
  return batch;
}

/// Exact sampler for the one-site model with pinning eps: e^u is
/// IG(1, eps) and s given u is centered Gaussian with variance
/// 1 / (eps e^u).
inline SampleBatch exact_single_site_sample(double eps, long count, std::uint64_t seed,
                                            int chains = 1) {
  if (eps <= 0) throw std::domain_error("eps must be positive");
  if (count < 1 || chains < 1) throw std::invalid_argument("count and chains must be positive");
  SampleBatch batch;
  batch.n_vertices = 1;
  batch.kept_per_chain = count;
  batch.chains = chains;
  batch.configs.reserve(static_cast<std::size_t>(chains) * count);
  for (int c = 0; c < chains; ++c) {
    CounterRng rng(seed, static_cast<std::uint64_t>(c));
    for (long k = 0; k < count; ++k) {
      double t = inverse_gaussian_sample(eps, rng);
      FieldConfig cfg;
      cfg.u = {std::log(t)};
      cfg.s = {rng.normal() / std::sqrt(eps * t)};
      batch.configs.push_back(std::move(cfg));
    }
  }
  batch.accept_rate.assign(chains, 1.0);
  Diagnostics d = diagnostics(
      batch, {[](const FieldConfig& c) { return c.u[0]; },
              [](const FieldConfig& c) { return c.s[0]; }});
  batch.ess = d.ess;
  batch.rhat = d.rhat;
  return batch;
}

}  // namespace sigma

#endif  // SIGMA_SAMPLER_HPP_
