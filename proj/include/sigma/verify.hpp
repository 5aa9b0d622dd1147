#ifndef SIGMA_VERIFY_HPP_
#define SIGMA_VERIFY_HPP_

// Verification checks: the reduction identity, the inverse-Gaussian block
// mean law, the alignment tail bound, the beta summability assessment,
// the delta schedule with its threshold M, and the tightness sweep.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <future>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "sigma/model.hpp"
#include "sigma/sampler.hpp"
#include "sigma/stats.hpp"
#include "sigma/tree.hpp"

namespace sigma {

// ---------------------------------------------------------------------------
// Reports.

struct CheckStatistic {
  std::string name;
  double value = 0;
  double threshold = 0;
  bool pass = false;
};

struct VerificationReport {
  std::string check_id;
  nlohmann::json inputs;
  std::vector<CheckStatistic> statistics;
  bool inconclusive = false;
  double runtime_seconds = 0;
  nlohmann::json extra;

  bool passed() const {
    if (inconclusive) return false;
    for (const auto& s : statistics)
      if (!s.pass) return false;
    return true;
  }

  std::string verdict() const {
    if (inconclusive) return "inconclusive";
    return passed() ? "pass" : "fail";
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["schema"] = "h22_report_v1";
    j["check_id"] = check_id;
    j["inputs"] = inputs;
    j["verdict"] = verdict();
    j["runtime_seconds"] = runtime_seconds;
    nlohmann::json stats = nlohmann::json::array();
    for (const auto& s : statistics) {
      stats.push_back({{"name", s.name},
                       {"value", s.value},
                       {"threshold", s.threshold},
                       {"pass", s.pass}});
    }
    j["statistics"] = stats;
    if (!extra.is_null()) j["extra"] = extra;
    return j;
  }
};

namespace detail {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Beta sequence and summability.

enum class Summability { kCertifiedConvergent, kCertifiedDivergent, kNumericallyPlausible, kInconclusive };

inline std::string to_string(Summability s) {
  switch (s) {
    case Summability::kCertifiedConvergent: return "certified-convergent";
    case Summability::kCertifiedDivergent: return "certified-divergent";
    case Summability::kNumericallyPlausible: return "numerically-plausible";
    case Summability::kInconclusive: return "inconclusive";
  }
  return "?";
}

struct BetaSequence {
  std::vector<double> beta;          // beta_l = 2^{2l+1} w(l+2)
  std::vector<double> terms;         // sqrt(log max(beta_l, e) / beta_l)
  std::vector<double> partial_sums;
  Summability assessment = Summability::kInconclusive;
  double growth_ratio = 0;           // certified lower bound on beta_{l+1}/beta_l, or 0
  double tail_bound = 0;             // certified bound on the sum beyond the cutoff
};

/// Certified lower bound on beta_{l+1} / beta_l valid for every l >= from,
/// or 0 when no closed form is available.
inline double beta_growth_lower_bound(const WeightProfile& w, int from) {
  switch (w.kind) {
    case WeightProfile::Kind::kConst: return 4.0;
    case WeightProfile::Kind::kGeom: return 4.0 * w.r;
    case WeightProfile::Kind::kPoly:
      // ratio 4 ((l+3)/(l+4))^p increases in l
      return 4.0 * std::pow((from + 3.0) / (from + 4.0), w.p);
    case WeightProfile::Kind::kTable: return 0.0;
  }
  return 0.0;
}

inline BetaSequence beta_sequence(const WeightProfile& w, int cutoff) {
  if (cutoff < 1) throw std::invalid_argument("cutoff must be positive");
  BetaSequence bs;
  double acc = 0;
  for (int l = 0; l < cutoff; ++l) {
    double b = std::exp2(2 * l + 1) * w(l + 2);
    if (!(b > 0)) {
      bs.assessment = Summability::kInconclusive;  // a zero weight kills the construction
      return bs;
    }
    bs.beta.push_back(b);
    double term = std::sqrt(std::log(std::max(b, std::exp(1.0))) / b);
    bs.terms.push_back(term);
    acc += term;
    bs.partial_sums.push_back(acc);
  }

  double gamma = beta_growth_lower_bound(w, cutoff);
  bs.growth_ratio = gamma;
  if (gamma > 1.0) {
    // terms <= beta^{-1/4} once beta >= 5 (sqrt(log x) <= x^{1/4} there),
    // and beta grows at least geometrically with ratio gamma
    double b_next = bs.beta.back() * gamma;
    if (b_next >= 5.0) {
      bs.tail_bound = std::pow(b_next, -0.25) / (1.0 - std::pow(gamma, -0.25));
      bs.assessment = Summability::kCertifiedConvergent;
      return bs;
    }
  }
  if (w.kind != WeightProfile::Kind::kTable && gamma <= 1.0) {
    // beta is non-increasing from the cutoff on, so the terms do not decay
    bs.assessment = Summability::kCertifiedDivergent;
    return bs;
  }
  // tabulated profile: report the numeric trend only
  bool decaying = bs.terms.size() >= 4 &&
                  bs.terms.back() < 0.5 * bs.terms[bs.terms.size() / 2] &&
                  bs.terms.back() < 1e-3;
  bs.assessment = decaying ? Summability::kNumericallyPlausible : Summability::kInconclusive;
  return bs;
}

// ---------------------------------------------------------------------------
// Delta schedule and the threshold M.

struct DeltaSchedule {
  double rho = 0;
  int l0 = -1;
  int l1 = -1;
  std::vector<double> delta;   // delta_l, l = 0..cutoff-1
  double delta_pp0 = 0;        // the d = 1 term
  double M = 0;
  bool tail_certified = false;
  // recorded condition values
  double term_sum = 0;         // sum beta_l delta_l e^{-beta_l delta_l + 1} incl. tail
  double arcosh_sum = 0;       // sum arcosh(1 + delta_l) incl. tail bound
  Summability assessment = Summability::kInconclusive;
};

namespace detail {

/// Smallest x > 1 with x e^{1-x} <= target, by bisection.
inline double solve_term_budget(double target) {
  if (!(target > 0 && target < 1)) throw std::domain_error("target must be in (0,1)");
  double lo = 1.0, hi = 2.0;
  while (hi * std::exp(1.0 - hi) > target) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid * std::exp(1.0 - mid) > target) lo = mid;
    else hi = mid;
  }
  return hi;
}

/// delta-tilde_l when defined (needs log log sqrt(beta_l) > 0), else NaN.
inline double delta_tilde(double beta) {
  double ls = std::log(std::sqrt(beta));
  if (!(ls > 1.0)) return std::nan("");
  return (1.0 + ls + 1.5 * std::log(ls)) / beta;
}

/// Term beta delta-tilde e^{-beta delta-tilde + 1}.
inline double tilde_term(double beta) {
  double dt = delta_tilde(beta);
  double x = beta * dt;
  return x * std::exp(1.0 - x);
}

}  // namespace detail

/// Deterministic schedule construction; throws std::domain_error when the
/// summability assessment refuses.
inline DeltaSchedule delta_schedule(double rho, const WeightProfile& w, int cutoff = 64) {
  if (!(rho > 0 && rho < 1)) throw std::domain_error("rho must lie in (0,1)");
  DeltaSchedule sch;
  sch.rho = rho;
  BetaSequence bs = beta_sequence(w, cutoff);
  sch.assessment = bs.assessment;
  if (bs.assessment == Summability::kCertifiedDivergent)
    throw std::domain_error("summability fails: the beta series diverges for this profile");
  if (bs.assessment != Summability::kCertifiedConvergent)
    throw std::domain_error("summability not certified for this profile (" +
                            to_string(bs.assessment) + "); refusing to build a schedule");
  sch.tail_certified = true;
  const double gamma = bs.growth_ratio;
  const auto& beta = bs.beta;

  for (int l = 0; l < cutoff; ++l) {
    if (std::isfinite(detail::delta_tilde(beta[l]))) {
      sch.l0 = l;
      break;
    }
  }
  if (sch.l0 < 0) throw std::domain_error("cutoff too small: delta-tilde never defined");

  // certified bound on sum_{l >= start} of the tilde terms:
  //   x e^{1-x} <= 2 e^{-x/2} and x_l grows by >= log(gamma)/2 per step
  auto tilde_tail = [&](int start) {
    double b = (start < cutoff) ? beta[start] : beta.back() * std::pow(gamma, start - cutoff + 1);
    double x = b * detail::delta_tilde(b);
    double step = 0.5 * std::log(gamma);
    return 2.0 * std::exp(-0.5 * x) / (1.0 - std::exp(-0.5 * step));
  };

  // l1: first index >= l0 whose tilde-term tail is below rho / 4
  for (int l = sch.l0; l < cutoff; ++l) {
    double sum = 0;
    for (int k = l; k < cutoff; ++k) sum += detail::tilde_term(beta[k]);
    sum += tilde_tail(cutoff);
    if (sum < rho / 4.0) {
      sch.l1 = l;
      break;
    }
  }
  if (sch.l1 < 0) throw std::domain_error("cutoff too small to certify the tilde tail");

  // small-l values: each term pushed below rho / (4 l1)
  double x_small = (sch.l1 > 0) ? detail::solve_term_budget(rho / (4.0 * sch.l1)) : 0.0;
  sch.delta.resize(cutoff);
  for (int l = 0; l < cutoff; ++l) {
    if (l >= sch.l1) {
      sch.delta[l] = detail::delta_tilde(beta[l]);
    } else {
      double dt = detail::delta_tilde(beta[l]);
      double small = x_small / beta[l];
      sch.delta[l] = std::isfinite(dt) ? std::max(dt, small) : small;
    }
  }

  // recorded condition values
  sch.term_sum = 0;
  for (int l = 0; l < cutoff; ++l) {
    double x = beta[l] * sch.delta[l];
    sch.term_sum += x * std::exp(1.0 - x);
  }
  sch.term_sum += tilde_tail(cutoff);

  // arcosh(1 + delta) <= sqrt(2 delta); for l >= cutoff,
  // delta_l <= (1 + 2.5 L) / beta with sqrt(max(L,1)) <= beta^{1/4}
  auto arcosh_tail = [&](int start) {
    double b = (start < cutoff) ? beta[start] : beta.back() * std::pow(gamma, start - cutoff + 1);
    double head = std::sqrt(7.0) * std::pow(b, -0.25);
    return head / (1.0 - std::pow(gamma, -0.25));
  };
  sch.arcosh_sum = 0;
  for (int l = 0; l < cutoff; ++l) sch.arcosh_sum += std::acosh(1.0 + sch.delta[l]);
  sch.arcosh_sum += arcosh_tail(cutoff);

  // d = 1 term: minimal x with x e^{1-x} < rho at beta''_0 = w(1)
  double beta_pp0 = w(1);
  if (!(beta_pp0 > 0)) throw std::domain_error("w(1) must be positive");
  sch.delta_pp0 = detail::solve_term_budget(rho) / beta_pp0;

  // M: supremum over d' >= 2 of the arcosh expression, plus the d' = 1 term
  double sup = std::acosh(1.0 + sch.delta_pp0);
  double prefix = 0;  // 2 sum_{l=0}^{d'-3} arcosh(1 + delta_l)
  for (int dp = 2; dp <= cutoff; ++dp) {
    if (dp >= 3) prefix += 2.0 * std::acosh(1.0 + sch.delta[dp - 3]);
    sup = std::max(sup, prefix + std::acosh(1.0 + 2.0 * sch.delta[dp - 2]));
  }
  // d' beyond the cutoff: full prefix plus certified tail plus a vanishing
  // last term bounded by its value at the cutoff
  double beyond = prefix + 2.0 * std::acosh(1.0 + sch.delta[cutoff - 2]) +
                  2.0 * arcosh_tail(cutoff) + std::acosh(1.0 + 2.0 * sch.delta[cutoff - 1]);
  sch.M = std::max(sup, beyond);

  // the construction must satisfy its own conditions
  for (int l = 0; l < cutoff; ++l)
    if (!(beta[l] * sch.delta[l] > 1.0)) throw std::logic_error("schedule violates beta delta > 1");
  if (!(sch.term_sum < rho / 2.0)) throw std::logic_error("schedule violates the rho/2 budget");
  return sch;
}

inline nlohmann::json schedule_to_json(const DeltaSchedule& s) {
  nlohmann::json j;
  j["schema"] = "h22_report_v1";
  j["rho"] = s.rho;
  j["l0"] = s.l0;
  j["l1"] = s.l1;
  j["delta"] = s.delta;
  j["delta_pp0"] = s.delta_pp0;
  j["M"] = s.M;
  j["tail_certified"] = s.tail_certified;
  j["term_sum"] = s.term_sum;
  j["arcosh_sum"] = s.arcosh_sum;
  j["assessment"] = to_string(s.assessment);
  return j;
}

// ---------------------------------------------------------------------------
// Reduction identity check.

struct ReductionOptions {
  double alpha = 0.01;
  int bootstrap_resamples = 1000;
  double weight_corruption = 1.0;  // negative control: scale effective weights
};

/// Samples the full leaf model and the effective model on the (p, q)
/// antichain and compares the joint block-observable laws.
inline VerificationReport check_reduction(int tree_height, const TreeWord& p, const TreeWord& q,
                                          const WeightProfile& w, const PinningSpec& pin,
                                          const SamplerConfig& cfg,
                                          const ReductionOptions& opt = {},
                                          std::vector<double>* gap_full_out = nullptr,
                                          std::vector<double>* gap_eff_out = nullptr) {
  detail::Stopwatch clock;
  if (tree_height > 6) throw std::domain_error("full model intractable beyond height 6");
  Antichain a = pq_antichain(p, q);
  ModelSpec full = leaf_model(tree_height, w, pin);
  ModelSpec eff = effective_model(a, w, pin);
  if (opt.weight_corruption != 1.0)
    for (auto& wij : eff.W) wij *= opt.weight_corruption;

  const std::size_t m = a.members.size();
  const std::size_t n_marg = 2 * m + 1;  // block means of e^u and s e^u, and u_p - u_q

  // chain-major storage: obs[marginal][chain][sample]
  auto alloc = [&](int chains, long keep) {
    std::vector<std::vector<std::vector<double>>> v(
        n_marg, std::vector<std::vector<double>>(chains));
    for (auto& per_chain : v)
      for (auto& c : per_chain) c.reserve(keep);
    return v;
  };
  auto obs_full = alloc(cfg.chains, cfg.keep);
  auto obs_eff = alloc(cfg.chains, cfg.keep);

  run_mcmc(full, cfg, [&](int chain, long, const FieldConfig& s) {
    auto blocks = block_observables(s, a);
    for (std::size_t k = 0; k < m; ++k) {
      obs_full[2 * k][chain].push_back(blocks[k].first);
      obs_full[2 * k + 1][chain].push_back(blocks[k].second);
    }
    obs_full[2 * m][chain].push_back(s.u[p.bits] - s.u[q.bits]);
  });
  const int ip = eff.index_of(p), iq = eff.index_of(q);
  run_mcmc(eff, cfg, [&](int chain, long, const FieldConfig& s) {
    for (std::size_t k = 0; k < m; ++k) {
      double eu = std::exp(s.u[k]);
      obs_eff[2 * k][chain].push_back(eu);
      obs_eff[2 * k + 1][chain].push_back(s.s[k] * eu);
    }
    obs_eff[2 * m][chain].push_back(s.u[ip] - s.u[iq]);
  });

  VerificationReport rep;
  rep.check_id = "reduction";
  rep.inputs = {{"tree_height", tree_height},
                {"p", word_to_string(p)},
                {"q", word_to_string(q)},
                {"w", w.describe()},
                {"pinning", pinning_to_json(pin)},
                {"seed", cfg.seed},
                {"weight_corruption", opt.weight_corruption}};

  const double alpha_marg = opt.alpha / n_marg;  // Bonferroni across marginals
  CounterRng boot_rng(cfg.seed, 0xB007);
  for (std::size_t k = 0; k < n_marg; ++k) {
    TwoSampleResult r = two_sample_ks_test(obs_full[k], obs_eff[k], alpha_marg,
                                           opt.bootstrap_resamples, boot_rng);
    std::string name = (k == 2 * m) ? "ks_u_p_minus_u_q"
                                    : ((k % 2 == 0) ? "ks_block_m1_" : "ks_block_m2_") +
                                          word_to_string(a.members[k / 2]);
    rep.statistics.push_back({name, r.statistic, r.threshold, r.pass});
  }

  // joint law: energy distance on per-chain rows thinned by the slowest marginal
  auto joint_rows = [&](const std::vector<std::vector<std::vector<double>>>& obs) {
    std::vector<double> rows;
    for (int c = 0; c < cfg.chains; ++c) {
      double tau = 1.0;
      for (std::size_t k = 0; k < 2 * m; ++k) tau = std::max(tau, distribution_tau(obs[k][c]));
      auto stride = static_cast<std::size_t>(std::ceil(tau));
      for (std::size_t t = 0; t < obs[0][c].size(); t += stride)
        for (std::size_t k = 0; k < 2 * m; ++k) rows.push_back(obs[k][c][t]);
    }
    return rows;
  };
  TwoSampleResult er = energy_distance_test(joint_rows(obs_full), joint_rows(obs_eff), 2 * m,
                                            opt.alpha, 200, boot_rng);
  rep.statistics.push_back({"energy_joint", er.statistic, er.threshold, er.pass});

  if (gap_full_out) *gap_full_out = concat(obs_full[2 * m]);
  if (gap_eff_out) *gap_eff_out = concat(obs_eff[2 * m]);
  rep.runtime_seconds = clock.seconds();
  return rep;
}

// ---------------------------------------------------------------------------
// Block mean law and super Laplace transform.

inline VerificationReport check_block_mean_law(int tree_height, const WeightProfile& w, double eps,
                                               const SamplerConfig& cfg, double alpha = 0.01,
                                               const std::vector<double>& laplace_b = {-0.5, -1.0,
                                                                                       -2.0},
                                               std::vector<double>* means_out = nullptr) {
  detail::Stopwatch clock;
  if (eps <= 0) throw std::domain_error("eps must be positive");
  const double n_sites = std::exp2(tree_height);

  std::vector<std::vector<double>> means(cfg.chains);
  if (tree_height == 0) {
    SampleBatch batch = exact_single_site_sample(eps, cfg.keep, cfg.seed, cfg.chains);
    for (int c = 0; c < cfg.chains; ++c) {
      means[c].reserve(cfg.keep);
      for (long k = 0; k < cfg.keep; ++k) means[c].push_back(std::exp(batch.at(c, k).u[0]));
    }
  } else {
    PinningSpec pin;
    pin.mode = PinningSpec::Mode::kUniform;
    pin.epsilon = eps / n_sites;
    ModelSpec spec = leaf_model(tree_height, w, pin);
    for (auto& c : means) c.reserve(cfg.keep);
    run_mcmc(spec, cfg, [&](int chain, long, const FieldConfig& s) {
      double acc = 0;
      for (double ui : s.u) acc += std::exp(ui);
      means[chain].push_back(acc / n_sites);
    });
  }

  VerificationReport rep;
  rep.check_id = "block_mean_law";
  rep.inputs = {{"tree_height", tree_height}, {"w", w.describe()}, {"eps", eps}, {"seed", cfg.seed}};

  TwoSampleResult ks = one_sample_ks_test(
      means, [eps](double t) { return t > 0 ? inverse_gaussian_cdf(eps, t) : 0.0; }, alpha);
  rep.statistics.push_back({"ks_vs_ig", ks.statistic, ks.threshold, ks.pass});
  rep.extra["ess"] = ks.n_eff_a;

  // Laplace transform of the mean against the closed form
  for (double b : laplace_b) {
    double predicted = std::exp(eps - std::sqrt(eps * eps - 2.0 * eps * b));
    double acc = 0, acc2 = 0;
    std::size_t total = 0;
    for (const auto& c : means)
      for (double t : c) {
        double v = std::exp(b * t);
        acc += v;
        acc2 += v * v;
        ++total;
      }
    double mean = acc / total;
    double var = std::max(0.0, acc2 / total - mean * mean);
    double se = std::sqrt(var / std::max(1.0, ks.n_eff_a));
    std::ostringstream name;
    name << "laplace_b_" << b;
    rep.statistics.push_back({name.str(), std::abs(mean - predicted), 3.0 * se,
                              std::abs(mean - predicted) <= 3.0 * se});
  }
  if (means_out) *means_out = concat(means);
  rep.runtime_seconds = clock.seconds();
  return rep;
}

// ---------------------------------------------------------------------------
// Alignment tail bound.

inline VerificationReport check_alignment_bound(const ModelSpec& spec, std::size_t i, std::size_t j,
                                                const std::vector<double>& delta_grid,
                                                const SamplerConfig& cfg, double slack = 0.0,
                                                double z = 2.0) {
  detail::Stopwatch clock;
  double wij = spec.weight(i, j);
  if (!(wij > 0)) throw std::domain_error("edge weight must be positive");
  for (double d : delta_grid)
    if (!(wij * d > 1.0)) throw std::domain_error("grid requires W_ij delta > 1");

  std::vector<std::vector<double>> bij(cfg.chains);
  for (auto& c : bij) c.reserve(cfg.keep);
  run_mcmc(spec, cfg, [&](int chain, long, const FieldConfig& s) {
    bij[chain].push_back(b_terms(s, i, j).first);
  });

  VerificationReport rep;
  rep.check_id = "alignment_bound";
  rep.inputs = {{"W_ij", wij}, {"i", i}, {"j", j}, {"delta_grid", delta_grid}, {"seed", cfg.seed}};
  double ess = ess_total(bij);
  rep.extra["ess"] = ess;

  std::size_t total = 0;
  for (const auto& c : bij) total += c.size();
  for (double d : delta_grid) {
    std::size_t exceed = 0;
    for (const auto& c : bij)
      for (double b : c)
        if (b >= 1.0 + d) ++exceed;
    // effective count of exceedances scaled by ESS / total
    double eff_exceed = static_cast<double>(exceed) * ess / total;
    double upper = wilson_upper(eff_exceed, ess, z);
    double bound = wij * d * std::exp(-(wij * d - 1.0)) + slack;
    std::ostringstream name;
    name << "tail_delta_" << d;
    rep.statistics.push_back({name.str(), upper, bound, upper <= bound});
  }
  rep.runtime_seconds = clock.seconds();
  return rep;
}

// ---------------------------------------------------------------------------
// Tightness sweep.

struct SweepCell {
  int tree_height = 0;
  double eps = 0;
  std::string mode;  // "U" or "1P"
  double M = 0;
  double p_hat = 0;
  double ci_upper = 0;
  double ess = 0;
  bool pass = false;
  std::vector<double> gap_sample;  // downsampled |u_p - u_q| stream, for plots
};

struct SweepResult {
  VerificationReport report;
  std::vector<SweepCell> cells;
};

/// Worst-case leaf pair at the maximal hierarchical distance d = N.
inline std::pair<TreeWord, TreeWord> worst_case_pair(int tree_height) {
  TreeWord p = make_word(0, tree_height);
  TreeWord q = make_word(1u << (tree_height - 1), tree_height);
  return {p, q};
}

inline SweepResult tightness_sweep(const std::vector<int>& heights,
                                   const std::vector<double>& eps_grid,
                                   const std::vector<std::string>& modes, const WeightProfile& w,
                                   double threshold_m, double rho, const SamplerConfig& cfg,
                                   int jobs = 0) {
  detail::Stopwatch clock;
  if (beta_sequence(w, 32).assessment != Summability::kCertifiedConvergent) {
    SweepResult sr;
    sr.report.check_id = "tightness";
    sr.report.inconclusive = true;
    sr.report.extra["reason"] = "summability not certified for this profile";
    return sr;
  }
  struct Task {
    int n;
    double eps;
    std::string mode;
  };
  std::vector<Task> tasks;
  for (int n : heights)
    for (double eps : eps_grid)
      for (const auto& mode : modes) tasks.push_back({n, eps, mode});

  auto run_cell = [&](const Task& t) {
    auto [p, q] = worst_case_pair(t.n);
    PinningSpec pin;
    if (t.mode == "U") {
      pin.mode = PinningSpec::Mode::kUniform;
      pin.epsilon = t.eps;
    } else if (t.mode == "1P") {
      pin.mode = PinningSpec::Mode::kPoint;
      pin.epsilon = t.eps;
      pin.site = p;
    } else {
      throw std::invalid_argument("unknown pinning mode: " + t.mode);
    }
    Antichain a = pq_antichain(p, q);
    ModelSpec spec = effective_model(a, w, pin);
    const int ip = spec.index_of(p), iq = spec.index_of(q);

    SamplerConfig cell_cfg = cfg;
    cell_cfg.seed = CounterRng::mix(cfg.seed ^ CounterRng::mix(
        (static_cast<std::uint64_t>(t.n) << 32) ^ std::hash<std::string>{}(t.mode) ^
        std::hash<double>{}(t.eps)));
    std::vector<std::vector<double>> gap(cell_cfg.chains);
    for (auto& c : gap) c.reserve(cell_cfg.keep);
    run_mcmc(spec, cell_cfg, [&](int chain, long, const FieldConfig& s) {
      gap[chain].push_back(std::abs(s.u[ip] - s.u[iq]));
    });

    SweepCell cell;
    cell.tree_height = t.n;
    cell.eps = t.eps;
    cell.mode = t.mode;
    cell.M = threshold_m;
    cell.ess = ess_total(gap);
    std::size_t exceed = 0, total = 0;
    for (const auto& c : gap) {
      total += c.size();
      for (double g : c)
        if (g >= threshold_m) ++exceed;
    }
    cell.p_hat = static_cast<double>(exceed) / total;
    double eff_exceed = static_cast<double>(exceed) * cell.ess / total;
    cell.ci_upper = wilson_upper(eff_exceed, cell.ess, 2.0);
    double se = std::sqrt(std::max(cell.p_hat * (1.0 - cell.p_hat), 1.0 / cell.ess) / cell.ess);
    cell.pass = cell.p_hat <= rho + 2.0 * se;
    std::size_t stride = std::max<std::size_t>(1, total / 2000);
    for (const auto& c : gap)
      for (std::size_t t = 0; t < c.size(); t += stride) cell.gap_sample.push_back(c[t]);
    return cell;
  };

  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::max(1, jobs);
  SweepResult sr;
  sr.cells.resize(tasks.size());
  std::size_t next = 0;
  while (next < tasks.size()) {
    std::size_t batch = std::min<std::size_t>(jobs, tasks.size() - next);
    std::vector<std::future<SweepCell>> futures;
    for (std::size_t k = 0; k < batch; ++k)
      futures.push_back(std::async(std::launch::async, run_cell, tasks[next + k]));
    for (std::size_t k = 0; k < batch; ++k) sr.cells[next + k] = futures[k].get();
    next += batch;
  }

  sr.report.check_id = "tightness";
  sr.report.inputs = {{"w", w.describe()}, {"rho", rho}, {"M", threshold_m}, {"seed", cfg.seed}};
  for (const auto& c : sr.cells) {
    std::ostringstream name;
    name << "exceed_N" << c.tree_height << "_eps" << c.eps << "_" << c.mode;
    sr.report.statistics.push_back({name.str(), c.p_hat, rho, c.pass});
  }
  sr.report.runtime_seconds = clock.seconds();
  return sr;
}

inline std::string sweep_to_csv(const SweepResult& sr) {
  std::ostringstream os;
  os << "N,eps,mode,M,p_hat,ci_upper,ess\n";
  os.precision(12);
  for (const auto& c : sr.cells)
    os << c.tree_height << "," << c.eps << "," << c.mode << "," << c.M << "," << c.p_hat << ","
       << c.ci_upper << "," << c.ess << "\n";
  return os.str();
}

}  // namespace sigma

#endif  // SIGMA_VERIFY_HPP_
