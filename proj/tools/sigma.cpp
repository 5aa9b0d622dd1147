// Command-line front end for the hierarchical H^{2|2} toolkit.
//
// Exit codes: 0 pass/success, 1 check failure, 2 usage error, 3 numeric
// error.  Every run writes a manifest sufficient to reproduce bitwise.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sigma/berezin.hpp"
#include "sigma/io.hpp"
#include "sigma/model.hpp"
#include "sigma/sampler.hpp"
#include "sigma/susy_check.hpp"
#include "sigma/svg.hpp"
#include "sigma/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
};

struct SamplerOpts {
  int chains = 4;
  long burn_in = 20000;
  long keep = 20000;
  long thin = 10;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("--seed", c.seed, "RNG seed (falls back to SIGMA_SEED)");
  cmd->add_option("--out", c.out_dir, "output directory");
}

void add_sampler(CLI::App* cmd, SamplerOpts& s) {
  cmd->add_option("--chains", s.chains, "number of chains");
  cmd->add_option("--burn-in", s.burn_in, "burn-in steps per chain");
  cmd->add_option("--keep", s.keep, "kept samples per chain");
  cmd->add_option("--thin", s.thin, "kernel steps per kept sample");
}

std::uint64_t resolve_seed(const CommonOpts& c) {
  if (c.seed) return *c.seed;
  if (const char* env = std::getenv("SIGMA_SEED")) return std::stoull(env);
  throw CLI::ValidationError("--seed", "no seed given and SIGMA_SEED unset");
}

sigma::SamplerConfig make_cfg(const SamplerOpts& s, std::uint64_t seed) {
  sigma::SamplerConfig cfg;
  cfg.seed = seed;
  cfg.chains = s.chains;
  cfg.burn_in = s.burn_in;
  cfg.keep = s.keep;
  cfg.thin = s.thin;
  return cfg;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stod(item));
  if (out.empty()) throw CLI::ValidationError("list", "empty numeric list: " + text);
  return out;
}

std::vector<int> parse_range(const std::string& text) {
  auto dots = text.find("..");
  if (dots != std::string::npos) {
    int lo = std::stoi(text.substr(0, dots));
    int hi = std::stoi(text.substr(dots + 2));
    if (hi < lo) throw CLI::ValidationError("range", "descending range: " + text);
    std::vector<int> out;
    for (int v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  }
  std::vector<int> out;
  for (double v : parse_doubles(text)) out.push_back(static_cast<int>(v));
  return out;
}

sigma::PinningSpec make_pinning(const std::string& mode, double eps, const sigma::TreeWord& site) {
  sigma::PinningSpec pin;
  if (mode == "U") {
    pin.mode = sigma::PinningSpec::Mode::kUniform;
    pin.epsilon = eps;
  } else if (mode == "1P") {
    pin.mode = sigma::PinningSpec::Mode::kPoint;
    pin.epsilon = eps;
    pin.site = site;
  } else {
    throw CLI::ValidationError("--mode", "expected U or 1P, got " + mode);
  }
  return pin;
}

void write_run_artifacts(const fs::path& out, const sigma::VerificationReport& rep,
                         const json& config, std::uint64_t seed) {
  fs::create_directories(out);
  sigma::write_text((out / "report.json").string(), rep.to_json().dump(2) + "\n");
  sigma::write_text((out / "manifest.json").string(),
                    sigma::make_manifest(config, seed).dump(2) + "\n");
  std::cout << rep.check_id << ": " << rep.verdict() << "\n";
  for (const auto& s : rep.statistics)
    std::cout << "  " << s.name << " = " << s.value << " (threshold " << s.threshold << ") "
              << (s.pass ? "ok" : "FAIL") << "\n";
}

int verdict_code(const sigma::VerificationReport& rep) { return rep.passed() ? 0 : 1; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hierarchical H^{2|2} model toolkit"};
  app.require_subcommand(1);

  // --- sample ---------------------------------------------------------------
  auto* sample_cmd = app.add_subcommand("sample", "draw MCMC samples from a model");
  CommonOpts sample_common;
  SamplerOpts sample_sampler;
  std::string sample_model_path, sample_w = "const:1", sample_mode = "U", sample_format = "csv";
  int sample_n = 1;
  double sample_eps = 1.0;
  add_common(sample_cmd, sample_common);
  add_sampler(sample_cmd, sample_sampler);
  sample_cmd->add_option("--model", sample_model_path, "model spec JSON file");
  sample_cmd->add_option("--n", sample_n, "tree height (inline model)");
  sample_cmd->add_option("--w", sample_w, "weight profile (inline model)");
  sample_cmd->add_option("--mode", sample_mode, "pinning mode U|1P (inline model)");
  sample_cmd->add_option("--eps", sample_eps, "pinning strength (inline model)");
  sample_cmd->add_option("--format", sample_format, "csv or bin");

  // --- reduce-check ---------------------------------------------------------
  auto* reduce_cmd = app.add_subcommand("reduce-check", "full vs effective model comparison");
  CommonOpts reduce_common;
  SamplerOpts reduce_sampler;
  int reduce_n = 4;
  std::string reduce_p = "0000", reduce_q = "0010", reduce_w = "const:1", reduce_mode = "U";
  double reduce_eps = 1.0, reduce_corrupt = 1.0;
  add_common(reduce_cmd, reduce_common);
  add_sampler(reduce_cmd, reduce_sampler);
  reduce_cmd->add_option("--n", reduce_n, "tree height (<= 6)");
  reduce_cmd->add_option("--p", reduce_p, "leaf p as a binary word");
  reduce_cmd->add_option("--q", reduce_q, "leaf q as a binary word");
  reduce_cmd->add_option("--w", reduce_w, "weight profile");
  reduce_cmd->add_option("--mode", reduce_mode, "pinning mode U|1P (1P pins at p)");
  reduce_cmd->add_option("--eps", reduce_eps, "pinning strength");
  reduce_cmd->add_option("--corrupt", reduce_corrupt,
                         "scale effective weights (negative control)");

  // --- ig-check / laplace-check ---------------------------------------------
  auto* ig_cmd = app.add_subcommand("ig-check", "block mean law vs inverse Gaussian");
  auto* laplace_cmd = app.add_subcommand("laplace-check", "Laplace transform of the block mean");
  CommonOpts ig_common, laplace_common;
  SamplerOpts ig_sampler, laplace_sampler;
  int ig_n = 3, laplace_n = 3;
  double ig_eps = 1.0, laplace_eps = 1.0;
  std::string ig_w = "const:1", laplace_w = "const:1", laplace_b = "-0.5,-1,-2";
  add_common(ig_cmd, ig_common);
  add_sampler(ig_cmd, ig_sampler);
  ig_cmd->add_option("--n", ig_n, "tree height (0 uses the exact sampler)");
  ig_cmd->add_option("--eps", ig_eps, "total pinning strength");
  ig_cmd->add_option("--w", ig_w, "weight profile");
  add_common(laplace_cmd, laplace_common);
  add_sampler(laplace_cmd, laplace_sampler);
  laplace_cmd->add_option("--n", laplace_n, "tree height");
  laplace_cmd->add_option("--eps", laplace_eps, "total pinning strength");
  laplace_cmd->add_option("--w", laplace_w, "weight profile");
  laplace_cmd->add_option("--b", laplace_b, "transform arguments, comma separated");

  // --- bound-check ----------------------------------------------------------
  auto* bound_cmd = app.add_subcommand("bound-check", "pairwise alignment tail bound");
  CommonOpts bound_common;
  SamplerOpts bound_sampler;
  int bound_sites = 2;
  double bound_wij = 1.0, bound_eps = 1.0, bound_slack = 0.0;
  std::string bound_wd = "1.5,3,7";
  add_common(bound_cmd, bound_common);
  add_sampler(bound_cmd, bound_sampler);
  bound_cmd->add_option("--sites", bound_sites, "2 or 8 vertices");
  bound_cmd->add_option("--wij", bound_wij, "nearest-neighbor coupling");
  bound_cmd->add_option("--eps", bound_eps, "uniform pinning strength");
  bound_cmd->add_option("--wd", bound_wd, "grid of W_ij * delta products (> 1)");
  bound_cmd->add_option("--slack", bound_slack, "additive slack on the bound");

  // --- tightness ------------------------------------------------------------
  auto* tight_cmd = app.add_subcommand("tightness", "exceedance sweep over (N, eps, mode)");
  CommonOpts tight_common;
  SamplerOpts tight_sampler;
  std::string tight_n = "2..6", tight_eps = "1e-3,1,1e3", tight_modes = "U,1P",
              tight_w = "const:1";
  double tight_rho = 0.05, tight_m = 0.0;
  int tight_jobs = 0;
  add_common(tight_cmd, tight_common);
  add_sampler(tight_cmd, tight_sampler);
  tight_cmd->add_option("--n", tight_n, "tree heights, e.g. 2..6");
  tight_cmd->add_option("--eps", tight_eps, "pinning strengths, comma separated");
  tight_cmd->add_option("--modes", tight_modes, "pinning modes among U,1P");
  tight_cmd->add_option("--w", tight_w, "weight profile");
  tight_cmd->add_option("--rho", tight_rho, "target tail probability");
  tight_cmd->add_option("--m", tight_m, "threshold override (default: from the schedule)");
  tight_cmd->add_option("--jobs", tight_jobs, "parallel sweep cells (0 = all cores)");

  // --- schedule -------------------------------------------------------------
  auto* sched_cmd = app.add_subcommand("schedule", "delta schedule and threshold M");
  CommonOpts sched_common;
  std::string sched_w = "const:1";
  double sched_rho = 0.05;
  int sched_cutoff = 64;
  add_common(sched_cmd, sched_common);
  sched_cmd->add_option("--w", sched_w, "weight profile");
  sched_cmd->add_option("--rho", sched_rho, "target tail probability");
  sched_cmd->add_option("--cutoff", sched_cutoff, "numeric cutoff L");

  // --- susy-check -----------------------------------------------------------
  auto* susy_cmd = app.add_subcommand("susy-check", "symmetry operator residuals");
  CommonOpts susy_common;
  int susy_points = 1000;
  double susy_tol = 1e-10, susy_ward_tol = 1e-6, susy_eps = 1.0;
  add_common(susy_cmd, susy_common);
  susy_cmd->add_option("--points", susy_points, "random evaluation points");
  susy_cmd->add_option("--tol", susy_tol, "algebraic residual tolerance");
  susy_cmd->add_option("--ward-tol", susy_ward_tol, "Ward identity tolerance");
  susy_cmd->add_option("--eps", susy_eps, "pinning for the Ward check");

  // --- berezin-check --------------------------------------------------------
  auto* ber_cmd = app.add_subcommand("berezin-check", "normalization E[1] = 1");
  CommonOpts ber_common;
  int ber_sites = 1;
  double ber_eps = 1.0, ber_w = 1.0, ber_tol = 0.0;
  add_common(ber_cmd, ber_common);
  ber_cmd->add_option("--sites", ber_sites, "1 or 2");
  ber_cmd->add_option("--eps", ber_eps, "pinning at the first site");
  ber_cmd->add_option("--w", ber_w, "pair coupling (2 sites)");
  ber_cmd->add_option("--tol", ber_tol, "tolerance (default 1e-8 / 1e-5 by size)");

  // --- report ---------------------------------------------------------------
  auto* report_cmd = app.add_subcommand("report", "summarize an existing report file");
  std::string report_in;
  report_cmd->add_option("--in", report_in, "report JSON path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sample_cmd) {
      std::uint64_t seed = resolve_seed(sample_common);
      sigma::ModelSpec spec;
      json config;
      if (!sample_model_path.empty()) {
        std::ifstream in(sample_model_path);
        if (!in) throw CLI::ValidationError("--model", "cannot read " + sample_model_path);
        json j = json::parse(in);
        spec = sigma::model_from_json(j);
        config["model"] = j;
      } else {
        auto w = sigma::WeightProfile::parse(sample_w);
        auto pin = make_pinning(sample_mode, sample_eps, sigma::make_word(0, sample_n));
        spec = sigma::leaf_model(sample_n, w, pin);
        config["model"] =
            sigma::model_to_json(sample_n, spec.vertices, w, pin);
      }
      auto cfg = make_cfg(sample_sampler, seed);
      config["sampler"] = {{"chains", cfg.chains}, {"burn_in", cfg.burn_in},
                           {"keep", cfg.keep},     {"thin", cfg.thin}};
      sigma::SampleBatch batch = sigma::mcmc_sample(spec, cfg);
      fs::path out(sample_common.out_dir);
      fs::create_directories(out);
      if (sample_format == "bin")
        sigma::write_samples_binary((out / "samples.h22s").string(), batch);
      else
        sigma::write_samples_csv((out / "samples.csv").string(), batch);
      json diag;
      diag["accept_rate"] = batch.accept_rate;
      diag["ess"] = batch.ess;
      diag["rhat"] = batch.rhat;
      sigma::write_text((out / "diagnostics.json").string(), diag.dump(2) + "\n");
      sigma::write_text((out / "manifest.json").string(),
                        sigma::make_manifest(config, seed).dump(2) + "\n");
      std::cout << "wrote " << batch.configs.size() << " configurations\n";
      return 0;
    }

    if (*reduce_cmd) {
      std::uint64_t seed = resolve_seed(reduce_common);
      auto p = sigma::word_from_string(reduce_p);
      auto q = sigma::word_from_string(reduce_q);
      auto w = sigma::WeightProfile::parse(reduce_w);
      auto pin = make_pinning(reduce_mode, reduce_eps, p);
      auto cfg = make_cfg(reduce_sampler, seed);
      sigma::ReductionOptions opt;
      opt.weight_corruption = reduce_corrupt;
      std::vector<double> gap_full, gap_eff;
      auto rep = sigma::check_reduction(reduce_n, p, q, w, pin, cfg, opt, &gap_full, &gap_eff);
      fs::path out(reduce_common.out_dir);
      write_run_artifacts(out, rep, rep.inputs, seed);
      sigma::write_text((out / "qq_gap.svg").string(),
                        sigma::qq_plot_svg(gap_full, gap_eff, "u_p - u_q"));
      return verdict_code(rep);
    }

    if (*ig_cmd || *laplace_cmd) {
      bool is_ig = static_cast<bool>(*ig_cmd);
      const CommonOpts& common = is_ig ? ig_common : laplace_common;
      std::uint64_t seed = resolve_seed(common);
      int n = is_ig ? ig_n : laplace_n;
      double eps = is_ig ? ig_eps : laplace_eps;
      auto w = sigma::WeightProfile::parse(is_ig ? ig_w : laplace_w);
      auto cfg = make_cfg(is_ig ? ig_sampler : laplace_sampler, seed);
      std::vector<double> b_grid = is_ig ? std::vector<double>{-0.5, -1.0, -2.0}
                                         : parse_doubles(laplace_b);
      std::vector<double> means;
      auto rep = sigma::check_block_mean_law(n, w, eps, cfg, 0.01, b_grid, &means);
      if (!is_ig) {
        // keep only the Laplace statistics for the verdict
        std::erase_if(rep.statistics,
                      [](const sigma::CheckStatistic& s) { return s.name == "ks_vs_ig"; });
        rep.check_id = "laplace";
      }
      fs::path out(common.out_dir);
      write_run_artifacts(out, rep, rep.inputs, seed);
      if (is_ig && !means.empty())
        sigma::write_text((out / "ig_overlay.svg").string(), sigma::ig_overlay_svg(means, eps));
      return verdict_code(rep);
    }

    if (*bound_cmd) {
      std::uint64_t seed = resolve_seed(bound_common);
      if (bound_sites != 2 && bound_sites != 8)
        throw CLI::ValidationError("--sites", "expected 2 or 8");
      int n = (bound_sites == 2) ? 1 : 3;
      sigma::WeightProfile w;
      w.kind = sigma::WeightProfile::Kind::kConst;
      w.c = bound_wij;
      sigma::PinningSpec pin;
      pin.mode = sigma::PinningSpec::Mode::kUniform;
      pin.epsilon = bound_eps;
      sigma::ModelSpec spec = sigma::leaf_model(n, w, pin);
      double wij = spec.weight(0, 1);
      std::vector<double> grid;
      for (double wd : parse_doubles(bound_wd)) grid.push_back(wd / wij);
      auto cfg = make_cfg(bound_sampler, seed);
      auto rep = sigma::check_alignment_bound(spec, 0, 1, grid, cfg, bound_slack);
      write_run_artifacts(bound_common.out_dir, rep, rep.inputs, seed);
      return verdict_code(rep);
    }

    if (*tight_cmd) {
      std::uint64_t seed = resolve_seed(tight_common);
      auto w = sigma::WeightProfile::parse(tight_w);
      double m = tight_m;
      sigma::DeltaSchedule sch;
      bool have_schedule = false;
      if (m <= 0) {
        sch = sigma::delta_schedule(tight_rho, w);
        m = sch.M;
        have_schedule = true;
      }
      std::vector<std::string> modes;
      {
        std::stringstream ss(tight_modes);
        std::string item;
        while (std::getline(ss, item, ','))
          if (!item.empty()) modes.push_back(item);
      }
      auto cfg = make_cfg(tight_sampler, seed);
      auto sr = sigma::tightness_sweep(parse_range(tight_n), parse_doubles(tight_eps), modes, w,
                                       m, tight_rho, cfg, tight_jobs);
      fs::path out(tight_common.out_dir);
      fs::create_directories(out);
      sigma::write_text((out / "sweep.csv").string(), sigma::sweep_to_csv(sr));
      if (have_schedule)
        sigma::write_text((out / "schedule.json").string(),
                          sigma::schedule_to_json(sch).dump(2) + "\n");
      if (!sr.cells.empty()) {
        std::vector<std::string> labels;
        std::vector<std::vector<double>> gaps;
        for (const auto& c : sr.cells) {
          std::ostringstream lab;
          lab << "N" << c.tree_height << "_eps" << c.eps << "_" << c.mode;
          labels.push_back(lab.str());
          gaps.push_back(c.gap_sample);
        }
        sigma::write_text((out / "tail_curves.svg").string(),
                          sigma::tail_curve_svg(labels, gaps, 1.5 * m, m));
      } else {
        std::cout << "empty sweep, no plots emitted\n";
      }
      write_run_artifacts(out, sr.report, sr.report.inputs, seed);
      if (sr.report.inconclusive) return 1;
      return verdict_code(sr.report);
    }

    if (*sched_cmd) {
      auto w = sigma::WeightProfile::parse(sched_w);
      sigma::BetaSequence bs = sigma::beta_sequence(w, sched_cutoff);
      std::cout << "beta assessment: " << sigma::to_string(bs.assessment) << "\n";
      sigma::DeltaSchedule sch;
      try {
        sch = sigma::delta_schedule(sched_rho, w, sched_cutoff);
      } catch (const std::domain_error& e) {
        std::cerr << "schedule refused: " << e.what() << "\n";
        return 1;
      }
      fs::path out(sched_common.out_dir);
      fs::create_directories(out);
      sigma::write_text((out / "schedule.json").string(),
                        sigma::schedule_to_json(sch).dump(2) + "\n");
      std::cout << "l0 = " << sch.l0 << ", l1 = " << sch.l1 << ", M = " << sch.M << "\n";
      return 0;
    }

    if (*susy_cmd) {
      std::uint64_t seed = resolve_seed(susy_common);
      auto res = sigma::susy_residual_battery(seed, susy_points);
      sigma::ModelSpec one;
      one.tree_height = 0;
      one.vertices = {sigma::root()};
      one.W = {0.0};
      one.h = {susy_eps};
      double ward = 0;
      for (auto [i, j] : {std::pair{1, 2}, {1, 3}, {1, 5}, {2, 4}, {3, 4}})
        ward = std::max(ward, std::abs(sigma::ward_residual(one, i, j)));
      sigma::VerificationReport rep;
      rep.check_id = "susy";
      rep.inputs = {{"seed", seed}, {"points", susy_points}, {"eps", susy_eps}};
      rep.statistics = {
          {"annihilation_L", res.annihilation_l, susy_tol, res.annihilation_l < susy_tol},
          {"annihilation_Q", res.annihilation_q, susy_tol, res.annihilation_q < susy_tol},
          {"chain_rule_exp", res.chain_rule, susy_tol, res.chain_rule < susy_tol},
          {"ward_identity", ward, susy_ward_tol, ward < susy_ward_tol}};
      write_run_artifacts(susy_common.out_dir, rep, rep.inputs, seed);
      return verdict_code(rep);
    }

    if (*ber_cmd) {
      std::uint64_t seed = ber_common.seed ? *ber_common.seed : 0;  // deterministic anyway
      sigma::ModelSpec spec;
      if (ber_sites == 1) {
        spec.tree_height = 0;
        spec.vertices = {sigma::root()};
        spec.W = {0.0};
        spec.h = {ber_eps};
      } else if (ber_sites == 2) {
        spec.tree_height = 1;
        spec.vertices = {sigma::make_word(0, 1), sigma::make_word(1, 1)};
        spec.W = {0.0, ber_w, ber_w, 0.0};
        spec.h = {ber_eps, 0.0};
      } else {
        throw CLI::ValidationError("--sites", "expected 1 or 2");
      }
      double tol = (ber_tol > 0) ? ber_tol : (ber_sites == 1 ? 1e-8 : 1e-5);
      double value = sigma::berezin_superintegral(spec);
      sigma::VerificationReport rep;
      rep.check_id = "berezin_normalization";
      rep.inputs = {{"sites", ber_sites}, {"eps", ber_eps}, {"w", ber_w}};
      rep.statistics = {{"abs_E1_minus_1", std::abs(value - 1.0), tol,
                         std::abs(value - 1.0) < tol}};
      write_run_artifacts(ber_common.out_dir, rep, rep.inputs, seed);
      return verdict_code(rep);
    }

    if (*report_cmd) {
      std::ifstream in(report_in);
      if (!in) throw CLI::ValidationError("--in", "cannot read " + report_in);
      json j = json::parse(in);
      if (j.value("schema", "") != "h22_report_v1")
        throw std::invalid_argument("unknown report schema");
      std::cout << j.value("check_id", "?") << ": " << j.value("verdict", "?") << "\n";
      for (const auto& s : j.value("statistics", json::array()))
        std::cout << "  " << s.value("name", "?") << " = " << s.value("value", 0.0)
                  << " (threshold " << s.value("threshold", 0.0) << ") "
                  << (s.value("pass", false) ? "ok" : "FAIL") << "\n";
      return j.value("verdict", "") == "pass" ? 0 : 1;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const sigma::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const sigma::QuadratureError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::domain_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
