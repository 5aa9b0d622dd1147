#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "sigma/io.hpp"
#include "sigma/svg.hpp"

using namespace sigma;

namespace {

int run_cli(const std::string& args, bool raw = false) {
  std::string cmd = (raw ? args : "./sigma " + args) + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("binary sample files round trip bitwise") {
  SampleBatch batch = exact_single_site_sample(0.7, 500, 81, 3);
  std::string path = (std::filesystem::temp_directory_path() / "roundtrip.h22s").string();
  write_samples_binary(path, batch);
  SampleBatch back = read_samples_binary(path);
  CHECK(back.chains == batch.chains);
  CHECK(back.kept_per_chain == batch.kept_per_chain);
  CHECK(back.n_vertices == batch.n_vertices);
  REQUIRE(back.configs.size() == batch.configs.size());
  for (std::size_t i = 0; i < batch.configs.size(); ++i) {
    CHECK(back.configs[i].u == batch.configs[i].u);
    CHECK(back.configs[i].s == batch.configs[i].s);
  }
  std::filesystem::remove(path);
}

TEST_CASE("binary reader rejects foreign files") {
  std::string path = (std::filesystem::temp_directory_path() / "notasample.bin").string();
  write_text(path, "this is not a sample file");
  CHECK_THROWS_AS(read_samples_binary(path), std::runtime_error);
  CHECK_THROWS_AS(read_samples_binary("/nonexistent/nowhere.h22s"), std::runtime_error);
  std::filesystem::remove(path);
}

TEST_CASE("csv export") {
  SampleBatch batch = exact_single_site_sample(1.0, 10, 82, 2);
  std::string path = (std::filesystem::temp_directory_path() / "samples.csv").string();
  write_samples_csv(path, batch);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "chain,step,vertex,u,s");
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  CHECK(lines == 2 * 10 * 1);
  std::filesystem::remove(path);
}

TEST_CASE("fnv1a digest") {
  // standard FNV-1a 64-bit vectors
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("manifest digests the configuration") {
  nlohmann::json cfg = {{"check", "demo"}, {"eps", 0.5}};
  nlohmann::json m1 = make_manifest(cfg, 42);
  CHECK(m1.at("schema") == "h22_manifest_v1");
  CHECK(m1.at("seed") == 42);
  CHECK(m1.at("config_digest") == make_manifest(cfg, 43).at("config_digest"));
  cfg["eps"] = 0.6;
  CHECK(m1.at("config_digest") != make_manifest(cfg, 42).at("config_digest"));
}

TEST_CASE("svg plots are deterministic and well formed") {
  CounterRng rng(83);
  std::vector<double> samples, other;
  for (int i = 0; i < 500; ++i) {
    samples.push_back(inverse_gaussian_sample(1.0, rng));
    other.push_back(inverse_gaussian_sample(1.0, rng));
  }
  std::string ig = ig_overlay_svg(samples, 1.0);
  CHECK(ig.rfind("<svg", 0) == 0);
  CHECK(ig.find("</svg>") != std::string::npos);
  CHECK(ig == ig_overlay_svg(samples, 1.0));

  std::string tail = tail_curve_svg({"cell_a", "cell_b"}, {samples, other}, 5.0, 3.0);
  CHECK(tail.rfind("<svg", 0) == 0);
  CHECK(tail.find("</svg>") != std::string::npos);

  std::string qq = qq_plot_svg(samples, other, "demo");
  CHECK(qq.rfind("<svg", 0) == 0);
  CHECK(qq == qq_plot_svg(samples, other, "demo"));
}

TEST_CASE("cli exit codes") {
  REQUIRE(std::filesystem::exists("./sigma"));
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("no-such-command") == 2);
  // seed comes from --seed or SIGMA_SEED; with neither the run is refused
  CHECK(run_cli("env -u SIGMA_SEED ./sigma susy-check --points 10", true) == 2);
  CHECK(run_cli("env SIGMA_SEED=5 ./sigma susy-check --points 10 --out " +
                    (std::filesystem::temp_directory_path() / "sigma_env_seed").string(),
                true) == 0);
  CHECK(run_cli("schedule --rho 0.05 --w bogus:1") == 2);
  CHECK(run_cli("schedule --rho 0.05 --w geom:1,0.25") == 1);  // certified divergent
  std::filesystem::remove_all(std::filesystem::temp_directory_path() / "sigma_env_seed");
}

TEST_CASE("cli schedule writes the schedule file") {
  auto dir = std::filesystem::temp_directory_path() / "sigma_cli_sched";
  std::filesystem::remove_all(dir);
  REQUIRE(run_cli("schedule --rho 0.05 --w const:1 --out " + dir.string()) == 0);
  REQUIRE(std::filesystem::exists(dir / "schedule.json"));
  std::ifstream in(dir / "schedule.json");
  nlohmann::json sch = nlohmann::json::parse(in);
  CHECK(sch.at("assessment") == "certified-convergent");
  CHECK(sch.at("l0") == 1);
  std::filesystem::remove_all(dir);
}

TEST_CASE("cli checks write report and manifest") {
  auto dir = std::filesystem::temp_directory_path() / "sigma_cli_run";
  std::filesystem::remove_all(dir);
  REQUIRE(run_cli("susy-check --seed 9 --points 50 --out " + dir.string()) == 0);
  for (const char* f : {"report.json", "manifest.json"}) {
    INFO(f);
    REQUIRE(std::filesystem::exists(dir / f));
  }
  std::ifstream in(dir / "report.json");
  nlohmann::json rep = nlohmann::json::parse(in);
  CHECK(rep.at("schema") == "h22_report_v1");
  CHECK(rep.at("verdict") == "pass");
  std::ifstream min(dir / "manifest.json");
  nlohmann::json man = nlohmann::json::parse(min);
  CHECK(man.at("schema") == "h22_manifest_v1");
  CHECK(man.at("seed") == 9);

  // the report subcommand replays the stored verdict
  CHECK(run_cli("report --in " + (dir / "report.json").string()) == 0);
  CHECK(run_cli("report --in " + (dir / "nonexistent.json").string()) == 2);
  std::filesystem::remove_all(dir);
}
