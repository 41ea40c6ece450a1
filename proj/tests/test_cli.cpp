#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "graphlaplace/cli.hpp"
#include "support.hpp"

using namespace graphlaplace;
namespace fs = std::filesystem;

namespace {

std::string graph_path(const std::string& name) { return std::string(GRAPHLAPLACE_DATA_DIR) + "/graphs/" + name + ".json"; }

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("graphlaplace_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_quiet(const RunConfig& cfg) {
  std::ostringstream out, err;
  return run(cfg, out, err);
}

}  // namespace

TEST_CASE("eig on the interval") {
  RunConfig cfg;
  cfg.subcommand = "eig";
  cfg.graph_path = graph_path("interval");
  cfg.out_dir = scratch("eig").string();
  cfg.truncation = 5;
  cfg.eigenfunctions = true;
  CHECK(run_quiet(cfg) == kExitOk);
  std::istringstream csv(slurp(fs::path(cfg.out_dir) / "eigenvalues.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "i,lambda,multiplicity_cluster,sup_norm,kirchhoff_residual_max");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 5);
  CHECK(fs::exists(fs::path(cfg.out_dir) / "eigenfunctions.csv"));

  const auto m = nlohmann::json::parse(slurp(fs::path(cfg.out_dir) / "manifest.json"));
  CHECK(m["status"] == "ok");
  CHECK(m["exit_code"] == 0);
  CHECK(m.contains("version"));
  CHECK(m["config"]["truncation"] == 5);
  const std::string text = m.dump();
  CHECK(text.find("time") == std::string::npos);
  CHECK(text.find("date") == std::string::npos);
}

TEST_CASE("validate rejects a disconnected graph with exit 2") {
  RunConfig cfg;
  cfg.subcommand = "validate";
  cfg.graph_path = graph_path("disconnected");
  cfg.out_dir = scratch("disconnected").string();
  CHECK(run_quiet(cfg) == kExitConfig);
  const auto m = nlohmann::json::parse(slurp(fs::path(cfg.out_dir) / "manifest.json"));
  CHECK(m["status"] == "error");
  CHECK(m["error"]["code"] == "DisconnectedGraph");
}

TEST_CASE("sample output is byte-identical across runs and thread counts") {
  RunConfig cfg;
  cfg.subcommand = "sample";
  cfg.graph_path = graph_path("star3");
  cfg.alpha = 1.5;
  cfg.n_samples = 120;
  cfg.seed = 7;
  cfg.truncation = 40;
  cfg.probes = {"e1:0.5,e2:0.25"};
  cfg.threads = 1;
  cfg.out_dir = scratch("sample1").string();
  REQUIRE(run_quiet(cfg) == kExitOk);
  const std::string a = slurp(fs::path(cfg.out_dir) / "samples.csv");
  const std::string as = slurp(fs::path(cfg.out_dir) / "sample_stats.csv");
  cfg.threads = 3;
  cfg.out_dir = scratch("sample2").string();
  REQUIRE(run_quiet(cfg) == kExitOk);
  CHECK(a == slurp(fs::path(cfg.out_dir) / "samples.csv"));
  CHECK(as == slurp(fs::path(cfg.out_dir) / "sample_stats.csv"));
  CHECK_FALSE(a.empty());

  cfg.seed = 8;
  cfg.out_dir = scratch("sample3").string();
  REQUIRE(run_quiet(cfg) == kExitOk);
  CHECK(a != slurp(fs::path(cfg.out_dir) / "samples.csv"));
}

TEST_CASE("white-noise sampling needs an explicit truncation") {
  RunConfig cfg;
  cfg.subcommand = "sample";
  cfg.graph_path = graph_path("interval");
  cfg.alpha = 0.4;
  cfg.out_dir = scratch("formal").string();
  CHECK(run_quiet(cfg) == kExitConfig);
}

TEST_CASE("bad function CSV cites the line") {
  const fs::path dir = scratch("badcsv");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "f.csv");
    f << "edge_id,t,value\ne,0,1\ne,0.5,oops\n";
  }
  RunConfig cfg;
  cfg.subcommand = "norm";
  cfg.graph_path = graph_path("interval");
  cfg.function_path = (dir / "f.csv").string();
  cfg.out_dir = (dir / "out").string();
  std::ostringstream out, err;
  CHECK(run(cfg, out, err) == kExitConfig);
  CHECK(err.str().find("f.csv:3") != std::string::npos);
}

TEST_CASE("solve and norm produce reports") {
  const fs::path dir = scratch("solve");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "f.csv");
    f << "edge_id,t,value\n";
    for (const char* e : {"e1", "e2", "e3"}) {
      for (int k = 0; k <= 16; ++k) f << e << ',' << k / 16.0 << ',' << 1.0 << '\n';
    }
  }
  RunConfig cfg;
  cfg.subcommand = "solve";
  cfg.graph_path = graph_path("star3");
  cfg.function_path = (dir / "f.csv").string();
  cfg.alpha = 2.0;
  cfg.truncation = 30;
  cfg.out_dir = (dir / "out").string();
  CHECK(run_quiet(cfg) == kExitOk);
  CHECK(fs::exists(fs::path(cfg.out_dir) / "u.csv"));
  CHECK(fs::exists(fs::path(cfg.out_dir) / "solve_report.txt"));

  cfg.subcommand = "norm";
  cfg.space = "H";
  cfg.alpha = 1.0;
  CHECK(run_quiet(cfg) == kExitOk);
  CHECK(fs::exists(fs::path(cfg.out_dir) / "norm_report.txt"));
}

TEST_CASE("argv parsing") {
  const std::string out = scratch("argv").string(), g = graph_path("interval");
  std::vector<std::string> args{"graphlaplace", "--out", out, "eig", g, "--truncation", "3"};
  std::vector<char*> argv;
  for (auto& s : args) argv.push_back(s.data());
  CHECK(cli_main(static_cast<int>(argv.size()), argv.data()) == kExitOk);
  CHECK(fs::exists(fs::path(out) / "eigenvalues.csv"));

  std::vector<std::string> bad{"graphlaplace", "eig"};
  std::vector<char*> bargv;
  for (auto& s : bad) bargv.push_back(s.data());
  CHECK(cli_main(static_cast<int>(bargv.size()), bargv.data()) == kExitConfig);
}
