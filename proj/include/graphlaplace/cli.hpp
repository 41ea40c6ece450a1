#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace graphlaplace {

/// Fully resolved options of one CLI run; echoed into manifest.json.
struct RunConfig {
  std::string subcommand;  // validate | eig | norm | solve | sample | verify
  std::string graph_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0: GRAPHLAPLACE_THREADS, else hardware
  bool debug = false;

  // Operator and basis.
  double kappa = 1.0;
  std::optional<std::size_t> truncation;  // eigenpairs N
  std::string solver = "secular";         // eig only: secular | fem
  double mesh = 0.01;                     // FEM mesh size
  bool eigenfunctions = false;            // eig: also dump eigenfunctions.csv
  std::size_t grid = 65;                  // output nodes per edge

  // norm / solve
  std::string function_path;
  std::string space = "W";  // norm: W (Sobolev-Slobodeckij) | H (spectral)
  double alpha = 1.0;
  double p = 2.0;
  std::optional<double> beta_report;

  // sample
  std::size_t n_samples = 100;
  std::vector<std::string> probes;  // "edge:t,edge:t"

  // verify
  std::size_t verify_samples = 2000;
};

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumeric = 3, kExitVerify = 4 };

/// Executes one subcommand, writing artifacts plus manifest.json into
/// out_dir. Errors are reported on `err` and mapped to exit codes.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv (CLI11) and calls run().
int cli_main(int argc, char** argv);

}  // namespace graphlaplace
