// llk <command> --in FILE [options]: batch front end over the llk library.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "llk/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Synthetic Lorentzian geometry checks and the cos-suspension splitting"};
  std::string command, in, out;
  llk::CliOptions opt;
  double tol_disc = -1.0;
  std::size_t grid = 0;
  app.add_option("command", command, "validate | curvature | myers | subdivide | split | suspend | geodesics")
      ->required()
      ->check(CLI::IsMember(llk::command_names()));
  app.add_option("--in", in, "input file")->required();
  app.add_option("--out", out, "output file (default: stdout)");
  app.add_option("--tol-exact", opt.tol_exact, "tolerance for closed-form identities")->capture_default_str();
  app.add_option("--tol-disc", tol_disc, "tolerance for discretized verdicts (default: 2x grid step)");
  app.add_option("--samples", opt.samples, "sampled triangles")->capture_default_str();
  app.add_option("--seed", opt.seed, "sampling seed")->capture_default_str();
  app.add_option("--jobs", opt.jobs, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--grid", grid, "resample a suspension request with N times")->check(CLI::Range(2, 1 << 20));
  app.add_option("--step", opt.step, "lambda step for geodesic tables")->capture_default_str();
  app.add_flag("--timings", opt.timings, "record wall-clock time in the report");
  app.add_flag("--allow-unsettled", opt.allow_unsettled,
               "split: build asymptotes from the Busemann fit when tail maximizers do not settle");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (app.count("--tol-disc")) opt.tol_disc = tol_disc;
  if (app.count("--grid")) opt.grid = grid;

  std::ifstream file(in, std::ios::binary);
  if (!file) {
    std::cerr << "llk: cannot read " << in << "\n";
    return 2;
  }
  std::ostringstream buf;
  buf << file.rdbuf();

  const llk::CommandResult r = llk::run_command(command, buf.str(), opt);
  if (out.empty()) {
    std::cout << r.output;
  } else {
    std::ofstream dst(out, std::ios::binary);
    if (!dst) {
      std::cerr << "llk: cannot write " << out << "\n";
      return 2;
    }
    dst << r.output;
  }
  if (r.exit_code == 2) std::cerr << "llk: " << command << " rejected its input; see the error field\n";
  return r.exit_code;
}
