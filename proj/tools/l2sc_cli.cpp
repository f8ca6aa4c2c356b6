// Command-line front end: run (lifelong stream), baseline (stsc/usc),
// synth (synthetic stream files).
//
// Exit codes: 0 success, 2 usage, 3 data or format problem, 4 numerical
// failure.

#include <iostream>

#include <CLI11.hpp>

#include "l2sc/errors.hpp"
#include "l2sc/runner.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lifelong spectral clustering over a stream of tasks"};
  app.require_subcommand(1);

  l2sc::RunOptions run;
  CLI::App* run_cmd = app.add_subcommand("run", "fit a task stream");
  run_cmd->add_option("--manifest", run.manifest_path, "manifest JSON")
      ->required();
  run_cmd->add_option("--out", run.out_path, "results CSV")->required();
  run_cmd->add_option("--save-library", run.save_library_path,
                      "write library snapshot here");
  run_cmd->add_option("--resume", run.resume_path,
                      "continue from a library snapshot");
  run_cmd->add_flag("--summary", run.summary, "print per-task averages");
  run_cmd->add_flag("--no-timing", run.no_timing,
                    "write wall_ms as 0 for byte-reproducible output");

  l2sc::BaselineOptions base;
  CLI::App* base_cmd = app.add_subcommand("baseline", "non-lifelong reference");
  base_cmd->add_option("--which", base.which, "stsc or usc")->required();
  base_cmd->add_option("--manifest", base.manifest_path, "manifest JSON")
      ->required();
  base_cmd->add_option("--out", base.out_path, "results CSV")->required();
  base_cmd->add_flag("--summary", base.summary, "print per-task averages");
  base_cmd->add_flag("--no-timing", base.no_timing,
                     "write wall_ms as 0 for byte-reproducible output");

  l2sc::SynthOptions synth;
  CLI::App* synth_cmd =
      app.add_subcommand("synth", "write a synthetic task stream");
  synth_cmd->add_option("--tasks", synth.tasks, "number of tasks")
      ->check(CLI::PositiveNumber);
  synth_cmd->add_option("--k", synth.k, "clusters per task");
  synth_cmd->add_option("--d", synth.d, "feature dimensionality");
  synth_cmd->add_option("--spc", synth.spc, "samples per cluster");
  synth_cmd->add_option("--drift", synth.drift, "center drift per task");
  synth_cmd->add_option("--noise", synth.noise, "sample noise sigma");
  synth_cmd->add_option("--seed", synth.seed, "stream seed");
  synth_cmd->add_option("--out-dir", synth.out_dir, "output directory")
      ->required();
  synth_cmd->add_option("--knn", synth.knn, "manifest knn");
  synth_cmd->add_option("--lambda", synth.lambda, "manifest lambda");
  synth_cmd->add_option("--mu", synth.mu, "manifest mu");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;  // --help parses as an "error" of code 0
  }

  try {
    if (*run_cmd) {
      l2sc::cmd_run(run, std::cerr);
    } else if (*base_cmd) {
      l2sc::cmd_baseline(base, std::cerr);
    } else if (*synth_cmd) {
      l2sc::cmd_synth(synth, std::cerr);
    }
  } catch (const l2sc::NumericalFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const l2sc::RankDeficient& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const l2sc::Error& e) {
    // InvalidInput, DegenerateScale, FormatError, VersionError, IoError:
    // all trace back to what the user fed us.
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
