#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "l2sc/io.hpp"

namespace l2sc {

struct RunOptions {
  std::string manifest_path;
  std::string out_path;
  std::string save_library_path;  // empty: do not save
  std::string resume_path;        // empty: fresh library
  bool summary = false;
  bool no_timing = false;  // write wall_ms as 0 for byte-reproducible output
};

struct BaselineOptions {
  std::string which;  // "stsc" or "usc"
  std::string manifest_path;
  std::string out_path;
  bool summary = false;
  bool no_timing = false;
};

struct SynthOptions {
  int tasks = 4;
  int k = 4;
  int d = 50;
  int spc = 40;  // samples per cluster
  double drift = 0.0;
  double noise = 0.1;
  std::int64_t seed = 0;
  std::string out_dir;
  int knn = 10;
  double lambda = 1.0;
  double mu = 0.1;
};

/// Lifelong run over the manifest's task stream. After each newly fitted
/// task, one row per task seen so far is appended (metrics re-measured under
/// the current library). With --resume, tasks already in the snapshot are
/// not refitted and their data files are not read; only their labels are.
/// Diagnostics (isolated-sample warnings, summary) go to `log`.
std::vector<ResultRow> cmd_run(const RunOptions& opt, std::ostream& log);

/// Per-task spectral clustering ("stsc") or pooled-data spectral clustering
/// ("usc") over the same manifest, same emission format.
std::vector<ResultRow> cmd_baseline(const BaselineOptions& opt,
                                    std::ostream& log);

/// Materialize a synthetic stream: one dense CSV and labels file per task
/// plus a manifest.json wired to them.
void cmd_synth(const SynthOptions& opt, std::ostream& log);

}  // namespace l2sc
