#pragma once

#include <cstdint>
#include <vector>

#include "l2sc/graph.hpp"

namespace l2sc {

// Recipe for a synthetic task stream. All tasks draw their cluster centers
// from one shared pool, so streams are cluster-consistent by construction;
// vary k_true per task to make them inconsistent.
struct StreamSpec {
  int num_tasks = 4;
  int d = 50;
  std::vector<int> k_true;     // clusters per task, one entry per task
  int samples_per_cluster = 40;
  double center_drift = 0.0;   // per-task Gaussian perturbation of centers
  double noise_sigma = 0.1;    // per-coordinate sample noise
  std::int64_t seed = 0;
};

/// Generate a stream of tasks with known labels.
///
/// The center pool holds max(k_true) unit-separated points (scaled
/// coordinate axes, pairwise distance exactly 1). Task i takes the first
/// k_true[i] of them, perturbs each by center_drift * N(0, I), then emits
/// samples_per_cluster points per cluster with N(0, noise_sigma^2 I) noise.
/// Entries pass through abs() at the end so downstream co-clustering
/// normalization sees nonnegative data. Bitwise deterministic per seed.
std::vector<TaskData> generate_stream(const StreamSpec& spec);

}  // namespace l2sc
