#pragma once

#include <optional>
#include <vector>

#include "l2sc/graph.hpp"
#include "l2sc/kmeans.hpp"

namespace l2sc {

struct SpectralResult {
  Labels labels;
  double objective = 0.0;  // tr(F^T K F) of the spectral embedding
};

/// Plain normalized spectral clustering of one task: rows of the top-k
/// kernel eigenvectors, discretized with k-means.
SpectralResult single_task_sc(const TaskGraph& g, int k,
                              const KMeansConfig& cfg);

/// Pool every task's samples into one matrix, cluster once, split the labels
/// back per task. All objectives report the pooled embedding's value.
std::vector<SpectralResult> pooled_sc(const std::vector<TaskData>& tasks,
                                      int k, int knn, const KMeansConfig& cfg,
                                      std::optional<double> sigma = std::nullopt);

}  // namespace l2sc
