#pragma once

#include <cstdint>

#include "l2sc/matrix.hpp"
#include "l2sc/metrics.hpp"

namespace l2sc {

struct KMeansConfig {
  int k = 2;
  int restarts = 10;
  int max_iter = 100;
  std::int64_t seed = 0;
};

/// Lloyd's algorithm with k-means++ seeding, best of cfg.restarts runs by
/// within-cluster sum of squares. Rows of points are samples.
///
/// Deterministic given cfg.seed: restart r uses seed cfg.seed + r, so a
/// single restart of any r can be reproduced through the public interface.
/// Assignment ties go to the lowest center index; a cluster that empties is
/// re-seeded to the point farthest from its current center.
Labels kmeans(const Matrix& points, const KMeansConfig& cfg);

/// Within-cluster sum of squares of a labeling (centers are class means).
/// Used for reporting and in tests.
double wcss(const Matrix& points, const Labels& labels);

}  // namespace l2sc
