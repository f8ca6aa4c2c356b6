#pragma once

// Shared generators for the test suites. Everything is seeded explicitly so
// failures replay.

#include <random>

#include "l2sc/graph.hpp"
#include "l2sc/linalg.hpp"
#include "l2sc/matrix.hpp"

namespace testutil {

inline l2sc::Matrix random_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  l2sc::Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = g(rng);
  return m;
}

inline l2sc::Matrix random_orthonormal(int rows, int cols,
                                       std::mt19937_64& rng) {
  return l2sc::stiefel_project(random_matrix(rows, cols, rng));
}

inline l2sc::Matrix random_symmetric(int n, std::mt19937_64& rng) {
  l2sc::Matrix a = random_matrix(n, n, rng);
  return 0.5 * (a + a.transpose()).eval();
}

// Gaussian blobs around unit-separated centers; columns are samples, labels
// follow block order. Data is shifted positive so co-clustering accepts it.
inline l2sc::TaskData blob_task(int d, int k, int per_cluster, double noise,
                                std::mt19937_64& rng,
                                const std::string& id = "blob") {
  std::normal_distribution<double> g(0.0, 1.0);
  l2sc::TaskData t;
  t.task_id = id;
  t.x.resize(d, k * per_cluster);
  t.labels.resize(k * per_cluster);
  int col = 0;
  for (int c = 0; c < k; ++c)
    for (int s = 0; s < per_cluster; ++s, ++col) {
      for (int i = 0; i < d; ++i) {
        double center = (i == c) ? 1.0 : 0.0;
        t.x(i, col) = std::abs(center + noise * g(rng));
      }
      t.labels[col] = c;
    }
  return t;
}

}  // namespace testutil
