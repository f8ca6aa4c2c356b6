#pragma once

#include <optional>
#include <string>
#include <vector>

#include "l2sc/matrix.hpp"

namespace l2sc {

// One task's raw data. Columns of x are samples, rows are features.
struct TaskData {
  std::string task_id;
  Matrix x;                 // d x n
  std::vector<int> labels;  // ground truth, empty when unknown
};

// Everything the model needs about one task's graph. Built once per task;
// the raw data is not consulted again afterwards.
struct TaskGraph {
  Matrix w;       // n x n affinity, symmetric, zero diagonal
  Matrix kernel;  // n x n normalized kernel D^-1/2 W D^-1/2
  Matrix x_hat;   // d x n, co-clustering-normalized data
  double sigma;   // bandwidth actually used
  int knn;
};

/// Mutual-or k-NN Gaussian affinity. An edge (i, j), i != j, exists when i is
/// among the knn nearest neighbors of j or vice versa; its weight is
/// exp(-||x_i - x_j||^2 / (2 sigma^2)). Diagonal stays zero. Neighbor ties
/// break toward the lower sample index.
///
/// When sigma is not given it defaults to the median of the n*knn selected
/// neighbor distances; a zero median (duplicate-only data) throws
/// DegenerateScale.
Matrix build_knn_affinity(const Matrix& x, int knn,
                          std::optional<double> sigma = std::nullopt);

/// Symmetric normalization D^-1/2 W D^-1/2 of an affinity matrix. Rows with
/// zero degree come out as zero rows (isolated samples are tolerated, the
/// caller decides whether to warn).
Matrix normalized_kernel(const Matrix& w);

/// Co-clustering normalization D1^-1/2 X D2^-1/2 where D1 holds row sums and
/// D2 column sums of X. X must be nonnegative; zero rows or columns yield
/// zero rows or columns.
Matrix cocluster_normalize(const Matrix& x);

/// Bandwidth the affinity builder would use for this data: the median of the
/// n*knn selected neighbor distances.
double default_bandwidth(const Matrix& x, int knn);

/// Bundle the three graph views of one task.
TaskGraph build_task_graph(const TaskData& data, int knn,
                           std::optional<double> sigma = std::nullopt);

/// Number of isolated samples (zero affinity degree). CLI surfaces this as a
/// warning; the math tolerates it.
int count_isolated(const Matrix& w);

}  // namespace l2sc
