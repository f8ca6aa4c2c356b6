#include "l2sc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace l2sc {

namespace {

// Squared pairwise distances between columns of x.
Matrix pairwise_sq(const Matrix& x) {
  const Eigen::Index n = x.cols();
  Vector sq = x.colwise().squaredNorm();
  Matrix d2 = (-2.0 * (x.transpose() * x)).eval();
  d2.colwise() += sq;
  d2.rowwise() += sq.transpose();
  return d2.cwiseMax(0.0);  // clamp the rounding negatives
}

// Indices of the knn nearest neighbors of column j (self excluded), ties
// broken toward the lower index.
std::vector<int> nearest(const Matrix& d2, int j, int knn) {
  const int n = static_cast<int>(d2.rows());
  std::vector<int> idx;
  idx.reserve(n - 1);
  for (int i = 0; i < n; ++i)
    if (i != j) idx.push_back(i);
  std::partial_sort(idx.begin(), idx.begin() + knn, idx.end(),
                    [&](int a, int b) {
                      if (d2(a, j) != d2(b, j)) return d2(a, j) < d2(b, j);
                      return a < b;
                    });
  idx.resize(knn);
  return idx;
}

void check_knn_args(const Matrix& x, int knn, const std::optional<double>& sigma) {
  require_finite(x, "build_knn_affinity: x");
  const int n = static_cast<int>(x.cols());
  if (n < 2) throw InvalidInput("build_knn_affinity: need at least 2 samples");
  if (knn < 1 || knn >= n)
    throw InvalidInput("build_knn_affinity: knn must satisfy 1 <= knn < n");
  if (sigma && !(*sigma > 0.0))
    throw InvalidInput("build_knn_affinity: sigma must be positive");
}

double median_neighbor_distance(const Matrix& d2, int knn) {
  const int n = static_cast<int>(d2.rows());
  std::vector<double> dist;
  dist.reserve(static_cast<size_t>(n) * knn);
  for (int j = 0; j < n; ++j)
    for (int i : nearest(d2, j, knn)) dist.push_back(std::sqrt(d2(i, j)));
  std::sort(dist.begin(), dist.end());
  const size_t m = dist.size();
  return (m % 2 == 1) ? dist[m / 2] : 0.5 * (dist[m / 2 - 1] + dist[m / 2]);
}

}  // namespace

double default_bandwidth(const Matrix& x, int knn) {
  check_knn_args(x, knn, std::nullopt);
  return median_neighbor_distance(pairwise_sq(x), knn);
}

Matrix build_knn_affinity(const Matrix& x, int knn, std::optional<double> sigma) {
  check_knn_args(x, knn, sigma);
  const int n = static_cast<int>(x.cols());
  Matrix d2 = pairwise_sq(x);

  double s = 0.0;
  if (sigma) {
    s = *sigma;
  } else {
    s = median_neighbor_distance(d2, knn);
    if (s <= 0.0)
      throw DegenerateScale(
          "build_knn_affinity: median neighbor distance is zero; pass sigma");
  }

  // Mark directed neighborhoods, then emit each undirected edge once so the
  // result is exactly symmetric.
  std::vector<std::vector<bool>> nbr(n, std::vector<bool>(n, false));
  for (int j = 0; j < n; ++j)
    for (int i : nearest(d2, j, knn)) nbr[j][i] = true;

  Matrix w = Matrix::Zero(n, n);
  const double inv = 1.0 / (2.0 * s * s);
  for (int j = 0; j < n; ++j)
    for (int i = j + 1; i < n; ++i)
      if (nbr[j][i] || nbr[i][j]) {
        double v = std::exp(-d2(i, j) * inv);
        w(i, j) = v;
        w(j, i) = v;
      }
  return w;
}

Matrix normalized_kernel(const Matrix& w) {
  require_finite(w, "normalized_kernel: w");
  const Eigen::Index n = w.rows();
  if (w.cols() != n) throw InvalidInput("normalized_kernel: w must be square");
  if ((w - w.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw InvalidInput("normalized_kernel: w must be symmetric");
  if (w.minCoeff() < 0.0)
    throw InvalidInput("normalized_kernel: w must be nonnegative");
  if (w.diagonal().cwiseAbs().maxCoeff() > 0.0)
    throw InvalidInput("normalized_kernel: w must have a zero diagonal");

  Vector deg = w.rowwise().sum();
  Vector dinv(n);
  for (Eigen::Index i = 0; i < n; ++i)
    dinv(i) = deg(i) > 0.0 ? 1.0 / std::sqrt(deg(i)) : 0.0;

  // Fill the upper triangle and mirror so the kernel is exactly symmetric.
  Matrix k = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i <= j; ++i) {
      double v = w(i, j) * (dinv(i) * dinv(j));
      k(i, j) = v;
      k(j, i) = v;
    }
  return k;
}

Matrix cocluster_normalize(const Matrix& x) {
  require_finite(x, "cocluster_normalize: x");
  if (x.minCoeff() < 0.0)
    throw InvalidInput("cocluster_normalize: x must be nonnegative");

  Vector r = x.rowwise().sum();
  Vector c = x.colwise().sum();
  Vector rinv(x.rows()), cinv(x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    rinv(i) = r(i) > 0.0 ? 1.0 / std::sqrt(r(i)) : 0.0;
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    cinv(j) = c(j) > 0.0 ? 1.0 / std::sqrt(c(j)) : 0.0;
  return rinv.asDiagonal() * x * cinv.asDiagonal();
}

TaskGraph build_task_graph(const TaskData& data, int knn,
                           std::optional<double> sigma) {
  double s;
  if (sigma) {
    s = *sigma;
  } else {
    s = default_bandwidth(data.x, knn);
    if (s <= 0.0)
      throw DegenerateScale(
          "build_task_graph: median neighbor distance is zero; pass sigma");
  }
  TaskGraph g;
  g.w = build_knn_affinity(data.x, knn, s);
  g.kernel = normalized_kernel(g.w);
  g.x_hat = cocluster_normalize(data.x);
  g.knn = knn;
  g.sigma = s;
  return g;
}

int count_isolated(const Matrix& w) {
  int c = 0;
  Vector deg = w.rowwise().sum();
  for (Eigen::Index i = 0; i < deg.size(); ++i)
    if (deg(i) == 0.0) ++c;
  return c;
}

}  // namespace l2sc
