#include "l2sc/kmeans.hpp"

#include <limits>
#include <random>

namespace l2sc {

namespace {

struct SingleRun {
  Labels labels;
  double cost;
};

int nearest_center(const Matrix& centers, const Eigen::RowVectorXd& p) {
  int best = 0;
  double bestd = (centers.row(0) - p).squaredNorm();
  for (int c = 1; c < centers.rows(); ++c) {
    double d = (centers.row(c) - p).squaredNorm();
    if (d < bestd) {  // strict: ties keep the lower index
      bestd = d;
      best = c;
    }
  }
  return best;
}

Matrix plusplus_seed(const Matrix& points, int k, std::mt19937_64& rng) {
  const int n = static_cast<int>(points.rows());
  Matrix centers(k, points.cols());

  std::uniform_int_distribution<int> uni(0, n - 1);
  centers.row(0) = points.row(uni(rng));

  Vector d2(n);
  for (int i = 0; i < n; ++i)
    d2(i) = (points.row(i) - centers.row(0)).squaredNorm();

  for (int c = 1; c < k; ++c) {
    double total = d2.sum();
    int pick;
    if (total > 0.0) {
      std::uniform_real_distribution<double> ur(0.0, total);
      double r = ur(rng);
      double acc = 0.0;
      pick = n - 1;
      for (int i = 0; i < n; ++i) {
        acc += d2(i);
        if (acc >= r) {
          pick = i;
          break;
        }
      }
    } else {
      pick = uni(rng);  // all points coincide with some center
    }
    centers.row(c) = points.row(pick);
    for (int i = 0; i < n; ++i)
      d2(i) = std::min(d2(i), (points.row(i) - centers.row(c)).squaredNorm());
  }
  return centers;
}

SingleRun lloyd(const Matrix& points, int k, int max_iter,
                std::mt19937_64& rng) {
  const int n = static_cast<int>(points.rows());
  Matrix centers = plusplus_seed(points, k, rng);
  Labels labels(n, 0);

  for (int it = 0; it < max_iter; ++it) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int c = nearest_center(centers, points.row(i));
      if (c != labels[i]) {
        labels[i] = c;
        changed = true;
      }
    }
    if (!changed && it > 0) break;

    Matrix sums = Matrix::Zero(k, points.cols());
    std::vector<int> count(k, 0);
    for (int i = 0; i < n; ++i) {
      sums.row(labels[i]) += points.row(i);
      ++count[labels[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (count[c] > 0) {
        centers.row(c) = sums.row(c) / count[c];
      } else {
        // Re-seed an emptied cluster to the point farthest from its center.
        int far = 0;
        double fard = -1.0;
        for (int i = 0; i < n; ++i) {
          double d = (points.row(i) - centers.row(labels[i])).squaredNorm();
          if (d > fard) {
            fard = d;
            far = i;
          }
        }
        centers.row(c) = points.row(far);
        labels[far] = c;
      }
    }
  }

  double cost = 0.0;
  for (int i = 0; i < n; ++i)
    cost += (points.row(i) - centers.row(labels[i])).squaredNorm();
  return {std::move(labels), cost};
}

}  // namespace

Labels kmeans(const Matrix& points, const KMeansConfig& cfg) {
  require_finite(points, "kmeans: points");
  const int n = static_cast<int>(points.rows());
  if (cfg.k < 1) throw InvalidInput("kmeans: k must be >= 1");
  if (n < cfg.k) throw InvalidInput("kmeans: need at least k points");
  if (cfg.restarts < 1 || cfg.max_iter < 1)
    throw InvalidInput("kmeans: restarts and max_iter must be >= 1");
  if (cfg.k == 1) return Labels(n, 0);

  SingleRun best{{}, std::numeric_limits<double>::infinity()};
  for (int r = 0; r < cfg.restarts; ++r) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(cfg.seed) +
                        static_cast<std::uint64_t>(r));
    SingleRun run = lloyd(points, cfg.k, cfg.max_iter, rng);
    if (run.cost < best.cost) best = std::move(run);  // ties keep the earlier
  }
  return best.labels;
}

double wcss(const Matrix& points, const Labels& labels) {
  if (static_cast<size_t>(points.rows()) != labels.size())
    throw InvalidInput("wcss: labels length must match points");
  int k = 0;
  for (int l : labels) {
    if (l < 0) throw InvalidInput("wcss: negative label");
    k = std::max(k, l + 1);
  }
  Matrix sums = Matrix::Zero(k, points.cols());
  std::vector<int> count(k, 0);
  for (size_t i = 0; i < labels.size(); ++i) {
    sums.row(labels[i]) += points.row(static_cast<Eigen::Index>(i));
    ++count[labels[i]];
  }
  double cost = 0.0;
  for (size_t i = 0; i < labels.size(); ++i) {
    Eigen::RowVectorXd c = sums.row(labels[i]) / count[labels[i]];
    cost += (points.row(static_cast<Eigen::Index>(i)) - c).squaredNorm();
  }
  return cost;
}

}  // namespace l2sc
