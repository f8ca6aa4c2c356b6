#include "l2sc/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace l2sc {

std::vector<TaskData> generate_stream(const StreamSpec& spec) {
  if (spec.num_tasks < 1) throw InvalidInput("generate_stream: num_tasks < 1");
  if (static_cast<int>(spec.k_true.size()) != spec.num_tasks)
    throw InvalidInput("generate_stream: k_true needs one entry per task");
  if (spec.samples_per_cluster < 1)
    throw InvalidInput("generate_stream: samples_per_cluster < 1");
  if (spec.center_drift < 0.0 || spec.noise_sigma < 0.0)
    throw InvalidInput("generate_stream: negative drift or noise");

  int pool = *std::max_element(spec.k_true.begin(), spec.k_true.end());
  if (pool < 1 || pool > spec.d)
    throw InvalidInput("generate_stream: need 1 <= max(k_true) <= d");

  // Pool center j sits at (1/sqrt(2)) * e_j: every pair is at distance 1.
  Matrix centers = Matrix::Zero(spec.d, pool);
  for (int j = 0; j < pool; ++j) centers(j, j) = 1.0 / std::sqrt(2.0);

  std::mt19937_64 rng(static_cast<std::uint64_t>(spec.seed));
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<TaskData> tasks;
  tasks.reserve(spec.num_tasks);
  for (int t = 0; t < spec.num_tasks; ++t) {
    const int k = spec.k_true[t];
    const int n = k * spec.samples_per_cluster;

    Matrix task_centers(spec.d, k);
    for (int c = 0; c < k; ++c)
      for (int i = 0; i < spec.d; ++i)
        task_centers(i, c) = centers(i, c) + spec.center_drift * gauss(rng);

    TaskData data;
    data.task_id = "task_" + std::string(t + 1 < 10 ? "0" : "") +
                   std::to_string(t + 1);
    data.x.resize(spec.d, n);
    data.labels.resize(n);
    int col = 0;
    for (int c = 0; c < k; ++c)
      for (int s = 0; s < spec.samples_per_cluster; ++s, ++col) {
        for (int i = 0; i < spec.d; ++i)
          data.x(i, col) =
              std::abs(task_centers(i, c) + spec.noise_sigma * gauss(rng));
        data.labels[col] = c;
      }
    tasks.push_back(std::move(data));
  }
  return tasks;
}

}  // namespace l2sc
