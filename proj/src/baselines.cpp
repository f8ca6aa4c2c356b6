#include "l2sc/baselines.hpp"

#include "l2sc/linalg.hpp"

namespace l2sc {

SpectralResult single_task_sc(const TaskGraph& g, int k,
                              const KMeansConfig& cfg) {
  if (k < 1 || k > g.kernel.rows())
    throw InvalidInput("single_task_sc: k out of range");
  Matrix f = sym_eig_topk(g.kernel, k);
  KMeansConfig kc = cfg;
  kc.k = k;
  SpectralResult out;
  out.labels = kmeans(f, kc);
  out.objective = (f.transpose() * (g.kernel * f)).trace();
  return out;
}

std::vector<SpectralResult> pooled_sc(const std::vector<TaskData>& tasks,
                                      int k, int knn, const KMeansConfig& cfg,
                                      std::optional<double> sigma) {
  if (tasks.empty()) throw InvalidInput("pooled_sc: no tasks");
  const Eigen::Index d = tasks[0].x.rows();
  Eigen::Index total = 0;
  for (const auto& t : tasks) {
    if (t.x.rows() != d)
      throw InvalidInput("pooled_sc: tasks disagree on dimensionality");
    total += t.x.cols();
  }

  TaskData pooled;
  pooled.task_id = "__pooled__";
  pooled.x.resize(d, total);
  Eigen::Index at = 0;
  for (const auto& t : tasks) {
    pooled.x.middleCols(at, t.x.cols()) = t.x;
    at += t.x.cols();
  }

  TaskGraph g = build_task_graph(pooled, knn, sigma);
  SpectralResult all = single_task_sc(g, k, cfg);

  std::vector<SpectralResult> out;
  out.reserve(tasks.size());
  at = 0;
  for (const auto& t : tasks) {
    SpectralResult r;
    r.objective = all.objective;
    r.labels.assign(all.labels.begin() + at,
                    all.labels.begin() + at + t.x.cols());
    at += t.x.cols();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace l2sc
