#include "l2sc/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "l2sc/linalg.hpp"

namespace l2sc {

namespace {

constexpr double kEtaFloor = 1e-12;
constexpr double kRowNormFloor = 1e-8;

double rel_change(double prev, double cur) {
  return std::abs(cur - prev) / std::max(1.0, std::abs(prev));
}

// Stiefel projection with the documented one-shot recovery: a rank-deficient
// target gets 1e-10-scale Gaussian noise added once; a second failure is a
// NumericalFailure.
Matrix project_with_retry(const Matrix& x, std::mt19937_64& rng,
                          const char* who) {
  try {
    return stiefel_project(x);
  } catch (const RankDeficient&) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix jittered = x;
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      for (Eigen::Index i = 0; i < x.rows(); ++i)
        jittered(i, j) += 1e-10 * gauss(rng);
    try {
      return stiefel_project(jittered);
    } catch (const RankDeficient&) {
      throw NumericalFailure(std::string(who) +
                             ": projection target rank-deficient even after "
                             "perturbation");
    }
  }
}

Matrix basis_or_identity(const KnowledgeLibrary& lib) {
  // An empty library has no meaningful basis yet (it is all zeros); the
  // first encode runs against the identity so the gradient does not vanish.
  if (lib.tasks_seen == 0) return Matrix::Identity(lib.k, lib.k);
  return lib.basis;
}

double l21_norm(const Matrix& m) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) s += m.row(i).norm();
  return s;
}

void check_graph_dims(const KnowledgeLibrary& lib, const TaskGraph& g,
                      const char* who) {
  if (g.kernel.rows() != g.kernel.cols())
    throw InvalidInput(std::string(who) + ": kernel must be square");
  if (g.x_hat.cols() != g.kernel.rows())
    throw InvalidInput(std::string(who) + ": x_hat and kernel disagree on n");
  if (g.x_hat.rows() != lib.d)
    throw InvalidInput(std::string(who) + ": task dimensionality != library d");
  if (g.kernel.rows() < lib.k)
    throw InvalidInput(std::string(who) + ": need at least k samples");
}

}  // namespace

void HyperParams::validate() const {
  if (lambda < 0.0 || mu < 0.0)
    throw InvalidInput("hyperparams: lambda and mu must be >= 0");
  if (!(eta0 > 0.0)) throw InvalidInput("hyperparams: eta0 must be > 0");
  if (max_outer < 1 || max_inner < 1)
    throw InvalidInput("hyperparams: iteration caps must be >= 1");
  if (!(tol > 0.0)) throw InvalidInput("hyperparams: tol must be > 0");
}

const TaskRecord* KnowledgeLibrary::find_task(const std::string& task_id) const {
  for (const auto& rec : tasks)
    if (rec.task_id == task_id) return &rec;
  return nullptr;
}

KnowledgeLibrary init_library(int d, int k) {
  if (k < 2 || d < k)
    throw InvalidInput("init_library: need d >= k >= 2");
  KnowledgeLibrary lib;
  lib.d = d;
  lib.k = k;
  lib.tasks_seen = 0;
  lib.basis = Matrix::Zero(k, k);
  lib.feature_embedding = Matrix::Zero(d, k);
  lib.kernel_record = Matrix::Zero(k, k);
  lib.embed_record = Matrix::Zero(d, k);
  return lib;
}

double encode_objective(const KnowledgeLibrary& lib, const TaskGraph& g,
                        double lambda, const Matrix& e) {
  Matrix b = basis_or_identity(lib);
  Matrix f = e * b;                                        // n x k
  double quad = (f.transpose() * (g.kernel * f)).trace();  // tr(F^T K F)
  double lin =
      lambda * (lib.feature_embedding.transpose() * (g.x_hat * f)).trace();
  return quad + lin;
}

double objective(const KnowledgeLibrary& lib,
                 const std::vector<TaskGraph>& graphs,
                 const std::vector<TaskEncoding>& encodings,
                 const HyperParams& hp) {
  hp.validate();
  if (graphs.empty() || graphs.size() != encodings.size())
    throw InvalidInput("objective: graphs and encodings must align");
  const double m = static_cast<double>(graphs.size());
  double acc = 0.0;
  for (size_t t = 0; t < graphs.size(); ++t) {
    const Matrix& e = encodings[t].e;
    if (e.cols() != lib.k || e.rows() != graphs[t].kernel.rows())
      throw InvalidInput("objective: encoding shape mismatch");
    Matrix f = e * lib.basis;
    acc += (f.transpose() * (graphs[t].kernel * f)).trace();
    acc += hp.lambda *
           (lib.feature_embedding.transpose() * (graphs[t].x_hat * f)).trace();
  }
  return acc / m + hp.mu * l21_norm(lib.feature_embedding);
}

double objective_from_records(const KnowledgeLibrary& lib,
                              const HyperParams& hp) {
  if (lib.tasks_seen == 0)
    throw InvalidInput("objective_from_records: empty library");
  const double m = static_cast<double>(lib.tasks_seen);
  double quad = (lib.basis.transpose() * lib.kernel_record * lib.basis).trace();
  double lin =
      (lib.feature_embedding.transpose() * lib.embed_record * lib.basis).trace();
  return (quad + lin) / m + hp.mu * l21_norm(lib.feature_embedding);
}

double task_objective(const KnowledgeLibrary& lib, const TaskRecord& rec) {
  double quad = (lib.basis.transpose() * rec.kernel_contrib * lib.basis).trace();
  double lin =
      (lib.feature_embedding.transpose() * rec.embed_contrib * lib.basis).trace();
  return quad + lin;
}

TaskEncoding encode_task(const KnowledgeLibrary& lib, const TaskGraph& g,
                         const HyperParams& hp, const Matrix& e_init,
                         FitTrace* trace) {
  hp.validate();
  check_graph_dims(lib, g, "encode_task");
  if (e_init.rows() != g.kernel.rows() || e_init.cols() != lib.k)
    throw InvalidInput("encode_task: e_init shape mismatch");
  require_finite(e_init, "encode_task: e_init");
  if (orthonormality_defect(e_init) > 1e-6)
    throw InvalidInput("encode_task: e_init must have orthonormal columns");

  std::mt19937_64 rng(static_cast<std::uint64_t>(hp.seed) ^
                      0x9e3779b97f4a7c15ULL);
  Matrix b = basis_or_identity(lib);
  Matrix bbt = b * b.transpose();
  // The linear pull toward the shared feature embedding is constant in E.
  Matrix pull = hp.lambda *
                (g.x_hat.transpose() * lib.feature_embedding * b.transpose());

  Matrix e = e_init;
  double f_cur = encode_objective(lib, g, hp.lambda, e);
  if (trace) {
    trace->objective_per_iter.clear();
    trace->iters = 0;
    trace->converged = false;
  }

  for (int it = 0; it < hp.max_inner; ++it) {
    Matrix grad = 2.0 * (g.kernel * e * bbt) + pull;

    // Backtracking: accept the first step that does not lower the
    // objective; below the floor the iterate stays where it is.
    bool moved = false;
    double f_prev = f_cur;
    for (double eta = hp.eta0; eta >= kEtaFloor; eta *= 0.5) {
      Matrix e_try = project_with_retry(e + eta * grad, rng, "encode_task");
      double f_try = encode_objective(lib, g, hp.lambda, e_try);
      if (f_try >= f_cur) {
        e = std::move(e_try);
        f_cur = f_try;
        moved = true;
        break;
      }
    }

    if (trace) {
      trace->objective_per_iter.push_back(f_cur);
      trace->iters = it + 1;
    }
    if (!moved || rel_change(f_prev, f_cur) <= hp.tol) {
      if (trace) trace->converged = true;
      break;
    }
  }

  TaskEncoding enc;
  enc.e = std::move(e);
  return enc;
}

void update_basis(KnowledgeLibrary& lib, const TaskGraph& g,
                  const TaskEncoding& enc, const HyperParams& hp) {
  hp.validate();
  check_graph_dims(lib, g, "update_basis");
  if (enc.e.rows() != g.kernel.rows() || enc.e.cols() != lib.k)
    throw InvalidInput("update_basis: encoding shape mismatch");

  Matrix kc = enc.e.transpose() * g.kernel * enc.e;  // k x k
  kc = 0.5 * (kc + kc.transpose()).eval();           // keep exactly symmetric
  Matrix ec = hp.lambda * (g.x_hat * enc.e);         // d x k

  auto it = std::find_if(lib.tasks.begin(), lib.tasks.end(),
                         [&](const TaskRecord& r) {
                           return r.task_id == enc.task_id;
                         });
  if (it != lib.tasks.end()) {
    // Same task shown again: subtract what it contributed last time.
    lib.kernel_record -= it->kernel_contrib;
    lib.embed_record -= it->embed_contrib;
    it->lambda = hp.lambda;
    it->e = enc.e;
    it->kernel_contrib = kc;
    it->embed_contrib = ec;
  } else {
    TaskRecord rec;
    rec.task_id = enc.task_id;
    rec.lambda = hp.lambda;
    rec.e = enc.e;
    rec.kernel_contrib = kc;
    rec.embed_contrib = ec;
    lib.tasks.push_back(std::move(rec));
    lib.tasks_seen += 1;
  }
  lib.kernel_record += kc;
  lib.embed_record += ec;

  const double m = static_cast<double>(lib.tasks_seen);
  Matrix s = lib.kernel_record / m +
             lib.basis * lib.feature_embedding.transpose() * lib.embed_record / m;
  s = 0.5 * (s + s.transpose()).eval();
  lib.basis = sym_eig_topk(s, lib.k);
}

void update_embedding(KnowledgeLibrary& lib, const HyperParams& hp) {
  hp.validate();
  if (lib.tasks_seen < 1)
    throw InvalidInput("update_embedding: no tasks registered yet");

  const double m = static_cast<double>(lib.tasks_seen);
  // Theta * L_old row by row: each row of L_old rescaled by
  // 1 / (2 max(||row||, floor)).
  Matrix theta_l = lib.feature_embedding;
  for (Eigen::Index i = 0; i < theta_l.rows(); ++i) {
    double nrm = lib.feature_embedding.row(i).norm();
    theta_l.row(i) /= 2.0 * std::max(nrm, kRowNormFloor);
  }
  Matrix target = (lib.embed_record / m) * lib.basis + hp.mu * theta_l;

  std::mt19937_64 rng(static_cast<std::uint64_t>(hp.seed) ^
                      0xc2b2ae3d27d4eb4fULL);
  lib.feature_embedding = project_with_retry(target, rng, "update_embedding");
}

FitTrace fit_next_task(KnowledgeLibrary& lib, const std::string& task_id,
                       const TaskGraph& g, const HyperParams& hp,
                       TaskEncoding* enc_out) {
  hp.validate();
  check_graph_dims(lib, g, "fit_next_task");
  if (task_id.empty()) throw InvalidInput("fit_next_task: empty task id");

  TaskEncoding enc;
  enc.task_id = task_id;
  enc.e = sym_eig_topk(g.kernel, lib.k);  // spectral warm start

  FitTrace trace;
  double prev = 0.0;
  for (int round = 0; round < hp.max_outer; ++round) {
    enc = encode_task(lib, g, hp, enc.e);
    enc.task_id = task_id;
    update_basis(lib, g, enc, hp);
    update_embedding(lib, hp);

    double obj = objective_from_records(lib, hp);
    trace.objective_per_iter.push_back(obj);
    trace.iters = round + 1;
    if (round > 0 && rel_change(prev, obj) < hp.tol) {
      trace.converged = true;
      break;
    }
    prev = obj;
  }

  if (enc_out) *enc_out = enc;
  return trace;
}

Matrix soft_assignments(const KnowledgeLibrary& lib, const Matrix& e) {
  if (e.cols() != lib.k)
    throw InvalidInput("soft_assignments: encoding has wrong column count");
  return e * lib.basis;
}

}  // namespace l2sc
