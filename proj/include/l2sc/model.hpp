#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "l2sc/graph.hpp"
#include "l2sc/matrix.hpp"

namespace l2sc {

struct HyperParams {
  double lambda = 1.0;   // weight of the co-clustering coupling, >= 0
  double mu = 0.1;       // weight of the row-sparsity term on the feature
                         // embedding, >= 0
  double eta0 = 0.1;     // initial gradient step, halved by backtracking
  int max_outer = 100;   // alternation rounds per task
  int max_inner = 50;    // gradient steps per encoding refresh
  double tol = 1e-5;     // relative objective change that counts as converged
  std::int64_t seed = 0;

  void validate() const;
};

// Orthonormal per-sample encoding of one task.
struct TaskEncoding {
  std::string task_id;
  Matrix e;  // n_t x k, e^T e = I
};

// What one task left behind in the library: its encoding plus its exact
// additive contribution to the two statistical records. Keeping the
// contributions means a re-presented task can be subtracted and replaced
// without touching its original data.
struct TaskRecord {
  std::string task_id;
  double lambda = 0.0;
  Matrix e;              // n_t x k
  Matrix kernel_contrib; // k x k, e^T K e
  Matrix embed_contrib;  // d x k, lambda * x_hat * e
};

// Shared state that survives across tasks. Raw task data never lives here;
// only encodings and the summed records do.
struct KnowledgeLibrary {
  int d = 0;
  int k = 0;
  int tasks_seen = 0;
  Matrix basis;              // k x k orthonormal once the first task lands
  Matrix feature_embedding;  // d x k orthonormal once the first task lands
  Matrix kernel_record;      // k x k, sum of per-task e^T K e
  Matrix embed_record;       // d x k, sum of per-task lambda * x_hat * e
  std::vector<TaskRecord> tasks;  // insertion order

  const TaskRecord* find_task(const std::string& task_id) const;
};

struct FitTrace {
  std::vector<double> objective_per_iter;
  int iters = 0;
  bool converged = false;
};

/// Empty library for d-dimensional data and k clusters. Requires d >= k >= 2.
KnowledgeLibrary init_library(int d, int k);

/// Joint objective over explicitly provided tasks:
/// (1/m) sum_t [ tr((E^t B)^T K^t E^t B) + lambda tr(L^T Xhat^t E^t B) ]
///   + mu * sum_i ||row_i(L)||_2.
double objective(const KnowledgeLibrary& lib,
                 const std::vector<TaskGraph>& graphs,
                 const std::vector<TaskEncoding>& encodings,
                 const HyperParams& hp);

/// Same quantity computed from the records alone, no task data needed.
double objective_from_records(const KnowledgeLibrary& lib,
                              const HyperParams& hp);

/// One task's share of the objective under the current basis and embedding,
/// from its stored record: tr(B^T M_t B) + tr(L^T C_t B).
double task_objective(const KnowledgeLibrary& lib, const TaskRecord& rec);

/// Per-task objective the encoding step maximizes:
/// tr((E B)^T K E B) + lambda tr(L^T Xhat E B), with B = I for the very
/// first encode of an empty library.
double encode_objective(const KnowledgeLibrary& lib, const TaskGraph& g,
                        double lambda, const Matrix& e);

/// Projected gradient ascent on the task encoding with backtracking line
/// search. Starts at e_init (orthonormal), never accepts a step that lowers
/// the objective: the step is halved from hp.eta0 down to 1e-12 and the
/// iterate stays put if nothing helps. Trace records the objective after
/// every inner iteration.
TaskEncoding encode_task(const KnowledgeLibrary& lib, const TaskGraph& g,
                         const HyperParams& hp, const Matrix& e_init,
                         FitTrace* trace = nullptr);

/// Registers (or replaces, same task_id) the task's contribution in the
/// records, then recomputes the basis as the eigenvectors of
/// symmetrize(M/m + B_old L^T C/m).
void update_basis(KnowledgeLibrary& lib, const TaskGraph& g,
                  const TaskEncoding& enc, const HyperParams& hp);

/// Feature embedding refresh L = project((C/m) B + mu * Theta * L_old) with
/// Theta_ii = 1 / (2 max(||row_i(L_old)||, 1e-8)). A rank-deficient
/// projection target is retried once with 1e-10 noise, then NumericalFailure.
void update_embedding(KnowledgeLibrary& lib, const HyperParams& hp);

/// Full treatment of one arriving task: spectral initialization of its
/// encoding, then alternating encode / basis / embedding updates until the
/// objective's relative change drops below hp.tol (or max_outer rounds).
/// Previously stored encodings are never re-optimized. Deterministic given
/// hp.seed and the task id.
FitTrace fit_next_task(KnowledgeLibrary& lib, const std::string& task_id,
                       const TaskGraph& g, const HyperParams& hp,
                       TaskEncoding* enc_out = nullptr);

/// Soft cluster assignments of an encoding under the current basis: E * B.
Matrix soft_assignments(const KnowledgeLibrary& lib, const Matrix& e);

}  // namespace l2sc
