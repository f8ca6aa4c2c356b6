#pragma once

#include <optional>
#include <string>
#include <vector>

#include "l2sc/matrix.hpp"
#include "l2sc/metrics.hpp"
#include "l2sc/model.hpp"

namespace l2sc {

// One line of the results CSV. Metric fields stay empty when the task has no
// ground-truth labels.
struct ResultRow {
  std::string task_id;
  int phase = 0;  // stream position after which this row was measured
  std::optional<double> purity;
  std::optional<double> nmi;
  std::optional<double> rand_index;
  double objective = 0.0;
  int iters = 0;      // outer iterations of the phase's fit
  double wall_ms = 0.0;
};

struct ManifestTask {
  std::string task_id;
  std::string matrix_path;  // resolved against the manifest's directory
  std::string labels_path;  // empty when absent
};

struct Manifest {
  int k = 0;
  int knn = 0;
  std::optional<double> sigma;
  HyperParams hp;
  std::vector<ManifestTask> tasks;
};

/// Load a matrix file. Two formats, auto-detected from the first line:
/// dense comma-separated (rows = features, columns = samples) or sparse
/// coordinate ("d n nnz" header, then "row col value" triples, 0-indexed).
/// Parse problems throw FormatError naming the line; NaN/Inf entries throw
/// InvalidInput.
Matrix load_matrix(const std::string& path);

/// One integer label per line.
Labels load_labels(const std::string& path);

Manifest load_manifest(const std::string& path);

/// Versioned JSON snapshot of the library, full round-trip precision.
void save_library(const KnowledgeLibrary& lib, const std::string& path);
KnowledgeLibrary load_library(const std::string& path);

/// Fixed-header results CSV.
void write_results_csv(const std::vector<ResultRow>& rows,
                       const std::string& path);

/// Dense CSV writer used by the synth command; 17 significant digits so a
/// reload reproduces every entry exactly.
void save_matrix_csv(const Matrix& m, const std::string& path);
void save_labels(const Labels& labels, const std::string& path);

}  // namespace l2sc
