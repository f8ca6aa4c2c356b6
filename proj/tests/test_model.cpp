#include <doctest.h>

#include <cmath>
#include <random>

#include "l2sc/graph.hpp"
#include "l2sc/linalg.hpp"
#include "l2sc/model.hpp"
#include "test_util.hpp"

using l2sc::HyperParams;
using l2sc::KnowledgeLibrary;
using l2sc::Matrix;
using l2sc::TaskEncoding;
using l2sc::TaskGraph;

namespace {

TaskGraph graph_for(const l2sc::TaskData& t, int knn, double sigma) {
  return l2sc::build_task_graph(t, knn, sigma);
}

// Library shell around explicit field values, bypassing init_library's
// d >= k >= 2 gate for the k = 1 toy cases.
KnowledgeLibrary raw_library(int d, int k) {
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

// The per-task objective written out directly, used as the reference for
// the gradient check: tr((EB)^T K E B) + lambda tr(L^T Xhat E B).
double direct_objective(const Matrix& kernel, const Matrix& x_hat,
                        const Matrix& b, const Matrix& l, double lambda,
                        const Matrix& e) {
  Matrix f = e * b;
  return (f.transpose() * kernel * f).trace() +
         lambda * (l.transpose() * x_hat * f).trace();
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("init_library validates its arguments") {
  CHECK_THROWS_AS(l2sc::init_library(1, 2), l2sc::InvalidInput);
  CHECK_THROWS_AS(l2sc::init_library(5, 1), l2sc::InvalidInput);
  KnowledgeLibrary lib = l2sc::init_library(5, 3);
  CHECK(lib.tasks_seen == 0);
  CHECK(lib.basis.cwiseAbs().maxCoeff() == 0.0);
  CHECK(lib.feature_embedding.rows() == 5);
}

TEST_CASE("objective on a one-task, k=1 toy matches the hand value") {
  KnowledgeLibrary lib = raw_library(2, 1);
  lib.basis = Matrix::Ones(1, 1);
  lib.tasks_seen = 1;

  TaskGraph g;
  g.kernel = Matrix::Zero(2, 2);
  g.kernel(0, 0) = 1.0;
  g.x_hat = Matrix::Zero(2, 2);
  g.sigma = 1.0;
  g.knn = 1;

  TaskEncoding enc;
  enc.task_id = "t";
  enc.e = Matrix::Zero(2, 1);
  enc.e(0, 0) = 1.0;

  HyperParams hp;
  hp.lambda = 0.0;
  hp.mu = 0.0;
  CHECK(l2sc::objective(lib, {g}, {enc}, hp) == doctest::Approx(1.0));
}

TEST_CASE("analytic encoding gradient matches central differences") {
  std::mt19937_64 rng(51);
  const int n = 10, d = 6, k = 3;
  const double h = 1e-5;

  for (int trial = 0; trial < 3; ++trial) {
    l2sc::TaskData t = testutil::blob_task(d, k, 4, 0.4, rng);
    TaskGraph g = graph_for(t, 3, 1.0);
    REQUIRE(g.kernel.rows() == n + 2);

    KnowledgeLibrary lib = l2sc::init_library(d, k);
    lib.basis = testutil::random_orthonormal(k, k, rng);
    lib.feature_embedding = testutil::random_orthonormal(d, k, rng);
    lib.tasks_seen = 1;  // so encode_objective uses lib.basis, not identity
    const double lambda = 0.8;

    Matrix e = testutil::random_orthonormal(static_cast<int>(g.kernel.rows()),
                                            k, rng);
    Matrix analytic =
        2.0 * (g.kernel * e * (lib.basis * lib.basis.transpose())) +
        lambda * (g.x_hat.transpose() * lib.feature_embedding *
                  lib.basis.transpose());

    Matrix fd(e.rows(), e.cols());
    for (int i = 0; i < e.rows(); ++i)
      for (int j = 0; j < e.cols(); ++j) {
        Matrix ep = e, em = e;
        ep(i, j) += h;
        em(i, j) -= h;
        fd(i, j) = (direct_objective(g.kernel, g.x_hat, lib.basis,
                                     lib.feature_embedding, lambda, ep) -
                    direct_objective(g.kernel, g.x_hat, lib.basis,
                                     lib.feature_embedding, lambda, em)) /
                   (2.0 * h);
      }
    double rel = (analytic - fd).norm() / std::max(1.0, analytic.norm());
    CHECK(rel <= 1e-5);
  }
}

TEST_CASE("encode_task climbs the k=1 toy to the dominant eigenvector") {
  KnowledgeLibrary lib = raw_library(2, 1);

  TaskGraph g;
  g.kernel = Matrix::Zero(2, 2);
  g.kernel(0, 0) = 1.0;
  g.x_hat = Matrix::Zero(2, 2);
  g.sigma = 1.0;
  g.knn = 1;

  Matrix e0(2, 1);
  e0 << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);

  HyperParams hp;
  hp.lambda = 0.0;
  hp.mu = 0.0;
  hp.max_inner = 50;
  hp.tol = 1e-9;
  l2sc::FitTrace trace;
  TaskEncoding enc = l2sc::encode_task(lib, g, hp, e0, &trace);

  CHECK(std::abs(std::abs(enc.e(0, 0)) - 1.0) <= 1e-2);
  double obj = l2sc::encode_objective(lib, g, 0.0, enc.e);
  CHECK(obj >= 1.0 - 1e-4);
  CHECK(obj <= 1.0 + 1e-12);
}

TEST_CASE("encode_task leaves a stationary initialization alone") {
  std::mt19937_64 rng(52);
  l2sc::TaskData t = testutil::blob_task(5, 2, 8, 0.3, rng);
  TaskGraph g = graph_for(t, 3, 1.0);
  KnowledgeLibrary lib = l2sc::init_library(5, 2);  // tasks_seen = 0: B = I

  Matrix e0 = l2sc::sym_eig_topk(g.kernel, 2);
  HyperParams hp;
  hp.lambda = 0.0;
  double before = l2sc::encode_objective(lib, g, 0.0, e0);
  TaskEncoding enc = l2sc::encode_task(lib, g, hp, e0);
  double after = l2sc::encode_objective(lib, g, 0.0, enc.e);
  CHECK(std::abs(after - before) <= 1e-10);

  // Same subspace: the projector onto the columns is unchanged.
  Matrix p0 = e0 * e0.transpose();
  Matrix p1 = enc.e * enc.e.transpose();
  CHECK((p0 - p1).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("encode_task never lowers the objective along its trace") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 5; ++trial) {
    l2sc::TaskData t = testutil::blob_task(6, 3, 6, 0.5, rng);
    TaskGraph g = graph_for(t, 4, 1.0);
    KnowledgeLibrary lib = l2sc::init_library(6, 3);
    lib.basis = testutil::random_orthonormal(3, 3, rng);
    lib.feature_embedding = testutil::random_orthonormal(6, 3, rng);
    lib.tasks_seen = 1;

    HyperParams hp;
    hp.lambda = 1.5;
    hp.max_inner = 30;
    Matrix e0 = testutil::random_orthonormal(18, 3, rng);
    double before = l2sc::encode_objective(lib, g, hp.lambda, e0);

    l2sc::FitTrace trace;
    TaskEncoding enc = l2sc::encode_task(lib, g, hp, e0, &trace);
    REQUIRE(!trace.objective_per_iter.empty());
    double prev = before;
    for (double v : trace.objective_per_iter) {
      CHECK(v >= prev - 1e-12);
      prev = v;
    }
    CHECK(l2sc::encode_objective(lib, g, hp.lambda, enc.e) >= before - 1e-12);
    CHECK(l2sc::orthonormality_defect(enc.e) <= 1e-8);
  }
}

TEST_CASE("encode_task rejects a non-orthonormal start") {
  std::mt19937_64 rng(54);
  l2sc::TaskData t = testutil::blob_task(5, 2, 6, 0.3, rng);
  TaskGraph g = graph_for(t, 3, 1.0);
  KnowledgeLibrary lib = l2sc::init_library(5, 2);
  Matrix bad = Matrix::Ones(12, 2);
  CHECK_THROWS_AS(l2sc::encode_task(lib, g, HyperParams{}, bad),
                  l2sc::InvalidInput);
}

TEST_CASE("update_basis on the first task diagonalizes the kernel record") {
  std::mt19937_64 rng(55);
  l2sc::TaskData t = testutil::blob_task(6, 2, 8, 0.4, rng);
  TaskGraph g = graph_for(t, 3, 1.0);
  KnowledgeLibrary lib = l2sc::init_library(6, 2);

  TaskEncoding enc;
  enc.task_id = "a";
  enc.e = l2sc::sym_eig_topk(g.kernel, 2);
  HyperParams hp;
  hp.lambda = 0.7;
  l2sc::update_basis(lib, g, enc, hp);

  CHECK(lib.tasks_seen == 1);
  CHECK(l2sc::orthonormality_defect(lib.basis) <= 1e-8);

  // With L = 0 the basis must diagonalize M/1, eigenvalues nonincreasing.
  Matrix m = lib.kernel_record;
  Matrix lam = lib.basis.transpose() * m * lib.basis;
  CHECK((m * lib.basis - lib.basis * lam.diagonal().asDiagonal().toDenseMatrix())
            .cwiseAbs()
            .maxCoeff() <= 1e-8);
  CHECK(lam(0, 0) >= lam(1, 1) - 1e-12);
  CHECK((lib.kernel_record - lib.kernel_record.transpose())
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("records stay additive and re-presenting replaces, not adds") {
  std::mt19937_64 rng(56);
  HyperParams hp;
  hp.lambda = 0.9;
  hp.mu = 0.05;
  hp.max_outer = 30;

  KnowledgeLibrary lib = l2sc::init_library(6, 2);
  std::vector<TaskGraph> graphs;
  std::vector<TaskEncoding> encs;
  for (int t = 0; t < 3; ++t) {
    l2sc::TaskData data =
        testutil::blob_task(6, 2, 7, 0.4, rng, "t" + std::to_string(t));
    graphs.push_back(graph_for(data, 3, 1.0));
    TaskEncoding enc;
    l2sc::fit_next_task(lib, data.task_id, graphs.back(), hp, &enc);
    encs.push_back(enc);
  }
  CHECK(lib.tasks_seen == 3);

  Matrix m_sum = Matrix::Zero(2, 2);
  Matrix c_sum = Matrix::Zero(6, 2);
  for (int t = 0; t < 3; ++t) {
    const Matrix& e = lib.tasks[t].e;
    m_sum += e.transpose() * graphs[t].kernel * e;
    c_sum += hp.lambda * graphs[t].x_hat * e;
  }
  CHECK((lib.kernel_record - m_sum).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((lib.embed_record - c_sum).cwiseAbs().maxCoeff() <= 1e-10);

  // Present t1 again: tasks_seen stays 3 and the records still equal the
  // explicit sums over the (updated) stored encodings.
  l2sc::fit_next_task(lib, "t1", graphs[1], hp);
  CHECK(lib.tasks_seen == 3);
  m_sum.setZero();
  c_sum.setZero();
  for (int t = 0; t < 3; ++t) {
    const Matrix& e = lib.tasks[t].e;
    m_sum += e.transpose() * graphs[t].kernel * e;
    c_sum += hp.lambda * graphs[t].x_hat * e;
  }
  CHECK((lib.kernel_record - m_sum).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((lib.embed_record - c_sum).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("update_embedding keeps L orthonormal, also from a cold start") {
  std::mt19937_64 rng(57);
  l2sc::TaskData t = testutil::blob_task(6, 2, 8, 0.4, rng);
  TaskGraph g = graph_for(t, 3, 1.0);
  KnowledgeLibrary lib = l2sc::init_library(6, 2);

  HyperParams hp;
  hp.lambda = 1.0;
  hp.mu = 0.2;
  TaskEncoding enc;
  enc.task_id = "a";
  enc.e = l2sc::sym_eig_topk(g.kernel, 2);
  l2sc::update_basis(lib, g, enc, hp);

  l2sc::update_embedding(lib, hp);  // L_old = 0: the Theta floor must hold
  CHECK(lib.feature_embedding.allFinite());
  CHECK(l2sc::orthonormality_defect(lib.feature_embedding) <= 1e-8);

  // mu = 0 reduces the update to the projection of (C/m) B.
  HyperParams hp0 = hp;
  hp0.mu = 0.0;
  Matrix target = lib.embed_record * lib.basis;  // m = 1
  Matrix expect = l2sc::stiefel_project(target);
  l2sc::update_embedding(lib, hp0);
  CHECK((lib.feature_embedding - expect).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("update_embedding survives an all-zero target via the retry") {
  KnowledgeLibrary lib = l2sc::init_library(5, 2);
  std::mt19937_64 rng(58);
  l2sc::TaskData t = testutil::blob_task(5, 2, 6, 0.3, rng);
  TaskGraph g = graph_for(t, 3, 1.0);
  HyperParams hp;
  hp.lambda = 0.0;  // C stays zero
  hp.mu = 0.0;      // and so does the Theta term
  TaskEncoding enc;
  enc.task_id = "a";
  enc.e = l2sc::sym_eig_topk(g.kernel, 2);
  l2sc::update_basis(lib, g, enc, hp);
  l2sc::update_embedding(lib, hp);
  CHECK(l2sc::orthonormality_defect(lib.feature_embedding) <= 1e-8);
  KnowledgeLibrary empty = l2sc::init_library(5, 2);
  CHECK_THROWS_AS(l2sc::update_embedding(empty, hp),
                  l2sc::InvalidInput);  // no tasks yet
}

TEST_CASE("fit_next_task returns orthonormal factors and converges") {
  std::mt19937_64 rng(59);
  HyperParams hp;
  hp.lambda = 1.0;
  hp.mu = 0.1;

  KnowledgeLibrary lib = l2sc::init_library(8, 2);
  for (int t = 0; t < 3; ++t) {
    l2sc::TaskData data =
        testutil::blob_task(8, 2, 8, 0.4, rng, "s" + std::to_string(t));
    TaskGraph g = graph_for(data, 3, 1.0);
    l2sc::FitTrace trace = l2sc::fit_next_task(lib, data.task_id, g, hp);
    CHECK(trace.converged);
    CHECK(trace.iters <= hp.max_outer);
    CHECK(l2sc::orthonormality_defect(lib.basis) <= 1e-8);
    CHECK(l2sc::orthonormality_defect(lib.feature_embedding) <= 1e-8);
    for (const auto& rec : lib.tasks)
      CHECK(l2sc::orthonormality_defect(rec.e) <= 1e-8);
  }
  CHECK(lib.tasks_seen == 3);
}

TEST_CASE("a task repeated under the same data is served about as well") {
  std::mt19937_64 rng(60);
  l2sc::TaskData data = testutil::blob_task(8, 2, 10, 0.4, rng, "first");
  TaskGraph g = graph_for(data, 3, 1.0);

  HyperParams hp;
  hp.lambda = 1.0;
  hp.mu = 0.1;
  KnowledgeLibrary lib = l2sc::init_library(8, 2);
  l2sc::fit_next_task(lib, "first", g, hp);
  double obj_first = l2sc::task_objective(lib, *lib.find_task("first"));

  // The shared basis keeps moving as the library averages both copies, so
  // the two per-task objectives agree only up to that drift.
  l2sc::TaskData clone = data;
  clone.task_id = "second";
  l2sc::fit_next_task(lib, "second", g, hp);
  double obj_second = l2sc::task_objective(lib, *lib.find_task("second"));
  CHECK(obj_second >= obj_first - 1e-3 * std::max(1.0, std::abs(obj_first)));
}

TEST_CASE("fit_next_task is deterministic") {
  auto run = [] {
    std::mt19937_64 rng(61);
    HyperParams hp;
    hp.lambda = 1.2;
    hp.mu = 0.3;
    hp.seed = 17;
    KnowledgeLibrary lib = l2sc::init_library(7, 2);
    for (int t = 0; t < 2; ++t) {
      l2sc::TaskData data =
          testutil::blob_task(7, 2, 8, 0.5, rng, "d" + std::to_string(t));
      TaskGraph g = l2sc::build_task_graph(data, 3, 1.0);
      l2sc::fit_next_task(lib, data.task_id, g, hp);
    }
    return lib;
  };
  KnowledgeLibrary a = run();
  KnowledgeLibrary b = run();
  CHECK((a.basis - b.basis).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.feature_embedding - b.feature_embedding).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK((a.kernel_record - b.kernel_record).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("objective computed from records matches the explicit sum") {
  std::mt19937_64 rng(62);
  HyperParams hp;
  hp.lambda = 0.8;
  hp.mu = 0.15;
  KnowledgeLibrary lib = l2sc::init_library(6, 2);
  std::vector<TaskGraph> graphs;
  std::vector<TaskEncoding> encs;
  for (int t = 0; t < 3; ++t) {
    l2sc::TaskData data =
        testutil::blob_task(6, 2, 7, 0.5, rng, "o" + std::to_string(t));
    graphs.push_back(graph_for(data, 3, 1.0));
    TaskEncoding enc;
    l2sc::fit_next_task(lib, data.task_id, graphs.back(), hp, &enc);
    encs.push_back(enc);
  }
  double via_records = l2sc::objective_from_records(lib, hp);
  double via_tasks = l2sc::objective(lib, graphs, encs, hp);
  CHECK(via_records == doctest::Approx(via_tasks).epsilon(1e-10));
}

TEST_CASE("soft_assignments rotates the encoding by the basis") {
  std::mt19937_64 rng(63);
  KnowledgeLibrary lib = l2sc::init_library(5, 2);
  lib.basis = testutil::random_orthonormal(2, 2, rng);
  Matrix e = testutil::random_orthonormal(9, 2, rng);
  Matrix f = l2sc::soft_assignments(lib, e);
  CHECK((f - e * lib.basis).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(l2sc::soft_assignments(lib, Matrix::Zero(9, 3)),
                  l2sc::InvalidInput);
}

TEST_CASE("hyperparameter validation") {
  HyperParams hp;
  hp.lambda = -1.0;
  CHECK_THROWS_AS(hp.validate(), l2sc::InvalidInput);
  hp = HyperParams{};
  hp.eta0 = 0.0;
  CHECK_THROWS_AS(hp.validate(), l2sc::InvalidInput);
  hp = HyperParams{};
  hp.max_inner = 0;
  CHECK_THROWS_AS(hp.validate(), l2sc::InvalidInput);
  hp = HyperParams{};
  hp.tol = 0.0;
  CHECK_THROWS_AS(hp.validate(), l2sc::InvalidInput);
}

}  // TEST_SUITE
