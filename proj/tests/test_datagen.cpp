#include <doctest.h>

#include <cmath>

#include "l2sc/datagen.hpp"

using l2sc::StreamSpec;
using l2sc::TaskData;

namespace {

StreamSpec small_spec() {
  StreamSpec spec;
  spec.num_tasks = 3;
  spec.d = 6;
  spec.k_true = {2, 3, 2};
  spec.samples_per_cluster = 5;
  spec.center_drift = 0.05;
  spec.noise_sigma = 0.1;
  spec.seed = 11;
  return spec;
}

}  // namespace

TEST_SUITE("datagen") {

TEST_CASE("shapes, ids and label layout") {
  std::vector<TaskData> stream = l2sc::generate_stream(small_spec());
  REQUIRE(stream.size() == 3);
  CHECK(stream[0].task_id == "task_01");
  CHECK(stream[1].task_id == "task_02");
  CHECK(stream[2].task_id == "task_03");

  CHECK(stream[0].x.rows() == 6);
  CHECK(stream[0].x.cols() == 10);
  CHECK(stream[1].x.cols() == 15);

  // Labels come out block-ordered with exactly samples_per_cluster each.
  for (const TaskData& t : stream) {
    int k = *std::max_element(t.labels.begin(), t.labels.end()) + 1;
    std::vector<int> counts(k, 0);
    for (size_t i = 0; i < t.labels.size(); ++i) {
      counts[t.labels[i]]++;
      CHECK(t.labels[i] == static_cast<int>(i) / 5);
    }
    for (int c : counts) CHECK(c == 5);
  }
}

TEST_CASE("entries are nonnegative and finite") {
  std::vector<TaskData> stream = l2sc::generate_stream(small_spec());
  for (const TaskData& t : stream) {
    CHECK(t.x.allFinite());
    CHECK(t.x.minCoeff() >= 0.0);
  }
}

TEST_CASE("same seed reproduces every bit, different seed does not") {
  std::vector<TaskData> a = l2sc::generate_stream(small_spec());
  std::vector<TaskData> b = l2sc::generate_stream(small_spec());
  for (size_t t = 0; t < a.size(); ++t) {
    CHECK((a[t].x - b[t].x).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a[t].labels == b[t].labels);
  }
  StreamSpec other = small_spec();
  other.seed = 12;
  std::vector<TaskData> c = l2sc::generate_stream(other);
  CHECK((a[0].x - c[0].x).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("noiseless, drift-free tasks collapse onto unit-separated centers") {
  StreamSpec spec = small_spec();
  spec.center_drift = 0.0;
  spec.noise_sigma = 0.0;
  std::vector<TaskData> stream = l2sc::generate_stream(spec);

  const TaskData& t = stream[0];
  for (int i = 0; i < t.x.cols(); ++i)
    for (int j = i + 1; j < t.x.cols(); ++j) {
      double dist = (t.x.col(i) - t.x.col(j)).norm();
      if (t.labels[i] == t.labels[j])
        CHECK(dist == 0.0);
      else
        CHECK(dist == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("input validation") {
  StreamSpec spec = small_spec();
  spec.num_tasks = 0;
  spec.k_true = {};
  CHECK_THROWS_AS(l2sc::generate_stream(spec), l2sc::InvalidInput);

  spec = small_spec();
  spec.k_true = {2, 3};  // one entry short
  CHECK_THROWS_AS(l2sc::generate_stream(spec), l2sc::InvalidInput);

  spec = small_spec();
  spec.samples_per_cluster = 0;
  CHECK_THROWS_AS(l2sc::generate_stream(spec), l2sc::InvalidInput);

  spec = small_spec();
  spec.noise_sigma = -0.1;
  CHECK_THROWS_AS(l2sc::generate_stream(spec), l2sc::InvalidInput);

  spec = small_spec();
  spec.d = 2;  // max(k_true) = 3 > d
  CHECK_THROWS_AS(l2sc::generate_stream(spec), l2sc::InvalidInput);
}

}  // TEST_SUITE
