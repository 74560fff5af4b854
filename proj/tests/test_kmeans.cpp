#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "emkm/kmeans.hpp"
#include "helpers.hpp"

using emkm::Assignment;
using emkm::assign_nearest;
using emkm::Dataset;
using emkm::euclidean_distance;
using emkm::Rng;
using emkm::Vec;

TEST_CASE("euclidean_distance: hand values") {
  CHECK(euclidean_distance(Vec{0, 0}, Vec{3, 4}) == doctest::Approx(5.0));
  CHECK(euclidean_distance(Vec{1.5, -2.0}, Vec{1.5, -2.0}) == 0.0);
  CHECK(euclidean_distance(Vec{1.0}, Vec{4.0}) == doctest::Approx(3.0));
  CHECK_THROWS_AS(euclidean_distance(Vec{1.0}, Vec{1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("assign_nearest: a point sitting on a mean joins it") {
  const auto data = Dataset::from_rows({{5.0, 5.0}});
  const auto a = assign_nearest(data, {{0.0, 0.0}, {5.0, 5.0}}, nullptr);
  CHECK(a.labels[0] == 1);
  CHECK(a.changed == 1);  // first pass counts everything
}

TEST_CASE("assign_nearest: exact ties go to the lowest cluster index") {
  const auto data = Dataset::from_rows({{1.0, 0.0}});
  const auto a = assign_nearest(data, {{0.0, 0.0}, {2.0, 0.0}}, nullptr);
  CHECK(a.labels[0] == 0);
}

TEST_CASE("assign_nearest: matches the exhaustive scan on a random instance") {
  Rng rng(31);
  const auto data = testutil::random_dataset(30, 2, rng, 3.0);
  std::vector<Vec> means;
  for (int j = 0; j < 3; ++j) {
    const auto row = data.row(rng.next_index(30));
    means.emplace_back(row.begin(), row.end());
  }
  const auto a = assign_nearest(data, means, nullptr);
  for (std::size_t i = 0; i < 30; ++i) {
    std::size_t best = 0;
    double best_d = euclidean_distance(data.row(i), means[0]);
    for (std::size_t j = 1; j < 3; ++j) {
      const double d = euclidean_distance(data.row(i), means[j]);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    CHECK(static_cast<std::size_t>(a.labels[i]) == best);
  }
}

TEST_CASE("assign_nearest: idempotent under unchanged means") {
  Rng rng(37);
  const auto data = testutil::random_dataset(50, 3, rng);
  std::vector<Vec> means;
  for (int j = 0; j < 4; ++j) {
    const auto row = data.row(rng.next_index(50));
    means.emplace_back(row.begin(), row.end());
  }
  const auto first = assign_nearest(data, means, nullptr);
  const auto second = assign_nearest(data, means, &first);
  CHECK(second.changed == 0);
  CHECK(second.labels == first.labels);
}

TEST_CASE("update_means: midpoint and singleton") {
  const auto data = Dataset::from_rows({{0.0, 0.0}, {2.0, 2.0}, {9.0, 9.0}});
  Assignment a;
  a.labels = {0, 0, 1};
  const auto upd = emkm::update_means(data, a, {{0.5, 0.5}, {8.0, 8.0}});
  CHECK(upd.means[0] == Vec{1.0, 1.0});
  CHECK(upd.means[1] == Vec{9.0, 9.0});
  CHECK(upd.counts == std::vector<std::size_t>{2, 1});
}

TEST_CASE("update_means: empty cluster re-seeded with the farthest point") {
  const auto data = Dataset::from_rows({{0.0}, {1.0}, {10.0}});
  Assignment a;
  a.labels = {0, 0, 0};  // cluster 1 empty
  const auto upd = emkm::update_means(data, a, {{0.0}, {0.5}});
  CHECK(upd.counts[1] == 0);
  CHECK(upd.means[1] == Vec{10.0});  // farthest from the stale mean 0.5
}

TEST_CASE("update_means: means stay inside their members' bounding box") {
  Rng rng(41);
  const auto data = testutil::random_dataset(60, 4, rng, 2.0);
  std::vector<Vec> means;
  for (int j = 0; j < 5; ++j) {
    const auto row = data.row(rng.next_index(60));
    means.emplace_back(row.begin(), row.end());
  }
  const auto a = assign_nearest(data, means, nullptr);
  const auto upd = emkm::update_means(data, a, means);
  for (std::size_t j = 0; j < 5; ++j) {
    if (upd.counts[j] == 0) continue;
    for (std::size_t c = 0; c < 4; ++c) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t i = 0; i < 60; ++i)
        if (static_cast<std::size_t>(a.labels[i]) == j) {
          lo = std::min(lo, data(i, c));
          hi = std::max(hi, data(i, c));
        }
      CHECK(upd.means[j][c] >= lo - 1e-12);
      CHECK(upd.means[j][c] <= hi + 1e-12);
    }
  }
}

TEST_CASE("kmeans_run: recovers the centroids of two separated blobs") {
  Rng rng(43);
  const auto data = testutil::two_blobs(100, 50.0, rng);
  // seeds inside each blob
  std::vector<Vec> init;
  {
    const auto r0 = data.row(3);
    const auto r1 = data.row(150);
    init.emplace_back(r0.begin(), r0.end());
    init.emplace_back(r1.begin(), r1.end());
  }
  emkm::ClusterOptions opts;
  const auto res = emkm::kmeans_run(data, init, opts);

  // exact per-blob means
  Vec blob0(2, 0.0), blob1(2, 0.0);
  for (std::size_t i = 0; i < 100; ++i)
    for (std::size_t c = 0; c < 2; ++c) blob0[c] += data(i, c) / 100.0;
  for (std::size_t i = 100; i < 200; ++i)
    for (std::size_t c = 0; c < 2; ++c) blob1[c] += data(i, c) / 100.0;

  const bool direct = euclidean_distance(res.means[0], blob0) < 1.0;
  const auto& m0 = direct ? res.means[0] : res.means[1];
  const auto& m1 = direct ? res.means[1] : res.means[0];
  CHECK(euclidean_distance(m0, blob0) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(euclidean_distance(m1, blob1) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("kmeans_run: a fixed point stops once a pass moves nothing") {
  // means already at the optima of this 4-point instance: the pass after the
  // initial one reassigns zero points and the run stops there
  const auto data = Dataset::from_rows({{0.0}, {1.0}, {10.0}, {11.0}});
  emkm::ClusterOptions opts;
  const auto res = emkm::kmeans_run(data, {{0.5}, {10.5}}, opts);
  CHECK(res.iterations == 2);
  CHECK(res.assignment.changed == 0);
  CHECK(res.means[0] == Vec{0.5});
  CHECK(res.means[1] == Vec{10.5});
}

TEST_CASE("kmeans_run: distortion is non-increasing across iterations") {
  Rng rng(47);
  emkm::ClusterOptions opts;
  opts.record_trace = true;
  opts.threshold_pct = 1e-9;  // run long so the trace is meaningful
  for (int rep = 0; rep < 5; ++rep) {
    const auto data = testutil::random_dataset(200, 3, rng, 4.0);
    std::vector<Vec> init;
    for (int j = 0; j < 4; ++j) {
      const auto row = data.row(rng.next_index(200));
      init.emplace_back(row.begin(), row.end());
    }
    const auto res = emkm::kmeans_run(data, init, opts);
    for (std::size_t t = 1; t < res.trace.size(); ++t)
      CHECK(res.trace[t].distortion <= res.trace[t - 1].distortion * (1.0 + 1e-12));
  }
}
