#include <doctest.h>

#include <cmath>

#include "emkm/em.hpp"
#include "emkm/kmeans.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using emkm::ClusterOptions;
using emkm::Dataset;
using emkm::MixtureState;
using emkm::Responsibilities;
using emkm::Rng;
using emkm::SymMatrix;
using emkm::Vec;

namespace {

MixtureState single_cluster(Vec mean, SymMatrix cov) {
  MixtureState s;
  s.clusters.push_back({std::move(mean), std::move(cov), 1.0});
  s.rebuild_cache();
  return s;
}

}  // namespace

TEST_CASE("log_gaussian_pdf: standard normal hand values") {
  const auto s1 = single_cluster({0.0}, SymMatrix::identity(1));
  CHECK(emkm::log_gaussian_pdf(Vec{0.0}, s1.clusters[0].mean, s1.factors[0]) ==
        doctest::Approx(-0.9189385).epsilon(1e-7));
  CHECK(emkm::log_gaussian_pdf(Vec{1.0}, s1.clusters[0].mean, s1.factors[0]) ==
        doctest::Approx(-1.4189385).epsilon(1e-7));

  const auto s2 = single_cluster({0.0, 0.0}, SymMatrix::identity(2));
  CHECK(emkm::log_gaussian_pdf(Vec{0.0, 0.0}, s2.clusters[0].mean, s2.factors[0]) ==
        doctest::Approx(-1.8378771).epsilon(1e-7));
}

TEST_CASE("mixture_log_density: single component equals the component pdf") {
  const auto s = single_cluster({1.0, -2.0}, testutil::sym2(2.0, 0.5, 1.5));
  const Vec x{0.3, 0.7};
  CHECK(emkm::mixture_log_density(x, s) ==
        doctest::Approx(emkm::log_gaussian_pdf(x, s.clusters[0].mean, s.factors[0]))
            .epsilon(1e-12));
}

TEST_CASE("mixture_log_density: two identical halves equal either component") {
  MixtureState s;
  const auto cov = testutil::sym2(1.0, 0.2, 2.0);
  s.clusters.push_back({{0.5, 0.5}, cov, 0.5});
  s.clusters.push_back({{0.5, 0.5}, cov, 0.5});
  s.rebuild_cache();
  const Vec x{1.0, -1.0};
  CHECK(emkm::mixture_log_density(x, s) ==
        doctest::Approx(emkm::log_gaussian_pdf(x, s.clusters[0].mean, s.factors[0]))
            .epsilon(1e-12));
}

TEST_CASE("mixture_log_density: matches direct summation on a random mixture") {
  Rng rng(53);
  const auto data = testutil::random_dataset(12, 3, rng, 2.0);
  const auto state = testutil::random_state(data, 3, rng);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    long double direct = 0.0L;
    for (std::size_t j = 0; j < 3; ++j)
      direct += static_cast<long double>(state.clusters[j].weight) *
                oracle::gaussian_pdf_direct(data.row(i), state.clusters[j].mean,
                                            state.clusters[j].covariance);
    CHECK(emkm::mixture_log_density(data.row(i), state) ==
          doctest::Approx(static_cast<double>(std::log(direct))).epsilon(1e-9));
  }
}

TEST_CASE("responsibilities: identical components split evenly, label 0") {
  const auto data = Dataset::from_rows({{1.0, 2.0}, {-3.0, 0.5}});
  MixtureState s;
  const auto cov = testutil::sym2(1.0, 0.0, 1.0);
  s.clusters.push_back({{0.0, 0.0}, cov, 0.5});
  s.clusters.push_back({{0.0, 0.0}, cov, 0.5});
  s.rebuild_cache();
  const auto e = emkm::responsibilities(data, s, nullptr);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(e.resp(i, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(e.resp(i, 1) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(e.assignment.labels[i] == 0);
  }
}

TEST_CASE("responsibilities: single component gives all ones") {
  Rng rng(59);
  const auto data = testutil::random_dataset(10, 2, rng);
  const auto s = single_cluster({0.0, 0.0}, SymMatrix::identity(2));
  const auto e = emkm::responsibilities(data, s, nullptr);
  for (std::size_t i = 0; i < 10; ++i) CHECK(e.resp(i, 0) == 1.0);
}

TEST_CASE("responsibilities: matches the direct ratio on a random instance") {
  Rng rng(61);
  const auto data = testutil::random_dataset(20, 2, rng, 1.5);
  const auto state = testutil::random_state(data, 3, rng);
  const auto e = emkm::responsibilities(data, state, nullptr);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const auto direct = oracle::responsibilities_direct(data.row(i), state);
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(std::abs(e.resp(i, j) - static_cast<double>(direct[j])) <= 1e-9);
  }
}

TEST_CASE("responsibilities: rows sum to one and entries stay in [0,1]") {
  Rng rng(67);
  const auto data = testutil::random_dataset(40, 4, rng, 3.0);
  const auto state = testutil::random_state(data, 5, rng);
  const auto e = emkm::responsibilities(data, state, nullptr);
  CHECK(e.max_row_sum_error <= 1e-12);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < 5; ++j) {
      CHECK(e.resp(i, j) >= 0.0);
      CHECK(e.resp(i, j) <= 1.0);
      sum += e.resp(i, j);
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("responsibilities: labels survive a uniform rescaling of the weights") {
  Rng rng(71);
  const auto data = testutil::random_dataset(30, 3, rng, 2.0);
  auto state = testutil::random_state(data, 4, rng);
  const auto before = emkm::responsibilities(data, state, nullptr);
  for (auto& c : state.clusters) c.weight *= 3.0;  // uniform shift of every log density
  const auto after = emkm::responsibilities(data, state, nullptr);
  CHECK(before.assignment.labels == after.assignment.labels);
}

TEST_CASE("m_step: hard responsibilities reduce to member means and counts") {
  const auto data = Dataset::from_rows({{0.0, 0.0}, {2.0, 2.0}, {10.0, 10.0}});
  MixtureState state;
  const auto cov = testutil::sym2(1.0, 0.0, 1.0);
  state.clusters.push_back({{0.0, 0.0}, cov, 0.5});
  state.clusters.push_back({{10.0, 10.0}, cov, 0.5});
  state.rebuild_cache();

  Responsibilities r(3, 2);
  r(0, 0) = 1.0;
  r(1, 0) = 1.0;
  r(2, 1) = 1.0;
  ClusterOptions opts;
  const auto next = emkm::m_step(data, r, state, opts);
  CHECK(next.clusters[0].mean == Vec{1.0, 1.0});
  CHECK(next.clusters[1].mean == Vec{10.0, 10.0});
  CHECK(next.clusters[0].weight == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(next.clusters[1].weight == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(next.iteration == state.iteration + 1);
}

TEST_CASE("m_step: uniform responsibilities give equal weights and the global mean") {
  Rng rng(73);
  const auto data = testutil::random_dataset(15, 2, rng);
  auto state = testutil::random_state(data, 3, rng);
  Responsibilities r(15, 3);
  for (std::size_t i = 0; i < 15; ++i)
    for (std::size_t j = 0; j < 3; ++j) r(i, j) = 1.0 / 3.0;

  Vec global(2, 0.0);
  for (std::size_t i = 0; i < 15; ++i)
    for (std::size_t c = 0; c < 2; ++c) global[c] += data(i, c) / 15.0;

  ClusterOptions opts;
  const auto next = emkm::m_step(data, r, state, opts);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(next.clusters[j].weight == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    for (std::size_t c = 0; c < 2; ++c)
      CHECK(next.clusters[j].mean[c] == doctest::Approx(global[c]).epsilon(1e-12));
  }
}

TEST_CASE("m_step: matches brute-force summation on random soft matrices") {
  Rng rng(79);
  ClusterOptions opts;
  for (int trial = 0; trial < 20; ++trial) {
    const auto data = testutil::random_dataset(10, 2, rng, 2.0);
    auto state = testutil::random_state(data, 2, rng);
    Responsibilities r(10, 2);
    for (std::size_t i = 0; i < 10; ++i) {
      const double p = rng.next_double();
      r(i, 0) = p;
      r(i, 1) = 1.0 - p;
    }
    std::vector<std::vector<double>> resp_rows(10, std::vector<double>(2));
    for (std::size_t i = 0; i < 10; ++i)
      for (std::size_t j = 0; j < 2; ++j) resp_rows[i][j] = r(i, j);

    // covariance about the prior mean, exactly like the library default
    std::vector<Vec> base{state.clusters[0].mean, state.clusters[1].mean};
    const auto direct = oracle::m_step_direct(data, resp_rows, base);
    const auto next = emkm::m_step(data, r, state, opts);

    for (std::size_t j = 0; j < 2; ++j) {
      for (std::size_t c = 0; c < 2; ++c)
        CHECK(next.clusters[j].mean[c] ==
              doctest::Approx(direct.means[j][c]).epsilon(1e-10));
      CHECK(next.clusters[j].weight ==
            doctest::Approx(direct.weights[j]).epsilon(1e-10));
      const auto expected = emkm::regularize(direct.covariances[j]);
      for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b)
          CHECK(next.clusters[j].covariance(a, b) ==
                doctest::Approx(expected(a, b)).epsilon(1e-10));
    }
  }
}

TEST_CASE("m_step: the updated-mean variant recenters on the new means") {
  Rng rng(83);
  const auto data = testutil::random_dataset(12, 2, rng, 2.0);
  auto state = testutil::random_state(data, 2, rng);
  Responsibilities r(12, 2);
  for (std::size_t i = 0; i < 12; ++i) {
    const double p = rng.next_double();
    r(i, 0) = p;
    r(i, 1) = 1.0 - p;
  }
  std::vector<std::vector<double>> resp_rows(12, std::vector<double>(2));
  for (std::size_t i = 0; i < 12; ++i)
    for (std::size_t j = 0; j < 2; ++j) resp_rows[i][j] = r(i, j);

  ClusterOptions opts;
  opts.covariance_mean = emkm::CovarianceMean::Updated;
  const auto next = emkm::m_step(data, r, state, opts);
  std::vector<Vec> base{next.clusters[0].mean, next.clusters[1].mean};
  const auto direct = oracle::m_step_direct(data, resp_rows, base);
  for (std::size_t j = 0; j < 2; ++j) {
    const auto expected = emkm::regularize(direct.covariances[j]);
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t b = 0; b < 2; ++b)
        CHECK(next.clusters[j].covariance(a, b) ==
              doctest::Approx(expected(a, b)).epsilon(1e-10));
  }
}

TEST_CASE("m_step: weights sum to one and covariances factor, every iteration") {
  Rng rng(89);
  const auto data = testutil::two_blobs(60, 8.0, rng);
  ClusterOptions opts;
  opts.record_trace = true;
  Rng run_rng(17);
  const auto res = emkm::em_run(data, 3, run_rng, opts);
  for (const auto& st : res.trace) {
    CHECK(st.weight_sum_error <= 1e-12);
    CHECK(st.resp_row_error <= 1e-12);
  }
  for (const auto& c : res.state.clusters) {
    CHECK(c.weight >= 0.0);
    CHECK(c.weight <= 1.0);
    CHECK(emkm::cholesky(c.covariance));
  }
}

TEST_CASE("em_run: recovers well-separated blob means") {
  Rng rng(97);
  const auto data = testutil::two_blobs(150, 40.0, rng);
  ClusterOptions opts;
  Rng run_rng(7);
  const auto res = emkm::em_run(data, 2, run_rng, opts);

  Vec blob0(2, 0.0), blob1(2, 0.0);
  for (std::size_t i = 0; i < 150; ++i)
    for (std::size_t c = 0; c < 2; ++c) blob0[c] += data(i, c) / 150.0;
  for (std::size_t i = 150; i < 300; ++i)
    for (std::size_t c = 0; c < 2; ++c) blob1[c] += data(i, c) / 150.0;

  const auto& m0 = res.state.clusters[0].mean;
  const bool direct = emkm::euclidean_distance(m0, blob0) < 20.0;
  const auto& a = direct ? res.state.clusters[0].mean : res.state.clusters[1].mean;
  const auto& b = direct ? res.state.clusters[1].mean : res.state.clusters[0].mean;
  // within 0.1 of the generating unit sigma
  CHECK(emkm::euclidean_distance(a, blob0) <= 0.1);
  CHECK(emkm::euclidean_distance(b, blob1) <= 0.1);
}

TEST_CASE("em_run: k = 1 settles on the global mean and covariance") {
  Rng rng(101);
  const auto data = testutil::random_dataset(50, 2, rng, 3.0);
  ClusterOptions opts;
  Rng run_rng(23);
  const auto res = emkm::em_run(data, 1, run_rng, opts);

  Vec global(2, 0.0);
  for (std::size_t i = 0; i < 50; ++i)
    for (std::size_t c = 0; c < 2; ++c) global[c] += data(i, c) / 50.0;
  const auto gcov = emkm::global_covariance(data);

  for (std::size_t c = 0; c < 2; ++c)
    CHECK(res.state.clusters[0].mean[c] == doctest::Approx(global[c]).epsilon(1e-10));
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b)
      CHECK(res.state.clusters[0].covariance(a, b) ==
            doctest::Approx(gcov(a, b)).epsilon(1e-5));
  CHECK(res.state.clusters[0].weight == 1.0);
}

TEST_CASE("em_run: bitwise identical outputs under a fixed seed") {
  Rng rng(103);
  const auto data = testutil::two_blobs(80, 10.0, rng);
  ClusterOptions opts;
  Rng r1(55), r2(55);
  const auto a = emkm::em_run(data, 3, r1, opts);
  const auto b = emkm::em_run(data, 3, r2, opts);
  CHECK(a.assignment.labels == b.assignment.labels);
  CHECK(a.iterations == b.iterations);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(a.state.clusters[j].mean == b.state.clusters[j].mean);
    CHECK(a.state.clusters[j].weight == b.state.clusters[j].weight);
    CHECK(a.state.clusters[j].covariance == b.state.clusters[j].covariance);
  }
}
