// Small builders shared across test files.
#pragma once

#include <vector>

#include "emkm/datagen.hpp"
#include "emkm/model.hpp"
#include "emkm/rng.hpp"

namespace testutil {

inline emkm::SymMatrix sym2(double a, double b, double c) {
  emkm::SymMatrix m(2);
  m.set(0, 0, a);
  m.set(0, 1, b);
  m.set(1, 1, c);
  return m;
}

// Random SPD matrix A^T A + ridge * I.
inline emkm::SymMatrix random_spd(std::size_t d, emkm::Rng& rng, double ridge = 0.5) {
  std::vector<double> a(d * d);
  for (double& v : a) v = rng.next_normal();
  emkm::SymMatrix m(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < d; ++t) s += a[t * d + i] * a[t * d + j];
      m.set(i, j, s + (i == j ? ridge : 0.0));
    }
  return m;
}

inline emkm::Dataset random_dataset(std::size_t n, std::size_t d, emkm::Rng& rng,
                                    double scale = 1.0) {
  emkm::Dataset data(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) data(i, j) = scale * rng.next_normal();
  return data;
}

// Two well-separated spherical blobs, n points each.
inline emkm::Dataset two_blobs(std::size_t n_per, double separation, emkm::Rng& rng,
                               std::size_t d = 2) {
  emkm::Dataset data(2 * n_per, d);
  for (std::size_t i = 0; i < 2 * n_per; ++i) {
    const double off = i < n_per ? 0.0 : separation;
    for (std::size_t j = 0; j < d; ++j) data(i, j) = off + rng.next_normal();
  }
  return data;
}

// Random mixture state over the dataset: means on random rows, random SPD
// covariances, normalized random weights.
inline emkm::MixtureState random_state(const emkm::Dataset& data, std::size_t k,
                                       emkm::Rng& rng) {
  emkm::MixtureState state;
  double wsum = 0.0;
  std::vector<double> w(k);
  for (std::size_t j = 0; j < k; ++j) {
    w[j] = 0.2 + rng.next_double();
    wsum += w[j];
  }
  for (std::size_t j = 0; j < k; ++j) {
    const auto row = data.row(rng.next_index(data.rows()));
    emkm::ClusterParams p;
    p.mean.assign(row.begin(), row.end());
    p.covariance = random_spd(data.cols(), rng);
    p.weight = w[j] / wsum;
    state.clusters.push_back(std::move(p));
  }
  state.rebuild_cache();
  return state;
}

}  // namespace testutil
