#include "emkm/model.hpp"

#include <cmath>
#include <stdexcept>

namespace emkm {

Dataset Dataset::from_rows(const std::vector<Vec>& rows) {
  if (rows.empty()) throw std::invalid_argument("Dataset: needs at least one row");
  const std::size_t d = rows.front().size();
  if (d == 0) throw std::invalid_argument("Dataset: rows must be non-empty");
  Dataset out(rows.size(), d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != d) throw std::invalid_argument("Dataset: ragged rows");
    for (std::size_t j = 0; j < d; ++j) {
      if (!std::isfinite(rows[i][j]))
        throw std::invalid_argument("Dataset: non-finite entry");
      out(i, j) = rows[i][j];
    }
  }
  return out;
}

void MixtureState::rebuild_cache() {
  factors.clear();
  factors.reserve(clusters.size());
  for (auto& c : clusters) {
    auto f = cholesky(c.covariance);
    if (!f) {
      c.covariance = regularize(c.covariance);
      f = cholesky(c.covariance);
      if (!f) throw std::runtime_error("MixtureState: covariance not factorizable");
    }
    factors.push_back(std::move(*f));
  }
}

std::optional<double> percentage_change(std::size_t psi_t, std::size_t psi_t1) {
  if (psi_t == 0) return std::nullopt;
  const double a = static_cast<double>(psi_t);
  const double b = static_cast<double>(psi_t1);
  return std::abs(a - b) / a * 100.0;
}

bool TerminationRule::should_stop(std::size_t changed) {
  last_change_.reset();
  bool stop = false;
  if (changed == 0) {
    stop = true;  // fixed point
  } else if (prev_) {
    last_change_ = percentage_change(*prev_, changed);
    stop = !last_change_ || *last_change_ < threshold_;
  }
  prev_ = changed;
  return stop;
}

std::vector<std::size_t> sample_distinct_rows(const Dataset& data, std::size_t k, Rng& rng) {
  if (k == 0 || k > data.rows())
    throw std::invalid_argument("sample_distinct_rows: need 1 <= k <= N");
  return rng.sample_without_replacement(data.rows(), k);
}

SymMatrix global_covariance(const Dataset& data) {
  const std::size_t n = data.rows();
  const std::size_t d = data.cols();
  Vec mean(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = data.row(i);
    for (std::size_t j = 0; j < d; ++j) mean[j] += row[j];
  }
  for (double& m : mean) m /= static_cast<double>(n);

  SymMatrix cov(d);
  Vec diff(d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = data.row(i);
    for (std::size_t j = 0; j < d; ++j) diff[j] = row[j] - mean[j];
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = a; b < d; ++b) cov.add(a, b, diff[a] * diff[b]);
  }
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a; b < d; ++b) cov.set(a, b, cov(a, b) / static_cast<double>(n));
  return cov;
}

MixtureState init_params(const Dataset& data, std::size_t k, Rng& rng) {
  if (k == 0 || k > data.rows())
    throw std::invalid_argument("init_params: need 1 <= k <= N");
  const auto rows = sample_distinct_rows(data, k, rng);
  const SymMatrix cov = regularize(global_covariance(data));
  const double w = 1.0 / static_cast<double>(k);

  MixtureState state;
  state.iteration = 0;
  state.clusters.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    const auto row = data.row(rows[j]);
    state.clusters.push_back({Vec(row.begin(), row.end()), cov, w});
  }
  state.rebuild_cache();
  return state;
}

}  // namespace emkm
