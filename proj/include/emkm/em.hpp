#pragma once

#include <vector>

#include "emkm/model.hpp"

namespace emkm {

// Posterior matrix: entry (i, j) = P(cluster j | point i). Rows are
// explicitly normalized, so each sums to 1 up to a few ulps.
struct Responsibilities {
  std::size_t rows = 0;
  std::size_t k = 0;
  std::vector<double> p;

  Responsibilities() = default;
  Responsibilities(std::size_t rows_, std::size_t k_)
      : rows(rows_), k(k_), p(rows_ * k_, 0.0) {}
  double operator()(std::size_t i, std::size_t j) const { return p[i * k + j]; }
  double& operator()(std::size_t i, std::size_t j) { return p[i * k + j]; }
  std::span<const double> row(std::size_t i) const { return {p.data() + i * k, k}; }
};

// log N(x | mean, Sigma) evaluated through the Cholesky factor of Sigma:
// -(d/2) log(2*pi) - 1/2 log|Sigma| - 1/2 (x-mean)^T Sigma^-1 (x-mean).
double log_gaussian_pdf(std::span<const double> x, const Vec& mean,
                        const CholeskyFactor& factor);

// log sum_l W_l N(x | mu_l, Sigma_l), via log-sum-exp. Finite for finite x.
double mixture_log_density(std::span<const double> x, const MixtureState& state);

struct EStep {
  Responsibilities resp;
  Assignment assignment;          // argmax posterior, ties to lowest index
  double max_row_sum_error = 0.0; // max |row sum - 1| over the output matrix
};

// E-step over the whole dataset. changed counts labels differing from
// previous (N when previous is null).
EStep responsibilities(const Dataset& data, const MixtureState& state,
                       const Assignment* previous);

// M-step producing the state at t+1. Soft-count weighted means and weights;
// covariance about the prior mean by default (ClusterOptions::covariance_mean
// selects the textbook updated-mean form). Covariances are regularized, the
// factor cache rebuilt, and weights renormalized to sum exactly to 1.
// A component whose soft count collapses below 1e-12 is re-seeded on the
// lowest-density point with the global covariance and weight 1/k.
MixtureState m_step(const Dataset& data, const Responsibilities& resp,
                    const MixtureState& state, const ClusterOptions& options);

struct EmResult {
  Assignment assignment;
  MixtureState state;
  int iterations = 0;
  bool hit_iteration_cap = false;
  std::vector<Vec> initial_means;
  std::vector<IterationStats> trace;
};

// E/M alternation from an already-initialized state until the
// percentage-change rule (or the iteration cap) fires. previous seeds the
// first pass's reassignment count, for pipelines that enter with labels.
EmResult em_loop(const Dataset& data, MixtureState state, const Assignment* previous,
                 const ClusterOptions& options);

// Full run: random initialization, then em_loop.
EmResult em_run(const Dataset& data, std::size_t k, Rng& rng,
                const ClusterOptions& options);

}  // namespace emkm
