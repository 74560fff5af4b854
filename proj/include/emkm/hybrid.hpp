#pragma once

#include <vector>

#include "emkm/em.hpp"
#include "emkm/kmeans.hpp"

namespace emkm {

struct HardStats {
  std::vector<std::size_t> counts;
  std::vector<Vec> means;          // member means
  std::vector<SymMatrix> covariances;  // population form, about the center
  std::vector<double> weights;     // n_j / N
};

// Per-cluster statistics of a hard labelling. Covariances are taken about
// centers (member means when centers is null); the divisor is the member
// count, matching the soft M-step's normalization. Empty clusters get a zero
// covariance and weight 0.
HardStats hard_stats(const Dataset& data, const std::vector<std::int32_t>& labels,
                     std::size_t k, const std::vector<Vec>* centers);

struct KmemResult {
  Assignment assignment;
  MixtureState state;
  int kmeans_iterations = 0;
  int em_iterations = 0;
  bool kmeans_hit_cap = false;
  bool em_hit_cap = false;
  std::vector<Vec> initial_means;
  std::vector<IterationStats> trace;  // K-Means passes, then EM passes
};

// K-Means to convergence, then EM seeded from its output: means from the
// K-Means result, weights n_j/N, covariances from the hard members. The EM
// phase runs its own stop rule, with its first reassignment count taken
// against the K-Means labels (a joint fixed point stops immediately).
KmemResult kmem_run(const Dataset& data, std::size_t k, Rng& rng,
                    const ClusterOptions& options);

struct HbemkmResult {
  Assignment assignment;
  MixtureState state;
  int iterations = 0;  // outer passes (each: hard M, E, soft means, K-Means)
  bool hit_iteration_cap = false;
  std::vector<Vec> initial_means;
  std::vector<IterationStats> trace;
};

// Alternating pipeline. After an initial nearest-mean assignment from random
// row means, each pass runs: M-step from the hard clusters (weights n_j/N),
// posterior hard assignment, stop check; then soft-count means, nearest-mean
// assignment, stop check. Both checks feed one rolling reassignment history.
HbemkmResult hbemkm_run(const Dataset& data, std::size_t k, Rng& rng,
                        const ClusterOptions& options);

}  // namespace emkm
