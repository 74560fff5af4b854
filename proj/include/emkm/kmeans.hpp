#pragma once

#include <vector>

#include "emkm/model.hpp"

namespace emkm {

// Euclidean distance; throws std::invalid_argument on dimension mismatch.
double euclidean_distance(std::span<const double> x, std::span<const double> m);

// Squared Euclidean distance, the comparison form used inside assignment
// (monotone in the distance, so the argmin is unchanged).
double squared_distance(std::span<const double> x, std::span<const double> m);

// Nearest-mean hard assignment. Ties go to the lowest cluster index.
// changed counts labels differing from previous (N when previous is null).
Assignment assign_nearest(const Dataset& data, const std::vector<Vec>& means,
                          const Assignment* previous);

struct MeanUpdate {
  std::vector<Vec> means;
  std::vector<std::size_t> counts;
};

// Arithmetic mean of each cluster's members. A cluster that ended up empty is
// re-seeded with the data point farthest from its previous mean, which the
// next assignment pass will capture; its count stays 0 here.
MeanUpdate update_means(const Dataset& data, const Assignment& assign,
                        const std::vector<Vec>& previous_means);

// Sum of squared point-to-assigned-mean distances (the Lloyd objective).
double distortion(const Dataset& data, const std::vector<Vec>& means,
                  const std::vector<std::int32_t>& labels);

struct KMeansResult {
  Assignment assignment;
  std::vector<Vec> means;
  std::vector<std::size_t> counts;
  int iterations = 0;
  bool hit_iteration_cap = false;
  std::vector<IterationStats> trace;
};

// Lloyd iterations (assign, then recompute means) under the percentage-change
// stop rule. On exit the means are the member means of the final labels.
KMeansResult kmeans_run(const Dataset& data, std::vector<Vec> initial_means,
                        const ClusterOptions& options);

}  // namespace emkm
