#pragma once

#include <cstdint>
#include <vector>

#include "emkm/model.hpp"

namespace emkm {

enum class InterSimilarityCount {
  Centroids,  // the smoothing numerator counts the k centroids
  Points,     // alternative reading: it counts the N data points
};

enum class SseForm {
  Distance,         // mean Euclidean distance to the assigned centroid
  SquaredDistance,  // conventional mean squared distance
};

struct MetricsOptions {
  double lambda = 0.5;
  InterSimilarityCount inter_count = InterSimilarityCount::Centroids;
  SseForm sse_form = SseForm::Distance;
};

// A finished clustering: labels over a dataset plus the member-mean
// centroids and sizes derived from them.
struct ClusteringResult {
  const Dataset* data = nullptr;
  std::vector<std::int32_t> labels;
  std::vector<Vec> centroids;
  std::vector<std::size_t> counts;

  std::size_t k() const { return centroids.size(); }

  // Builds centroids and counts from the labels. A cluster with no members
  // keeps fallback_means[j] as its centroid (zero vector without fallback).
  static ClusteringResult from_labels(const Dataset& data,
                                      const std::vector<std::int32_t>& labels,
                                      std::size_t k,
                                      const std::vector<Vec>* fallback_means = nullptr);
};

// (1 + n_j) / (1 + sum of member distances to the centroid). The added 1s
// keep singleton (and empty) clusters finite.
double intra_cluster_similarity(const ClusteringResult& result, std::size_t cluster);

// Arithmetic mean of the per-cluster values over all k clusters.
double intra_similarity_overall(const ClusteringResult& result);

// (1 + n) / (1 + sum of centroid distances to the centroid of centroids),
// where n counts centroids or points per MetricsOptions::inter_count.
double inter_cluster_similarity(const ClusteringResult& result,
                                const MetricsOptions& options = {});

// lambda * intra + (1 - lambda) / inter. Higher is better.
double clustering_fitness(const ClusteringResult& result,
                          const MetricsOptions& options = {});

// Mean distance of points to their assigned centroid (SseForm::Distance) or
// mean squared distance (SseForm::SquaredDistance). Lower is better.
double sse(const ClusteringResult& result, const MetricsOptions& options = {});

}  // namespace emkm
