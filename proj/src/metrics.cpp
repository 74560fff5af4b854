#include "emkm/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "emkm/kmeans.hpp"

namespace emkm {

ClusteringResult ClusteringResult::from_labels(const Dataset& data,
                                               const std::vector<std::int32_t>& labels,
                                               std::size_t k,
                                               const std::vector<Vec>* fallback_means) {
  if (labels.size() != data.rows())
    throw std::invalid_argument("ClusteringResult: label count != rows");
  ClusteringResult r;
  r.data = &data;
  r.labels = labels;
  r.centroids.assign(k, Vec(data.cols(), 0.0));
  r.counts.assign(k, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto j = static_cast<std::size_t>(labels[i]);
    if (j >= k) throw std::invalid_argument("ClusteringResult: label out of range");
    const auto x = data.row(i);
    for (std::size_t a = 0; a < data.cols(); ++a) r.centroids[j][a] += x[a];
    ++r.counts[j];
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (r.counts[j] > 0)
      for (double& v : r.centroids[j]) v /= static_cast<double>(r.counts[j]);
    else if (fallback_means)
      r.centroids[j] = (*fallback_means)[j];
  }
  return r;
}

double intra_cluster_similarity(const ClusteringResult& result, std::size_t cluster) {
  double dist_sum = 0.0;
  for (std::size_t i = 0; i < result.labels.size(); ++i)
    if (static_cast<std::size_t>(result.labels[i]) == cluster)
      dist_sum += euclidean_distance(result.data->row(i), result.centroids[cluster]);
  return (1.0 + static_cast<double>(result.counts[cluster])) / (1.0 + dist_sum);
}

double intra_similarity_overall(const ClusteringResult& result) {
  const std::size_t k = result.k();
  if (k == 0) throw std::invalid_argument("intra_similarity_overall: empty result");
  double s = 0.0;
  for (std::size_t j = 0; j < k; ++j) s += intra_cluster_similarity(result, j);
  return s / static_cast<double>(k);
}

double inter_cluster_similarity(const ClusteringResult& result,
                                const MetricsOptions& options) {
  const std::size_t k = result.k();
  if (k == 0) throw std::invalid_argument("inter_cluster_similarity: empty result");
  const std::size_t d = result.centroids.front().size();
  Vec grand(d, 0.0);
  for (const auto& c : result.centroids)
    for (std::size_t a = 0; a < d; ++a) grand[a] += c[a];
  for (double& v : grand) v /= static_cast<double>(k);

  double dist_sum = 0.0;
  for (const auto& c : result.centroids) dist_sum += euclidean_distance(c, grand);

  const double n = options.inter_count == InterSimilarityCount::Centroids
                       ? static_cast<double>(k)
                       : static_cast<double>(result.labels.size());
  return (1.0 + n) / (1.0 + dist_sum);
}

double clustering_fitness(const ClusteringResult& result, const MetricsOptions& options) {
  if (!(options.lambda > 0.0 && options.lambda < 1.0))
    throw std::invalid_argument("clustering_fitness: lambda must be in (0, 1)");
  return options.lambda * intra_similarity_overall(result) +
         (1.0 - options.lambda) / inter_cluster_similarity(result, options);
}

double sse(const ClusteringResult& result, const MetricsOptions& options) {
  const std::size_t n = result.labels.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = static_cast<std::size_t>(result.labels[i]);
    if (options.sse_form == SseForm::Distance)
      s += euclidean_distance(result.data->row(i), result.centroids[j]);
    else
      s += squared_distance(result.data->row(i), result.centroids[j]);
  }
  return s / static_cast<double>(n);
}

}  // namespace emkm
