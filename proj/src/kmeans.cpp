#include "emkm/kmeans.hpp"

#include <cmath>
#include <stdexcept>

namespace emkm {

double squared_distance(std::span<const double> x, std::span<const double> m) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = x[i] - m[i];
    s += t * t;
  }
  return s;
}

double euclidean_distance(std::span<const double> x, std::span<const double> m) {
  if (x.size() != m.size())
    throw std::invalid_argument("euclidean_distance: dimension mismatch");
  return std::sqrt(squared_distance(x, m));
}

Assignment assign_nearest(const Dataset& data, const std::vector<Vec>& means,
                          const Assignment* previous) {
  const std::size_t n = data.rows();
  const std::size_t k = means.size();
  if (k == 0) throw std::invalid_argument("assign_nearest: no means");
  for (const auto& m : means)
    if (m.size() != data.cols())
      throw std::invalid_argument("assign_nearest: mean dimension mismatch");
  if (previous && previous->labels.size() != n)
    throw std::invalid_argument("assign_nearest: previous assignment size mismatch");

  Assignment out;
  out.labels.resize(n);
  out.changed = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = data.row(i);
    std::int32_t best = 0;
    double best_d = squared_distance(x, means[0]);
    for (std::size_t j = 1; j < k; ++j) {
      const double d = squared_distance(x, means[j]);
      if (d < best_d) {  // strict: ties keep the lowest index
        best_d = d;
        best = static_cast<std::int32_t>(j);
      }
    }
    out.labels[i] = best;
    if (!previous || previous->labels[i] != best) ++out.changed;
  }
  return out;
}

MeanUpdate update_means(const Dataset& data, const Assignment& assign,
                        const std::vector<Vec>& previous_means) {
  const std::size_t n = data.rows();
  const std::size_t d = data.cols();
  const std::size_t k = previous_means.size();

  MeanUpdate out;
  out.means.assign(k, Vec(d, 0.0));
  out.counts.assign(k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto label = static_cast<std::size_t>(assign.labels[i]);
    if (label >= k) throw std::invalid_argument("update_means: label out of range");
    const auto x = data.row(i);
    auto& sum = out.means[label];
    for (std::size_t j = 0; j < d; ++j) sum[j] += x[j];
    ++out.counts[label];
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (out.counts[j] > 0) {
      for (double& v : out.means[j]) v /= static_cast<double>(out.counts[j]);
    } else {
      // re-seed with the point farthest from the stale mean
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double dd = squared_distance(data.row(i), previous_means[j]);
        if (dd > far_d) {
          far_d = dd;
          far = i;
        }
      }
      const auto x = data.row(far);
      out.means[j].assign(x.begin(), x.end());
    }
  }
  return out;
}

double distortion(const Dataset& data, const std::vector<Vec>& means,
                  const std::vector<std::int32_t>& labels) {
  double s = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i)
    s += squared_distance(data.row(i), means[static_cast<std::size_t>(labels[i])]);
  return s;
}

KMeansResult kmeans_run(const Dataset& data, std::vector<Vec> initial_means,
                        const ClusterOptions& options) {
  KMeansResult res;
  res.means = std::move(initial_means);
  TerminationRule rule(options.threshold_pct);

  while (true) {
    Assignment a = assign_nearest(data, res.means,
                                  res.iterations > 0 ? &res.assignment : nullptr);
    auto upd = update_means(data, a, res.means);
    res.means = std::move(upd.means);
    res.counts = std::move(upd.counts);
    res.assignment = std::move(a);
    ++res.iterations;

    const bool stop = rule.should_stop(res.assignment.changed);
    if (options.record_trace) {
      IterationStats st;
      st.iteration = res.iterations;
      st.step = 'K';
      st.changed = res.assignment.changed;
      if (rule.last_change()) st.percentage_change = *rule.last_change();
      st.distortion = distortion(data, res.means, res.assignment.labels);
      res.trace.push_back(st);
    }
    if (stop) break;
    if (res.iterations >= options.max_iterations) {
      res.hit_iteration_cap = true;
      break;
    }
  }
  return res;
}

}  // namespace emkm
