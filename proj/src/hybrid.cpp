#include "emkm/hybrid.hpp"

#include <cmath>
#include <stdexcept>

namespace emkm {

namespace {

// Re-seed empty clusters by moving in the data point farthest from the
// cluster's previous mean. Donor clusters must keep at least two members, so
// one sweep leaves every cluster non-empty. Labels are edited in place.
void repair_empty_clusters(const Dataset& data, Assignment& assignment,
                           std::vector<std::size_t>& counts,
                           const std::vector<Vec>& previous_means) {
  const std::size_t k = counts.size();
  for (std::size_t j = 0; j < k; ++j) {
    if (counts[j] > 0) continue;
    std::size_t pick = data.rows();
    double pick_d = -1.0;
    for (std::size_t i = 0; i < data.rows(); ++i) {
      const auto owner = static_cast<std::size_t>(assignment.labels[i]);
      if (counts[owner] < 2) continue;
      const double dd = squared_distance(data.row(i), previous_means[j]);
      if (dd > pick_d) {
        pick_d = dd;
        pick = i;
      }
    }
    if (pick == data.rows()) continue;  // no eligible donor
    --counts[static_cast<std::size_t>(assignment.labels[pick])];
    assignment.labels[pick] = static_cast<std::int32_t>(j);
    ++counts[j];
  }
}

std::vector<std::size_t> count_labels(const std::vector<std::int32_t>& labels,
                                      std::size_t k) {
  std::vector<std::size_t> counts(k, 0);
  for (const auto l : labels) ++counts[static_cast<std::size_t>(l)];
  return counts;
}

// Soft-count weighted means from a responsibility matrix. A component whose
// soft count collapses keeps its fallback mean.
std::vector<Vec> soft_means(const Dataset& data, const Responsibilities& resp,
                            const std::vector<Vec>& fallback) {
  const std::size_t n = data.rows();
  const std::size_t d = data.cols();
  const std::size_t k = resp.k;
  std::vector<Vec> means(k, Vec(d, 0.0));
  std::vector<double> soft_count(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = data.row(i);
    const double* r = resp.row(i).data();
    for (std::size_t j = 0; j < k; ++j) {
      soft_count[j] += r[j];
      auto& mj = means[j];
      for (std::size_t a = 0; a < d; ++a) mj[a] += r[j] * x[a];
    }
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (soft_count[j] >= 1e-12)
      for (double& v : means[j]) v /= soft_count[j];
    else
      means[j] = fallback[j];
  }
  return means;
}

}  // namespace

HardStats hard_stats(const Dataset& data, const std::vector<std::int32_t>& labels,
                     std::size_t k, const std::vector<Vec>* centers) {
  const std::size_t n = data.rows();
  const std::size_t d = data.cols();
  if (labels.size() != n) throw std::invalid_argument("hard_stats: label size mismatch");

  HardStats out;
  out.counts.assign(k, 0);
  out.means.assign(k, Vec(d, 0.0));
  out.covariances.assign(k, SymMatrix(d));
  out.weights.assign(k, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    const auto j = static_cast<std::size_t>(labels[i]);
    if (j >= k) throw std::invalid_argument("hard_stats: label out of range");
    const auto x = data.row(i);
    auto& mj = out.means[j];
    for (std::size_t a = 0; a < d; ++a) mj[a] += x[a];
    ++out.counts[j];
  }
  for (std::size_t j = 0; j < k; ++j)
    if (out.counts[j] > 0)
      for (double& v : out.means[j]) v /= static_cast<double>(out.counts[j]);

  Vec diff(d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = static_cast<std::size_t>(labels[i]);
    const Vec& c = centers ? (*centers)[j] : out.means[j];
    const auto x = data.row(i);
    for (std::size_t a = 0; a < d; ++a) diff[a] = x[a] - c[a];
    auto& cov = out.covariances[j];
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = a; b < d; ++b) cov.add(a, b, diff[a] * diff[b]);
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (out.counts[j] > 0) {
      const double inv = 1.0 / static_cast<double>(out.counts[j]);
      auto& cov = out.covariances[j];
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = a; b < d; ++b) cov.set(a, b, cov(a, b) * inv);
    }
    out.weights[j] = static_cast<double>(out.counts[j]) / static_cast<double>(n);
  }
  return out;
}

KmemResult kmem_run(const Dataset& data, std::size_t k, Rng& rng,
                    const ClusterOptions& options) {
  const auto rows = sample_distinct_rows(data, k, rng);
  std::vector<Vec> initial_means;
  initial_means.reserve(k);
  for (const auto r : rows) {
    const auto row = data.row(r);
    initial_means.emplace_back(row.begin(), row.end());
  }

  KmemResult res;
  res.initial_means = initial_means;

  KMeansResult km = kmeans_run(data, std::move(initial_means), options);
  res.kmeans_iterations = km.iterations;
  res.kmeans_hit_cap = km.hit_iteration_cap;
  res.trace = std::move(km.trace);

  const HardStats stats = hard_stats(data, km.assignment.labels, k, &km.means);
  MixtureState state;
  state.iteration = 0;
  state.clusters.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    state.clusters[j].mean = km.means[j];
    state.clusters[j].covariance = regularize(stats.covariances[j]);
    state.clusters[j].weight = stats.weights[j];
  }
  state.rebuild_cache();

  EmResult em = em_loop(data, std::move(state), &km.assignment, options);
  res.em_iterations = em.iterations;
  res.em_hit_cap = em.hit_iteration_cap;
  res.assignment = std::move(em.assignment);
  res.state = std::move(em.state);
  for (auto& st : em.trace) res.trace.push_back(st);
  return res;
}

HbemkmResult hbemkm_run(const Dataset& data, std::size_t k, Rng& rng,
                        const ClusterOptions& options) {
  const auto rows = sample_distinct_rows(data, k, rng);
  std::vector<Vec> means;
  means.reserve(k);
  for (const auto r : rows) {
    const auto row = data.row(r);
    means.emplace_back(row.begin(), row.end());
  }

  HbemkmResult res;
  res.initial_means = means;

  TerminationRule rule(options.threshold_pct);
  res.assignment = assign_nearest(data, means, nullptr);
  rule.should_stop(res.assignment.changed);  // seeds the history with N
  if (options.record_trace) {
    IterationStats st;
    st.iteration = 0;
    st.step = 'K';
    st.changed = res.assignment.changed;
    res.trace.push_back(st);
  }

  MixtureState state;
  state.iteration = 0;
  // means most recently used by an assignment pass; empty-cluster repair
  // measures "farthest" against these.
  std::vector<Vec> last_assignment_means = std::move(means);

  while (true) {
    // M-step from the hard clusters of the latest assignment.
    auto counts = count_labels(res.assignment.labels, k);
    repair_empty_clusters(data, res.assignment, counts, last_assignment_means);
    const HardStats stats = hard_stats(data, res.assignment.labels, k, nullptr);
    state.clusters.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
      state.clusters[j].mean = stats.means[j];
      state.clusters[j].covariance = regularize(stats.covariances[j]);
      state.clusters[j].weight = stats.weights[j];
    }
    state.iteration += 1;
    state.rebuild_cache();
    ++res.iterations;

    // E-step: posterior hard assignment.
    EStep e = responsibilities(data, state, &res.assignment);
    res.assignment = std::move(e.assignment);
    for (std::size_t j = 0; j < k; ++j) last_assignment_means[j] = state.clusters[j].mean;

    bool stop = rule.should_stop(res.assignment.changed);
    if (options.record_trace) {
      IterationStats st;
      st.iteration = res.iterations;
      st.step = 'E';
      st.changed = res.assignment.changed;
      if (rule.last_change()) st.percentage_change = *rule.last_change();
      st.resp_row_error = e.max_row_sum_error;
      double wsum = 0.0;
      for (const auto& c : state.clusters) wsum += c.weight;
      st.weight_sum_error = std::abs(wsum - 1.0);
      res.trace.push_back(st);
    }
    if (stop) break;

    // Soft-count means feed the K-Means pass.
    std::vector<Vec> sm = soft_means(data, e.resp, last_assignment_means);
    res.assignment = assign_nearest(data, sm, &res.assignment);
    last_assignment_means = std::move(sm);

    stop = rule.should_stop(res.assignment.changed);
    if (options.record_trace) {
      IterationStats st;
      st.iteration = res.iterations;
      st.step = 'K';
      st.changed = res.assignment.changed;
      if (rule.last_change()) st.percentage_change = *rule.last_change();
      st.distortion = distortion(data, last_assignment_means, res.assignment.labels);
      res.trace.push_back(st);
    }
    if (stop) break;
    if (res.iterations >= options.max_iterations) {
      res.hit_iteration_cap = true;
      break;
    }
  }
  res.state = std::move(state);
  return res;
}

}  // namespace emkm
