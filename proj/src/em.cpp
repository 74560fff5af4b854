#include "emkm/em.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace emkm {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

// logp[j] = log W_j + log N(x | cluster j); returns the log-sum-exp.
// diff and y are scratch of length d.
double point_log_densities(std::span<const double> x, const MixtureState& state,
                           std::span<const double> log_weights, std::span<double> logp,
                           std::span<double> diff, std::span<double> y) {
  const std::size_t k = state.k();
  const std::size_t d = x.size();
  for (std::size_t j = 0; j < k; ++j) {
    const auto& c = state.clusters[j];
    for (std::size_t a = 0; a < d; ++a) diff[a] = x[a] - c.mean[a];
    state.factors[j].solve_into(diff, y);
    double quad = 0.0;
    for (std::size_t a = 0; a < d; ++a) quad += diff[a] * y[a];
    logp[j] = log_weights[j] -
              0.5 * (static_cast<double>(d) * kLog2Pi + state.factors[j].log_det() + quad);
  }
  const double m = *std::max_element(logp.begin(), logp.end());
  double sum = 0.0;
  for (std::size_t j = 0; j < k; ++j) sum += std::exp(logp[j] - m);
  return m + std::log(sum);
}

std::vector<double> log_weights_of(const MixtureState& state) {
  std::vector<double> lw(state.k());
  for (std::size_t j = 0; j < state.k(); ++j) lw[j] = std::log(state.clusters[j].weight);
  return lw;
}

}  // namespace

double log_gaussian_pdf(std::span<const double> x, const Vec& mean,
                        const CholeskyFactor& factor) {
  const std::size_t d = x.size();
  if (mean.size() != d || factor.dim() != d)
    throw std::invalid_argument("log_gaussian_pdf: dimension mismatch");
  Vec diff(d);
  for (std::size_t a = 0; a < d; ++a) diff[a] = x[a] - mean[a];
  const Vec y = factor.solve(diff);
  double quad = 0.0;
  for (std::size_t a = 0; a < d; ++a) quad += diff[a] * y[a];
  return -0.5 * (static_cast<double>(d) * kLog2Pi + factor.log_det() + quad);
}

double mixture_log_density(std::span<const double> x, const MixtureState& state) {
  const auto lw = log_weights_of(state);
  std::vector<double> logp(state.k()), diff(x.size()), y(x.size());
  return point_log_densities(x, state, lw, logp, diff, y);
}

EStep responsibilities(const Dataset& data, const MixtureState& state,
                       const Assignment* previous) {
  const std::size_t n = data.rows();
  const std::size_t k = state.k();
  if (state.factors.size() != k)
    throw std::invalid_argument("responsibilities: factor cache not built");
  if (previous && previous->labels.size() != n)
    throw std::invalid_argument("responsibilities: previous assignment size mismatch");

  EStep out;
  out.resp = Responsibilities(n, k);
  out.assignment.labels.resize(n);
  out.assignment.changed = 0;

  const auto lw = log_weights_of(state);
  std::vector<double> logp(k), diff(data.cols()), y(data.cols());
  for (std::size_t i = 0; i < n; ++i) {
    const double lse = point_log_densities(data.row(i), state, lw, logp, diff, y);

    double* row = &out.resp(i, 0);
    double row_sum = 0.0;
    std::int32_t best = 0;
    for (std::size_t j = 0; j < k; ++j) {
      row[j] = std::exp(logp[j] - lse);
      row_sum += row[j];
      if (logp[j] > logp[static_cast<std::size_t>(best)])
        best = static_cast<std::int32_t>(j);
    }
    double check = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      row[j] /= row_sum;
      check += row[j];
    }
    out.max_row_sum_error = std::max(out.max_row_sum_error, std::abs(check - 1.0));

    out.assignment.labels[i] = best;
    if (!previous || previous->labels[i] != best) ++out.assignment.changed;
  }
  return out;
}

MixtureState m_step(const Dataset& data, const Responsibilities& resp,
                    const MixtureState& state, const ClusterOptions& options) {
  const std::size_t n = data.rows();
  const std::size_t d = data.cols();
  const std::size_t k = state.k();
  if (resp.rows != n || resp.k != k)
    throw std::invalid_argument("m_step: responsibility shape mismatch");

  std::vector<double> soft_count(k, 0.0);
  std::vector<Vec> mean_next(k, Vec(d, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = data.row(i);
    const double* r = resp.row(i).data();
    for (std::size_t j = 0; j < k; ++j) {
      soft_count[j] += r[j];
      auto& mj = mean_next[j];
      for (std::size_t a = 0; a < d; ++a) mj[a] += r[j] * x[a];
    }
  }
  for (std::size_t j = 0; j < k; ++j)
    if (soft_count[j] >= 1e-12)
      for (double& v : mean_next[j]) v /= soft_count[j];

  // Covariance pass about the chosen base mean.
  std::vector<SymMatrix> cov_next(k, SymMatrix(d));
  std::vector<const Vec*> base(k);
  for (std::size_t j = 0; j < k; ++j)
    base[j] = options.covariance_mean == CovarianceMean::Prior ? &state.clusters[j].mean
                                                               : &mean_next[j];
  {
    std::vector<std::vector<double>> acc(k, std::vector<double>(d * (d + 1) / 2, 0.0));
    Vec diff(d);
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = data.row(i);
      const double* r = resp.row(i).data();
      for (std::size_t j = 0; j < k; ++j) {
        if (r[j] == 0.0) continue;
        const Vec& b = *base[j];
        for (std::size_t a = 0; a < d; ++a) diff[a] = x[a] - b[a];
        double* out = acc[j].data();
        for (std::size_t a = 0; a < d; ++a) {
          const double ra = r[j] * diff[a];
          for (std::size_t bb = a; bb < d; ++bb) *out++ += ra * diff[bb];
        }
      }
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (soft_count[j] < 1e-12) continue;
      const double* in = acc[j].data();
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t bb = a; bb < d; ++bb) cov_next[j].set(a, bb, *in++ / soft_count[j]);
    }
  }

  MixtureState next;
  next.iteration = state.iteration + 1;
  next.clusters.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    auto& c = next.clusters[j];
    if (soft_count[j] < 1e-12) {
      // Collapsed component: re-seed on the point the mixture explains worst.
      std::size_t worst = 0;
      double worst_ld = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        const double ld = mixture_log_density(data.row(i), state);
        if (ld < worst_ld) {
          worst_ld = ld;
          worst = i;
        }
      }
      const auto x = data.row(worst);
      c.mean.assign(x.begin(), x.end());
      c.covariance = regularize(global_covariance(data));
      c.weight = 1.0 / static_cast<double>(k);
    } else {
      c.mean = std::move(mean_next[j]);
      c.covariance = regularize(cov_next[j]);
      c.weight = soft_count[j] / static_cast<double>(n);
    }
  }
  double wsum = 0.0;
  for (const auto& c : next.clusters) wsum += c.weight;
  for (auto& c : next.clusters) c.weight /= wsum;
  next.rebuild_cache();
  return next;
}

EmResult em_loop(const Dataset& data, MixtureState state, const Assignment* previous,
                 const ClusterOptions& options) {
  EmResult res;
  TerminationRule rule(options.threshold_pct);
  const Assignment* prev = previous;

  while (true) {
    EStep e = responsibilities(data, state, prev);
    state = m_step(data, e.resp, state, options);
    res.assignment = std::move(e.assignment);
    prev = &res.assignment;
    ++res.iterations;

    const bool stop = rule.should_stop(res.assignment.changed);
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
    if (res.iterations >= options.max_iterations) {
      res.hit_iteration_cap = true;
      break;
    }
  }
  res.state = std::move(state);
  return res;
}

EmResult em_run(const Dataset& data, std::size_t k, Rng& rng,
                const ClusterOptions& options) {
  MixtureState state = init_params(data, k, rng);
  std::vector<Vec> initial_means;
  initial_means.reserve(k);
  for (const auto& c : state.clusters) initial_means.push_back(c.mean);
  EmResult res = em_loop(data, std::move(state), nullptr, options);
  res.initial_means = std::move(initial_means);
  return res;
}

}  // namespace emkm
