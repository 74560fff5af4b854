#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "emkm/linalg.hpp"
#include "emkm/rng.hpp"

namespace emkm {

// N x d row-major sample matrix. Immutable after load in every pipeline.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  // Validates equal row lengths and finite entries.
  static Dataset from_rows(const std::vector<Vec>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const std::vector<double>& storage() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// One mixture component: mean vector, covariance, weight.
struct ClusterParams {
  Vec mean;
  SymMatrix covariance;
  double weight = 0.0;
};

// Full mixture: k components, the iteration counter, and the per-component
// Cholesky factors (with log-determinants) used by every density evaluation.
// The factor cache is rebuilt once per parameter update, never per point.
struct MixtureState {
  std::vector<ClusterParams> clusters;
  int iteration = 0;
  std::vector<CholeskyFactor> factors;

  std::size_t k() const { return clusters.size(); }

  // Factorizes every covariance. A covariance that fails (lost definiteness
  // to round-off) is regularized in place first, so the stored matrix always
  // matches its factor.
  void rebuild_cache();
};

// Hard labels plus the count of points whose label differs from the previous
// assignment pass (the whole dataset counts as changed on the first pass).
struct Assignment {
  std::vector<std::int32_t> labels;
  std::size_t changed = 0;
};

// |psi_t - psi_t1| / psi_t * 100. nullopt signals termination: a zero
// baseline means the previous pass moved nothing, a fixed point.
std::optional<double> percentage_change(std::size_t psi_t, std::size_t psi_t1);

// Stop rule applied to the stream of reassignment counts. Raw recipe:
// stop when the percentage change between consecutive counts drops below
// the threshold, or immediately when a pass moves no points. The first
// count fed in can never stop the run (no pair to compare yet).
class TerminationRule {
 public:
  explicit TerminationRule(double threshold_pct = 3.0) : threshold_(threshold_pct) {}

  // Feed the reassignment count of the pass that just ran; true = stop now.
  bool should_stop(std::size_t changed);

  // Percentage change computed by the latest should_stop call, if any.
  std::optional<double> last_change() const { return last_change_; }

 private:
  double threshold_;
  std::optional<std::size_t> prev_;
  std::optional<double> last_change_;
};

enum class CovarianceMean {
  Prior,    // covariance about the previous iteration's mean, as run here
  Updated,  // textbook variant: covariance about the freshly updated mean
};

// Knobs shared by every clustering loop.
struct ClusterOptions {
  double threshold_pct = 3.0;
  int max_iterations = 500;
  CovarianceMean covariance_mean = CovarianceMean::Prior;
  bool record_trace = false;
};

// Per-pass diagnostics, collected only when ClusterOptions::record_trace is
// set. step is 'K' for a nearest-mean pass, 'E' for a posterior pass.
// Fields that do not apply to a pass stay NaN.
struct IterationStats {
  int iteration = 0;
  char step = '?';
  std::size_t changed = 0;
  double percentage_change = std::numeric_limits<double>::quiet_NaN();
  double distortion = std::numeric_limits<double>::quiet_NaN();
  double resp_row_error = std::numeric_limits<double>::quiet_NaN();
  double weight_sum_error = std::numeric_limits<double>::quiet_NaN();
};

// k distinct row indices drawn uniformly, the shared seeding step of every
// algorithm: with equal seeds, all pipelines start from the same rows.
std::vector<std::size_t> sample_distinct_rows(const Dataset& data, std::size_t k, Rng& rng);

// Population covariance (divide by N) about the dataset mean.
SymMatrix global_covariance(const Dataset& data);

// Initial mixture: weights exactly 1/k, means = k distinct random rows,
// every covariance = regularized global covariance, iteration 0.
// Throws std::invalid_argument when k > N or k == 0.
MixtureState init_params(const Dataset& data, std::size_t k, Rng& rng);

}  // namespace emkm
