#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "emkm/datagen.hpp"
#include "emkm/io.hpp"
#include "emkm/metrics.hpp"
#include "emkm/model.hpp"

namespace emkm {

enum class Algorithm { StEM, KMeans, KMEM, HbEMKM };

std::string algorithm_name(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

struct ExperimentConfig {
  // Exactly one data source: a file (with column spec) or a synthetic spec.
  std::optional<std::filesystem::path> data_path;
  ColumnSpec columns;
  std::optional<ScenarioSpec> scenario;

  std::vector<Algorithm> algorithms{Algorithm::StEM, Algorithm::KMeans, Algorithm::KMEM,
                                    Algorithm::HbEMKM};
  std::vector<std::size_t> k_values{10, 11, 12, 13, 14, 15};
  std::vector<std::uint64_t> seeds{1};

  ClusterOptions cluster;
  MetricsOptions metrics;

  // Optional row subsampling for oversized files (drawn uniformly without
  // replacement, original order kept; reports carry the subsample size).
  std::optional<std::size_t> subsample_rows;
  std::uint64_t subsample_seed = 0;

  // When set, raw per-run results (labels + parameters) and the report
  // collection are persisted here.
  std::optional<std::filesystem::path> output_dir;
};

struct RunReport {
  Algorithm algorithm = Algorithm::StEM;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  double seconds = 0.0;  // clustering loop only; load and metrics excluded
  int iterations = 0;
  int kmeans_phase_iterations = 0;  // KMEM only
  double cf = 0.0;
  double sse = 0.0;
  std::vector<std::size_t> cluster_sizes;
  bool hit_iteration_cap = false;
  bool failed = false;
  std::string error;
  bool io_during_timing = false;  // storage touched inside the timed window
  std::optional<std::size_t> subsampled_to;
};

struct ExperimentResult {
  std::vector<RunReport> runs;
  std::size_t dataset_rows = 0;
  std::size_t dataset_cols = 0;
};

// Runs the full (k, seed, algorithm) sweep. The dataset is loaded (or
// generated) once, before any timer starts; the same seed hands every
// algorithm the same initial rows; CF and SSE are computed after the timer
// stops. A failing run is reported with its error and the sweep continues.
ExperimentResult run_experiment(const ExperimentConfig& config);

enum class ReportFormat { Csv, Table, Json };
ReportFormat parse_report_format(const std::string& name);

// Writes one table per metric (time, cf, sse; rows = (k, seed), columns =
// algorithms) in the chosen format, a structured runs.json with full per-run
// detail, and two-column (k, value) plot series per algorithm and metric.
// Throws std::invalid_argument on an empty report set.
void emit_report(const std::vector<RunReport>& reports, ReportFormat format,
                 const std::filesystem::path& dir);

// Renders the per-metric tables as aligned text (the Table format's layout).
std::string format_report_tables(const std::vector<RunReport>& reports);

// Reloads the report collection persisted by run_experiment.
std::vector<RunReport> load_reports(const std::filesystem::path& runs_json);

}  // namespace emkm
