// Command-line driver: generate synthetic datasets, run clustering sweeps,
// re-emit reports from saved results.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "emkm/bench.hpp"
#include "emkm/datagen.hpp"
#include "emkm/io.hpp"

namespace {

std::vector<std::size_t> parse_k_values(const std::string& text) {
  auto v = emkm::parse_column_list(text);  // same "10-15,20" syntax
  if (v.empty()) throw std::invalid_argument("empty k list");
  return v;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string::npos) end = text.size();
    out.push_back(std::stoull(text.substr(pos, end - pos)));
    pos = end + 1;
  }
  if (out.empty()) throw std::invalid_argument("empty seed list");
  return out;
}

std::vector<emkm::Algorithm> parse_algorithm_list(const std::string& text) {
  std::vector<emkm::Algorithm> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string::npos) end = text.size();
    out.push_back(emkm::parse_algorithm(text.substr(pos, end - pos)));
    pos = end + 1;
  }
  if (out.empty()) throw std::invalid_argument("empty algorithm list");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EM / K-Means hybrid clustering benchmark"};
  app.require_subcommand(1);

  // ---- generate ----
  auto* gen = app.add_subcommand("generate", "generate a synthetic dataset");
  std::string gen_scenario = "1";
  std::size_t gen_clusters = 10, gen_dim = 10, gen_per_cluster = 5000;
  std::uint64_t gen_seed = 1;
  double gen_spacing = 10.0;
  std::string gen_out, gen_truth;
  gen->add_option("--scenario", gen_scenario,
                  "1|distinct-all, 2|shared-mean, 3|shared-covariance");
  gen->add_option("--clusters", gen_clusters, "generating cluster count");
  gen->add_option("--dim", gen_dim, "dimensions");
  gen->add_option("--per-cluster", gen_per_cluster, "points per cluster");
  gen->add_option("--seed", gen_seed, "generation seed");
  gen->add_option("--spacing", gen_spacing, "lattice spacing between cluster means");
  gen->add_option("--out", gen_out, "output CSV path")->required();
  gen->add_option("--truth", gen_truth, "optional ground-truth label file");

  // ---- run ----
  auto* run = app.add_subcommand("run", "run a clustering sweep");
  std::string run_data, run_features, run_drop;
  bool run_header = false;
  std::string run_scenario;
  std::size_t run_clusters = 10, run_dim = 10, run_per_cluster = 1000;
  std::uint64_t run_gen_seed = 1;
  std::string run_algorithms = "stem,kmeans,kmem,hbemkm";
  std::string run_k = "10-15";
  std::string run_seeds = "1";
  double run_threshold = 3.0;
  int run_max_iters = 500;
  double run_lambda = 0.5;
  std::string run_inter_n = "centroids";
  std::string run_cov_mean = "prior";
  std::string run_sse = "distance";
  std::string run_outdir, run_format = "table";
  std::size_t run_subsample = 0;
  std::uint64_t run_subsample_seed = 0;
  run->add_option("--data", run_data, "dataset file (delimited text)");
  run->add_option("--features", run_features, "feature columns, e.g. 1-16 (default: all)");
  run->add_option("--drop", run_drop, "columns to drop, e.g. 0");
  run->add_flag("--header", run_header, "skip the first line");
  run->add_option("--scenario", run_scenario, "synthetic scenario instead of --data");
  run->add_option("--clusters", run_clusters, "synthetic: generating cluster count");
  run->add_option("--dim", run_dim, "synthetic: dimensions");
  run->add_option("--per-cluster", run_per_cluster, "synthetic: points per cluster");
  run->add_option("--gen-seed", run_gen_seed, "synthetic: generation seed");
  run->add_option("--algorithms", run_algorithms, "subset of stem,kmeans,kmem,hbemkm");
  run->add_option("--k", run_k, "cluster counts, e.g. 10-15 or 10,12");
  run->add_option("--seeds", run_seeds, "comma-separated clustering seeds");
  run->add_option("--threshold", run_threshold, "termination threshold (percent)");
  run->add_option("--max-iters", run_max_iters, "iteration safety cap");
  run->add_option("--lambda", run_lambda, "clustering fitness weight");
  run->add_option("--inter-n", run_inter_n, "inter-similarity count: centroids|points");
  run->add_option("--cov-mean", run_cov_mean, "M-step covariance mean: prior|updated");
  run->add_option("--sse", run_sse, "sse form: distance|squared");
  run->add_option("--subsample", run_subsample, "subsample to this many rows (0 = off)");
  run->add_option("--subsample-seed", run_subsample_seed, "subsampling seed");
  run->add_option("--outdir", run_outdir, "run directory for reports and raw results")
      ->required();
  run->add_option("--format", run_format, "report format: csv|table|json");

  // ---- report ----
  auto* rep = app.add_subcommand("report", "re-emit reports from saved results");
  std::string rep_runs, rep_format = "table", rep_outdir;
  rep->add_option("--runs", rep_runs, "run directory (containing runs.json)")->required();
  rep->add_option("--format", rep_format, "report format: csv|table|json");
  rep->add_option("--outdir", rep_outdir, "output directory (default: the run directory)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const auto spec = emkm::make_scenario(emkm::parse_scenario(gen_scenario),
                                            gen_clusters, gen_dim, gen_per_cluster,
                                            gen_seed, gen_spacing);
      const auto generated = emkm::generate_dataset(spec);
      emkm::write_dataset_csv(gen_out, generated.data);
      emkm::write_manifest(gen_out + ".manifest.json", spec);
      if (!gen_truth.empty()) emkm::write_labels(gen_truth, generated.truth);
      std::cout << "wrote " << generated.data.rows() << " x " << generated.data.cols()
                << " dataset to " << gen_out << "\n";
    } else if (run->parsed()) {
      emkm::ExperimentConfig config;
      if (!run_data.empty() && !run_scenario.empty())
        throw std::invalid_argument("pass either --data or --scenario, not both");
      if (run_data.empty() && run_scenario.empty())
        throw std::invalid_argument("one of --data or --scenario is required");
      if (!run_data.empty()) {
        config.data_path = run_data;
        if (!run_features.empty())
          config.columns.features = emkm::parse_column_list(run_features);
        if (!run_drop.empty()) config.columns.drop = emkm::parse_column_list(run_drop);
        config.columns.has_header = run_header;
      } else {
        config.scenario =
            emkm::make_scenario(emkm::parse_scenario(run_scenario), run_clusters, run_dim,
                                run_per_cluster, run_gen_seed);
      }
      config.algorithms = parse_algorithm_list(run_algorithms);
      config.k_values = parse_k_values(run_k);
      config.seeds = parse_seed_list(run_seeds);
      config.cluster.threshold_pct = run_threshold;
      config.cluster.max_iterations = run_max_iters;
      config.metrics.lambda = run_lambda;
      if (run_inter_n == "centroids")
        config.metrics.inter_count = emkm::InterSimilarityCount::Centroids;
      else if (run_inter_n == "points")
        config.metrics.inter_count = emkm::InterSimilarityCount::Points;
      else
        throw std::invalid_argument("--inter-n must be centroids or points");
      if (run_cov_mean == "prior")
        config.cluster.covariance_mean = emkm::CovarianceMean::Prior;
      else if (run_cov_mean == "updated")
        config.cluster.covariance_mean = emkm::CovarianceMean::Updated;
      else
        throw std::invalid_argument("--cov-mean must be prior or updated");
      if (run_sse == "distance")
        config.metrics.sse_form = emkm::SseForm::Distance;
      else if (run_sse == "squared")
        config.metrics.sse_form = emkm::SseForm::SquaredDistance;
      else
        throw std::invalid_argument("--sse must be distance or squared");
      if (run_subsample > 0) {
        config.subsample_rows = run_subsample;
        config.subsample_seed = run_subsample_seed;
      }
      config.output_dir = run_outdir;

      const auto format = emkm::parse_report_format(run_format);
      const auto result = emkm::run_experiment(config);
      emkm::emit_report(result.runs, format, run_outdir);
      std::cout << emkm::format_report_tables(result.runs);
      for (const auto& r : result.runs)
        if (r.failed)
          std::cerr << "run failed: " << emkm::algorithm_name(r.algorithm) << " k=" << r.k
                    << " seed=" << r.seed << ": " << r.error << "\n";
    } else if (rep->parsed()) {
      const auto reports =
          emkm::load_reports(std::filesystem::path(rep_runs) / "runs.json");
      const auto outdir = rep_outdir.empty() ? rep_runs : rep_outdir;
      emkm::emit_report(reports, emkm::parse_report_format(rep_format), outdir);
      std::cout << emkm::format_report_tables(reports);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
