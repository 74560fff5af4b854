#include "emkm/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "emkm/em.hpp"
#include "emkm/hybrid.hpp"
#include "emkm/kmeans.hpp"

namespace emkm {

namespace {

using nlohmann::json;

std::string shortest(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

struct RunOutcome {
  std::vector<std::int32_t> labels;
  std::vector<Vec> final_means;
  std::vector<double> weights;              // empty for plain K-Means
  std::vector<SymMatrix> covariances;       // empty for plain K-Means
  int iterations = 0;
  int kmeans_phase_iterations = 0;
  bool hit_cap = false;
};

RunOutcome dispatch(Algorithm alg, const Dataset& data, std::size_t k, Rng& rng,
                    const ClusterOptions& options) {
  RunOutcome out;
  switch (alg) {
    case Algorithm::StEM: {
      EmResult r = em_run(data, k, rng, options);
      out.labels = std::move(r.assignment.labels);
      for (auto& c : r.state.clusters) {
        out.final_means.push_back(std::move(c.mean));
        out.weights.push_back(c.weight);
        out.covariances.push_back(std::move(c.covariance));
      }
      out.iterations = r.iterations;
      out.hit_cap = r.hit_iteration_cap;
      break;
    }
    case Algorithm::KMeans: {
      const auto rows = sample_distinct_rows(data, k, rng);
      std::vector<Vec> means;
      means.reserve(k);
      for (const auto ri : rows) {
        const auto row = data.row(ri);
        means.emplace_back(row.begin(), row.end());
      }
      KMeansResult r = kmeans_run(data, std::move(means), options);
      out.labels = std::move(r.assignment.labels);
      out.final_means = std::move(r.means);
      out.iterations = r.iterations;
      out.hit_cap = r.hit_iteration_cap;
      break;
    }
    case Algorithm::KMEM: {
      KmemResult r = kmem_run(data, k, rng, options);
      out.labels = std::move(r.assignment.labels);
      for (auto& c : r.state.clusters) {
        out.final_means.push_back(std::move(c.mean));
        out.weights.push_back(c.weight);
        out.covariances.push_back(std::move(c.covariance));
      }
      out.iterations = r.kmeans_iterations + r.em_iterations;
      out.kmeans_phase_iterations = r.kmeans_iterations;
      out.hit_cap = r.kmeans_hit_cap || r.em_hit_cap;
      break;
    }
    case Algorithm::HbEMKM: {
      HbemkmResult r = hbemkm_run(data, k, rng, options);
      out.labels = std::move(r.assignment.labels);
      for (auto& c : r.state.clusters) {
        out.final_means.push_back(std::move(c.mean));
        out.weights.push_back(c.weight);
        out.covariances.push_back(std::move(c.covariance));
      }
      out.iterations = r.iterations;
      out.hit_cap = r.hit_iteration_cap;
      break;
    }
  }
  return out;
}

json covariance_to_json(const SymMatrix& c) {
  json rows = json::array();
  for (std::size_t r = 0; r < c.dim(); ++r) {
    json row = json::array();
    for (std::size_t col = 0; col < c.dim(); ++col) row.push_back(c(r, col));
    rows.push_back(std::move(row));
  }
  return rows;
}

json report_to_json(const RunReport& r) {
  json j;
  j["algorithm"] = algorithm_name(r.algorithm);
  j["k"] = r.k;
  j["seed"] = r.seed;
  j["seconds"] = r.seconds;
  j["iterations"] = r.iterations;
  j["kmeans_phase_iterations"] = r.kmeans_phase_iterations;
  j["cf"] = r.cf;
  j["sse"] = r.sse;
  j["cluster_sizes"] = r.cluster_sizes;
  j["hit_iteration_cap"] = r.hit_iteration_cap;
  j["failed"] = r.failed;
  j["error"] = r.error;
  j["io_during_timing"] = r.io_during_timing;
  if (r.subsampled_to) j["subsampled_to"] = *r.subsampled_to;
  return j;
}

RunReport report_from_json(const json& j) {
  RunReport r;
  r.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
  r.k = j.at("k").get<std::size_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.seconds = j.at("seconds").get<double>();
  r.iterations = j.at("iterations").get<int>();
  r.kmeans_phase_iterations = j.at("kmeans_phase_iterations").get<int>();
  r.cf = j.at("cf").get<double>();
  r.sse = j.at("sse").get<double>();
  r.cluster_sizes = j.at("cluster_sizes").get<std::vector<std::size_t>>();
  r.hit_iteration_cap = j.at("hit_iteration_cap").get<bool>();
  r.failed = j.at("failed").get<bool>();
  r.error = j.at("error").get<std::string>();
  r.io_during_timing = j.at("io_during_timing").get<bool>();
  if (j.contains("subsampled_to")) r.subsampled_to = j["subsampled_to"].get<std::size_t>();
  return r;
}

std::vector<Algorithm> algorithms_present(const std::vector<RunReport>& reports) {
  std::vector<Algorithm> order{Algorithm::StEM, Algorithm::KMeans, Algorithm::KMEM,
                               Algorithm::HbEMKM};
  std::vector<Algorithm> out;
  for (const auto a : order)
    if (std::any_of(reports.begin(), reports.end(),
                    [a](const RunReport& r) { return r.algorithm == a; }))
      out.push_back(a);
  return out;
}

std::vector<std::pair<std::size_t, std::uint64_t>> table_rows(
    const std::vector<RunReport>& reports) {
  std::set<std::pair<std::size_t, std::uint64_t>> keys;
  for (const auto& r : reports) keys.insert({r.k, r.seed});
  return {keys.begin(), keys.end()};
}

const RunReport* find_run(const std::vector<RunReport>& reports, std::size_t k,
                          std::uint64_t seed, Algorithm alg) {
  for (const auto& r : reports)
    if (r.k == k && r.seed == seed && r.algorithm == alg) return &r;
  return nullptr;
}

double metric_value(const RunReport& r, int metric) {
  switch (metric) {
    case 0: return r.seconds;
    case 1: return r.cf;
    default: return r.sse;
  }
}

constexpr const char* kMetricNames[3] = {"time", "cf", "sse"};
constexpr const char* kMetricTitles[3] = {"Execution time (seconds)", "Clustering fitness",
                                          "SSE"};

void write_metric_csv(const std::vector<RunReport>& reports, int metric,
                      const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  const auto algs = algorithms_present(reports);
  out << "k,seed";
  for (const auto a : algs) out << ',' << algorithm_name(a);
  out << '\n';
  for (const auto& [k, seed] : table_rows(reports)) {
    out << k << ',' << seed;
    for (const auto a : algs) {
      out << ',';
      if (const RunReport* r = find_run(reports, k, seed, a)) {
        if (r->failed)
          out << "failed";
        else
          out << shortest(metric_value(*r, metric));
      }
    }
    out << '\n';
  }
}

}  // namespace

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::StEM: return "stem";
    case Algorithm::KMeans: return "kmeans";
    case Algorithm::KMEM: return "kmem";
    case Algorithm::HbEMKM: return "hbemkm";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "stem") return Algorithm::StEM;
  if (name == "kmeans") return Algorithm::KMeans;
  if (name == "kmem") return Algorithm::KMEM;
  if (name == "hbemkm") return Algorithm::HbEMKM;
  throw std::invalid_argument("unknown algorithm: " + name);
}

ReportFormat parse_report_format(const std::string& name) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "table") return ReportFormat::Table;
  if (name == "json") return ReportFormat::Json;
  throw std::invalid_argument("unknown report format: " + name);
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  if (config.k_values.empty()) throw std::invalid_argument("run_experiment: empty k range");
  if (config.seeds.empty()) throw std::invalid_argument("run_experiment: empty seed list");
  if (config.algorithms.empty())
    throw std::invalid_argument("run_experiment: no algorithms selected");
  if (!(config.cluster.threshold_pct > 0.0))
    throw std::invalid_argument("run_experiment: threshold must be positive");
  if (config.data_path.has_value() == config.scenario.has_value())
    throw std::invalid_argument(
        "run_experiment: exactly one of data_path / scenario must be set");

  // Everything I/O-bound happens here, before any timer starts.
  Dataset data = config.data_path ? load_dataset(*config.data_path, config.columns)
                                  : generate_dataset(*config.scenario).data;

  std::optional<std::size_t> subsampled;
  if (config.subsample_rows && *config.subsample_rows < data.rows()) {
    Rng sub_rng(config.subsample_seed);
    auto keep = sub_rng.sample_without_replacement(data.rows(), *config.subsample_rows);
    std::sort(keep.begin(), keep.end());  // keep original order
    Dataset smaller(keep.size(), data.cols());
    for (std::size_t i = 0; i < keep.size(); ++i)
      for (std::size_t j = 0; j < data.cols(); ++j) smaller(i, j) = data(keep[i], j);
    data = std::move(smaller);
    subsampled = data.rows();
  }

  if (config.output_dir) std::filesystem::create_directories(*config.output_dir);

  ExperimentResult result;
  result.dataset_rows = data.rows();
  result.dataset_cols = data.cols();

  for (const auto k : config.k_values) {
    for (const auto seed : config.seeds) {
      for (const auto alg : config.algorithms) {
        RunReport rep;
        rep.algorithm = alg;
        rep.k = k;
        rep.seed = seed;
        rep.subsampled_to = subsampled;
        try {
          Rng rng(seed);
          const std::uint64_t io_before = storage_bytes_read();
          const auto t0 = std::chrono::steady_clock::now();
          RunOutcome run = dispatch(alg, data, k, rng, config.cluster);
          const auto t1 = std::chrono::steady_clock::now();
          rep.io_during_timing = storage_bytes_read() != io_before;
          rep.seconds = std::chrono::duration<double>(t1 - t0).count();
          rep.iterations = run.iterations;
          rep.kmeans_phase_iterations = run.kmeans_phase_iterations;
          rep.hit_iteration_cap = run.hit_cap;

          const auto cr =
              ClusteringResult::from_labels(data, run.labels, k, &run.final_means);
          rep.cf = clustering_fitness(cr, config.metrics);
          rep.sse = sse(cr, config.metrics);
          rep.cluster_sizes = cr.counts;

          if (config.output_dir) {
            json detail = report_to_json(rep);
            detail["labels"] = run.labels;
            detail["means"] = run.final_means;
            if (!run.weights.empty()) detail["weights"] = run.weights;
            if (!run.covariances.empty()) {
              json covs = json::array();
              for (const auto& c : run.covariances) covs.push_back(covariance_to_json(c));
              detail["covariances"] = std::move(covs);
            }
            const auto name = "run_" + algorithm_name(alg) + "_k" + std::to_string(k) +
                              "_s" + std::to_string(seed) + ".json";
            std::ofstream out(*config.output_dir / name);
            out << detail.dump() << "\n";
          }
        } catch (const std::exception& e) {
          rep.failed = true;
          rep.error = e.what();
        }
        result.runs.push_back(std::move(rep));
      }
    }
  }

  if (config.output_dir) {
    json j;
    j["dataset"] = {{"rows", result.dataset_rows}, {"cols", result.dataset_cols}};
    json runs = json::array();
    for (const auto& r : result.runs) runs.push_back(report_to_json(r));
    j["runs"] = std::move(runs);
    std::ofstream out(*config.output_dir / "runs.json");
    out << j.dump(2) << "\n";
  }
  return result;
}

std::string format_report_tables(const std::vector<RunReport>& reports) {
  const auto algs = algorithms_present(reports);
  const auto rows = table_rows(reports);
  std::ostringstream out;
  char buf[64];
  for (int metric = 0; metric < 3; ++metric) {
    out << kMetricTitles[metric] << "\n";
    std::snprintf(buf, sizeof(buf), "%-6s %-6s", "k", "seed");
    out << buf;
    for (const auto a : algs) {
      std::snprintf(buf, sizeof(buf), " %14s", algorithm_name(a).c_str());
      out << buf;
    }
    out << "\n";
    for (const auto& [k, seed] : rows) {
      std::snprintf(buf, sizeof(buf), "%-6zu %-6llu", k,
                    static_cast<unsigned long long>(seed));
      out << buf;
      for (const auto a : algs) {
        const RunReport* r = find_run(reports, k, seed, a);
        if (!r)
          std::snprintf(buf, sizeof(buf), " %14s", "");
        else if (r->failed)
          std::snprintf(buf, sizeof(buf), " %14s", "failed");
        else
          std::snprintf(buf, sizeof(buf), " %14.6g", metric_value(*r, metric));
        out << buf;
      }
      out << "\n";
    }
    out << "\n";
  }
  return out.str();
}

void emit_report(const std::vector<RunReport>& reports, ReportFormat format,
                 const std::filesystem::path& dir) {
  if (reports.empty()) throw std::invalid_argument("emit_report: no reports");
  std::filesystem::create_directories(dir);

  switch (format) {
    case ReportFormat::Csv:
      for (int metric = 0; metric < 3; ++metric)
        write_metric_csv(reports, metric,
                         dir / (std::string(kMetricNames[metric]) + ".csv"));
      break;
    case ReportFormat::Table: {
      std::ofstream out(dir / "report.txt");
      if (!out) throw std::runtime_error("cannot open report.txt");
      out << format_report_tables(reports);
      break;
    }
    case ReportFormat::Json: {
      json j;
      json runs = json::array();
      for (const auto& r : reports) runs.push_back(report_to_json(r));
      j["runs"] = std::move(runs);
      std::ofstream out(dir / "runs.json");
      if (!out) throw std::runtime_error("cannot open runs.json");
      out << j.dump(2) << "\n";
      break;
    }
  }

  // Plot-ready series: k vs value, one file per algorithm and metric.
  const auto plots = dir / "plot";
  std::filesystem::create_directories(plots);
  for (int metric = 0; metric < 3; ++metric) {
    for (const auto a : algorithms_present(reports)) {
      std::ofstream out(plots / (std::string(kMetricNames[metric]) + "_" +
                                 algorithm_name(a) + ".dat"));
      for (const auto& [k, seed] : table_rows(reports)) {
        const RunReport* r = find_run(reports, k, seed, a);
        if (r && !r->failed) out << k << ' ' << shortest(metric_value(*r, metric)) << '\n';
      }
    }
  }
}

std::vector<RunReport> load_reports(const std::filesystem::path& runs_json) {
  std::ifstream in(runs_json);
  if (!in) throw std::runtime_error("cannot open " + runs_json.string());
  json j;
  in >> j;
  std::vector<RunReport> out;
  for (const auto& rj : j.at("runs")) out.push_back(report_from_json(rj));
  return out;
}

}  // namespace emkm
