#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "emkm/model.hpp"

namespace emkm {

enum class Scenario {
  DistinctAll,       // every cluster has its own mean and covariance
  SharedMean,        // clusters 0..2 share a mean, covariances differ
  SharedCovariance,  // clusters 0..2 share a covariance, means differ
};

std::string scenario_name(Scenario s);
Scenario parse_scenario(const std::string& name);

struct ScenarioSpec {
  std::size_t clusters = 0;
  std::size_t dim = 0;
  std::vector<std::size_t> points_per_cluster;
  std::vector<Vec> means;
  std::vector<SymMatrix> covariances;
  Scenario tag = Scenario::DistinctAll;
  std::uint64_t seed = 0;
};

// Default parameters for a scenario: means on the corners of a hypercube
// lattice with the given spacing (corner pattern = binary code of the
// cluster index), covariances A^T A + I with A drawn from the seed's
// substream. The sharing scenarios copy cluster 0's mean (respectively
// covariance) onto clusters 1 and 2.
ScenarioSpec make_scenario(Scenario tag, std::size_t clusters, std::size_t dim,
                           std::size_t points_per_cluster, std::uint64_t seed,
                           double spacing = 10.0);

// count draws from N(mean, covariance): mean + L z with L the Cholesky
// factor and z independent standard normal variates from rng. Regularizes a
// non-PD covariance once; throws std::invalid_argument if it still fails.
std::vector<Vec> mvn_sample(const Vec& mean, const SymMatrix& covariance,
                            std::size_t count, Rng& rng);

struct GeneratedData {
  Dataset data;
  std::vector<std::int32_t> truth;  // generating cluster per row (diagnostics only)
};

// Per-cluster draws (independent substreams of spec.seed), concatenated and
// deterministically shuffled. Validates the sharing structure announced by
// the scenario tag.
GeneratedData generate_dataset(const ScenarioSpec& spec);

// Provenance sidecar (JSON): seed, tag, sizes, means, covariances.
void write_manifest(const std::string& path, const ScenarioSpec& spec);

}  // namespace emkm
