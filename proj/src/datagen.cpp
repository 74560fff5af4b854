#include "emkm/datagen.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace emkm {

namespace {

// Substream labels: cluster j draws from substream j+1, the shuffle from 0.
constexpr std::uint64_t kShuffleStream = 0;

bool same_vec(const Vec& a, const Vec& b) { return a == b; }

void validate_spec(const ScenarioSpec& spec) {
  const std::size_t k = spec.clusters;
  if (k == 0 || spec.dim == 0) throw std::invalid_argument("ScenarioSpec: empty shape");
  if (spec.means.size() != k || spec.covariances.size() != k ||
      spec.points_per_cluster.size() != k)
    throw std::invalid_argument("ScenarioSpec: per-cluster field size mismatch");
  for (const auto& m : spec.means)
    if (m.size() != spec.dim) throw std::invalid_argument("ScenarioSpec: mean dimension");
  for (const auto& c : spec.covariances)
    if (c.dim() != spec.dim) throw std::invalid_argument("ScenarioSpec: covariance dimension");
  for (const auto n : spec.points_per_cluster)
    if (n == 0) throw std::invalid_argument("ScenarioSpec: empty cluster requested");

  switch (spec.tag) {
    case Scenario::DistinctAll:
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b)
          if (same_vec(spec.means[a], spec.means[b]))
            throw std::invalid_argument("ScenarioSpec: distinct-all scenario repeats a mean");
      break;
    case Scenario::SharedMean: {
      bool found = false;
      for (std::size_t a = 0; a < k && !found; ++a)
        for (std::size_t b = a + 1; b < k && !found; ++b)
          found = same_vec(spec.means[a], spec.means[b]) &&
                  !(spec.covariances[a] == spec.covariances[b]);
      if (!found)
        throw std::invalid_argument(
            "ScenarioSpec: shared-mean scenario needs two clusters with equal means and "
            "different covariances");
      break;
    }
    case Scenario::SharedCovariance: {
      bool found = false;
      for (std::size_t a = 0; a < k && !found; ++a)
        for (std::size_t b = a + 1; b < k && !found; ++b)
          found = spec.covariances[a] == spec.covariances[b] &&
                  !same_vec(spec.means[a], spec.means[b]);
      if (!found)
        throw std::invalid_argument(
            "ScenarioSpec: shared-covariance scenario needs two clusters with equal "
            "covariances and different means");
      break;
    }
  }
}

}  // namespace

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::DistinctAll: return "distinct-all";
    case Scenario::SharedMean: return "shared-mean";
    case Scenario::SharedCovariance: return "shared-covariance";
  }
  return "?";
}

Scenario parse_scenario(const std::string& name) {
  if (name == "distinct-all" || name == "1") return Scenario::DistinctAll;
  if (name == "shared-mean" || name == "2") return Scenario::SharedMean;
  if (name == "shared-covariance" || name == "3") return Scenario::SharedCovariance;
  throw std::invalid_argument("unknown scenario: " + name);
}

ScenarioSpec make_scenario(Scenario tag, std::size_t clusters, std::size_t dim,
                           std::size_t points_per_cluster, std::uint64_t seed,
                           double spacing) {
  if (clusters == 0 || dim == 0)
    throw std::invalid_argument("make_scenario: empty shape");
  if (dim < 64 && clusters > (std::size_t{1} << dim))
    throw std::invalid_argument("make_scenario: too many clusters for the corner lattice");

  ScenarioSpec spec;
  spec.clusters = clusters;
  spec.dim = dim;
  spec.points_per_cluster.assign(clusters, points_per_cluster);
  spec.tag = tag;
  spec.seed = seed;

  Rng base(seed);
  for (std::size_t j = 0; j < clusters; ++j) {
    Vec mean(dim, 0.0);
    for (std::size_t c = 0; c < dim && c < 63; ++c)
      if ((j >> c) & 1U) mean[c] = spacing;
    spec.means.push_back(std::move(mean));

    Rng sub = base.substream(1000 + j);
    std::vector<double> a(dim * dim);
    for (double& v : a) v = sub.next_normal();
    SymMatrix cov(dim);
    for (std::size_t r = 0; r < dim; ++r)
      for (std::size_t c = r; c < dim; ++c) {
        double s = 0.0;
        for (std::size_t t = 0; t < dim; ++t) s += a[t * dim + r] * a[t * dim + c];
        cov.set(r, c, s + (r == c ? 1.0 : 0.0));
      }
    spec.covariances.push_back(std::move(cov));
  }

  if (tag == Scenario::SharedMean) {
    for (std::size_t j = 1; j < std::min<std::size_t>(3, clusters); ++j)
      spec.means[j] = spec.means[0];
  } else if (tag == Scenario::SharedCovariance) {
    for (std::size_t j = 1; j < std::min<std::size_t>(3, clusters); ++j)
      spec.covariances[j] = spec.covariances[0];
  }
  validate_spec(spec);
  return spec;
}

std::vector<Vec> mvn_sample(const Vec& mean, const SymMatrix& covariance,
                            std::size_t count, Rng& rng) {
  const std::size_t d = mean.size();
  if (covariance.dim() != d)
    throw std::invalid_argument("mvn_sample: covariance dimension mismatch");
  auto factor = cholesky(covariance);
  if (!factor) factor = cholesky(regularize(covariance));
  if (!factor)
    throw std::invalid_argument("mvn_sample: covariance not positive-definite");

  std::vector<Vec> samples;
  samples.reserve(count);
  Vec z(d);
  for (std::size_t s = 0; s < count; ++s) {
    for (double& v : z) v = rng.next_normal();
    Vec x(mean);
    for (std::size_t r = 0; r < d; ++r) {
      double acc = 0.0;
      for (std::size_t c = 0; c <= r; ++c) acc += (*factor)(r, c) * z[c];
      x[r] += acc;
    }
    samples.push_back(std::move(x));
  }
  return samples;
}

GeneratedData generate_dataset(const ScenarioSpec& spec) {
  validate_spec(spec);
  Rng base(spec.seed);

  std::vector<Vec> rows;
  std::vector<std::int32_t> truth;
  for (std::size_t j = 0; j < spec.clusters; ++j) {
    Rng sub = base.substream(j + 1);
    auto samples = mvn_sample(spec.means[j], spec.covariances[j],
                              spec.points_per_cluster[j], sub);
    for (auto& s : samples) {
      rows.push_back(std::move(s));
      truth.push_back(static_cast<std::int32_t>(j));
    }
  }

  // One deterministic permutation applied to rows and truth together.
  std::vector<std::size_t> perm(rows.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  Rng shuffle_rng = base.substream(kShuffleStream);
  shuffle_rng.shuffle(perm);

  GeneratedData out;
  out.data = Dataset(rows.size(), spec.dim);
  out.truth.resize(rows.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    const auto& src = rows[perm[i]];
    for (std::size_t a = 0; a < spec.dim; ++a) out.data(i, a) = src[a];
    out.truth[i] = truth[perm[i]];
  }
  return out;
}

void write_manifest(const std::string& path, const ScenarioSpec& spec) {
  nlohmann::json j;
  j["scenario"] = scenario_name(spec.tag);
  j["seed"] = spec.seed;
  j["clusters"] = spec.clusters;
  j["dim"] = spec.dim;
  j["points_per_cluster"] = spec.points_per_cluster;
  j["means"] = spec.means;
  auto& covs = j["covariances"] = nlohmann::json::array();
  for (const auto& c : spec.covariances) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < c.dim(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t col = 0; col < c.dim(); ++col) row.push_back(c(r, col));
      rows.push_back(std::move(row));
    }
    covs.push_back(std::move(rows));
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_manifest: cannot open " + path);
  out << j.dump(2) << "\n";
}

}  // namespace emkm
