#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "graph.hpp"
#include "model.hpp"

namespace flode {

// Directed stochastic block model. alpha_* are undirected edge
// probabilities (alpha_intra on the diagonal, alpha_inter elsewhere);
// beta_* orient each sampled edge. For clusters i > j the edge points
// from the higher cluster to the lower with probability beta_param, so
// beta_{i,j} + beta_{j,i} = 1 holds by construction; ties within a cluster
// use beta_intra = 1/2.
struct DsbmConfig {
  int num_nodes = 2500;
  int num_clusters = 5;
  double alpha_intra = 0.5;
  double alpha_inter = 0.1;
  double beta_intra = 0.5;
  double beta_param = 0.05;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Dataset {
  DirectedGraph graph;
  Eigen::MatrixXd features;
  std::vector<int> labels;
  std::optional<SplitIndices> splits;
  std::vector<std::string> provenance;
};

// Nodes come in equal-size contiguous clusters. Features are the
// standardized (in-degree, out-degree) pair concatenated with an 8-dim
// seeded normal vector (the generator does not prescribe node features;
// degrees carry the directional signal, the noise breaks symmetry).
Dataset dsbm_generate(const DsbmConfig& config);

// 20 training nodes per cluster, 500 validation nodes, rest test; uniform
// draws without replacement, deterministic per seed.
SplitIndices dsbm_splits(const std::vector<int>& labels, std::uint64_t seed,
                         int train_per_cluster = 20, int val_total = 500);

enum class NormalizeMode { row_l2, standardize };

Eigen::MatrixXd normalize_features(const Eigen::MatrixXd& x, NormalizeMode mode);

struct LoadOptions {
  bool largest_component = false;
  ComponentMode component_mode = ComponentMode::weak;
  bool make_undirected = false;
  bool self_loops = false;
  std::optional<NormalizeMode> normalize;
};

// Reads edges.tsv (required) plus optional features.csv, labels.csv and
// splits.json, then applies the preprocessing chain LCC -> undirected ->
// self-loops -> normalization, recording each applied step.
Dataset load_dataset(const std::filesystem::path& dir,
                     const LoadOptions& options = {});

// Writes the same layout load_dataset reads.
void export_dataset(const Dataset& dataset, const std::filesystem::path& dir);

}  // namespace flode
