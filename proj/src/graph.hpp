#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace flode {

// Arc (src, dst) means "edge directed from src to dst" and is stored in the
// adjacency matrix as a(dst, src) = 1: row index is the receiver. An
// edge-list line "u v" therefore means u -> v. Edges are kept sorted and
// deduplicated; all operations treat graphs as immutable values.
struct DirectedGraph {
  int num_nodes = 0;
  std::vector<std::pair<int, int>> edges;  // (src, dst), sorted, unique
  std::vector<int> labels;                 // empty when absent
  bool directed = true;

  bool has_labels() const { return !labels.empty(); }
  std::size_t num_edges() const { return edges.size(); }
};

struct DegreeInfo {
  std::vector<int> in_degrees;
  std::vector<int> out_degrees;
};

DegreeInfo degrees(const DirectedGraph& g);

// Normalizes the edge set (sort + dedup), validates indices, and sets the
// directed flag from the symmetry of the arc set.
DirectedGraph make_graph(int num_nodes, std::vector<std::pair<int, int>> edges);

// Parses "src<TAB>dst" lines; '#' starts a comment, blank lines are skipped.
// Reports the 1-based line number of the first malformed line. num_nodes is
// inferred as 1 + max index when absent.
DirectedGraph load_edge_list(std::string_view text,
                             std::optional<int> num_nodes = std::nullopt);

std::string to_edge_list(const DirectedGraph& g);

// Generators. Cycles require n >= 3; node n of a cycle connects to n±1 mod N.
DirectedGraph cycle_graph(int n);
DirectedGraph directed_cycle(int n);
DirectedGraph complete_graph(int n);
DirectedGraph erdos_renyi(int n, double p, bool directed, std::uint64_t seed);

DirectedGraph to_undirected(const DirectedGraph& g);
DirectedGraph add_self_loops(const DirectedGraph& g);

enum class ComponentMode { weak, strong };

struct ComponentResult {
  DirectedGraph graph;
  std::vector<int> kept_nodes;  // new index -> original index
};

ComponentResult largest_connected_component(const DirectedGraph& g,
                                            ComponentMode mode);

inline constexpr int kUnreachable = -1;

// D(i, j) = number of hops on a shortest directed path from j to i (the
// orientation that makes (A^m)_{i,j} != 0 require m >= D(i,j)), kUnreachable
// when no such path exists, 0 on the diagonal.
Eigen::MatrixXi shortest_path_distances(const DirectedGraph& g);

bool is_balanced(const DirectedGraph& g);

struct HomophilyResult {
  double value = 0.0;
  int excluded_nodes = 0;  // nodes with no in-neighbors, left out of the mean
};

// Mean over nodes of (same-label in-neighbors) / (in-neighbors); requires
// labels. symmetrized_homophily evaluates the same statistic on the
// symmetrized edge set.
HomophilyResult homophily(const DirectedGraph& g);
HomophilyResult symmetrized_homophily(const DirectedGraph& g);

std::uint64_t graph_hash(const DirectedGraph& g);

}  // namespace flode
