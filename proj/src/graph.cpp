#include "graph.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <numeric>
#include <sstream>

#include "error.hpp"
#include "rng.hpp"

namespace flode {

namespace {

bool edge_set_symmetric(const std::vector<std::pair<int, int>>& edges) {
  for (const auto& [u, v] : edges) {
    if (u == v) continue;
    if (!std::binary_search(edges.begin(), edges.end(), std::make_pair(v, u)))
      return false;
  }
  return true;
}

std::vector<std::vector<int>> out_neighbors(const DirectedGraph& g) {
  std::vector<std::vector<int>> adj(g.num_nodes);
  for (const auto& [u, v] : g.edges) adj[u].push_back(v);
  return adj;
}

std::vector<std::vector<int>> in_neighbors(const DirectedGraph& g) {
  std::vector<std::vector<int>> adj(g.num_nodes);
  for (const auto& [u, v] : g.edges) adj[v].push_back(u);
  return adj;
}

HomophilyResult homophily_impl(const DirectedGraph& g) {
  if (!g.has_labels())
    fail(ErrorCode::invalid_argument, "homophily requires node labels");
  const auto in_adj = in_neighbors(g);
  double sum = 0.0;
  int counted = 0;
  int excluded = 0;
  for (int i = 0; i < g.num_nodes; ++i) {
    if (in_adj[i].empty()) {
      ++excluded;
      continue;
    }
    int same = 0;
    for (int j : in_adj[i])
      if (g.labels[j] == g.labels[i]) ++same;
    sum += static_cast<double>(same) / static_cast<double>(in_adj[i].size());
    ++counted;
  }
  if (counted == 0)
    fail(ErrorCode::invalid_argument,
         "homophily undefined: every node has zero in-degree");
  return {sum / counted, excluded};
}

}  // namespace

DegreeInfo degrees(const DirectedGraph& g) {
  DegreeInfo d;
  d.in_degrees.assign(g.num_nodes, 0);
  d.out_degrees.assign(g.num_nodes, 0);
  for (const auto& [u, v] : g.edges) {
    ++d.out_degrees[u];
    ++d.in_degrees[v];
  }
  return d;
}

DirectedGraph make_graph(int num_nodes,
                         std::vector<std::pair<int, int>> edges) {
  if (num_nodes < 1)
    fail(ErrorCode::invalid_argument, "graph needs at least one node");
  for (const auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= num_nodes || v >= num_nodes)
      fail(ErrorCode::invalid_argument,
           "edge (" + std::to_string(u) + ", " + std::to_string(v) +
               ") out of range for " + std::to_string(num_nodes) + " nodes");
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  DirectedGraph g;
  g.num_nodes = num_nodes;
  g.edges = std::move(edges);
  g.directed = !edge_set_symmetric(g.edges);
  return g;
}

DirectedGraph load_edge_list(std::string_view text,
                             std::optional<int> num_nodes) {
  std::vector<std::pair<int, int>> edges;
  int max_index = -1;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    int fields[2];
    int nfields = 0;
    std::size_t i = 0;
    bool bad = false;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t' ||
                                 line[i] == '\r'))
        ++i;
      if (i >= line.size()) break;
      std::size_t start = i;
      while (i < line.size() && line[i] != ' ' && line[i] != '\t' &&
             line[i] != '\r')
        ++i;
      if (nfields >= 2) {
        bad = true;
        break;
      }
      int value = 0;
      const auto* first = line.data() + start;
      const auto* last = line.data() + i;
      auto [ptr, ec] = std::from_chars(first, last, value);
      if (ec != std::errc() || ptr != last || value < 0) {
        bad = true;
        break;
      }
      fields[nfields++] = value;
    }
    if (bad || nfields == 1)
      fail(ErrorCode::parse_error,
           "malformed edge-list line " + std::to_string(line_no));
    if (nfields == 0) continue;
    edges.emplace_back(fields[0], fields[1]);
    max_index = std::max({max_index, fields[0], fields[1]});
  }
  const int n = num_nodes.value_or(max_index + 1);
  if (n < 1)
    fail(ErrorCode::invalid_argument, "edge list declares an empty graph");
  if (num_nodes && max_index >= *num_nodes)
    fail(ErrorCode::invalid_argument,
         "edge index " + std::to_string(max_index) +
             " exceeds declared num_nodes " + std::to_string(*num_nodes));
  return make_graph(n, std::move(edges));
}

std::string to_edge_list(const DirectedGraph& g) {
  std::ostringstream out;
  for (const auto& [u, v] : g.edges) out << u << '\t' << v << '\n';
  return out.str();
}

DirectedGraph cycle_graph(int n) {
  if (n < 3) fail(ErrorCode::invalid_argument, "cycle graph requires n >= 3");
  std::vector<std::pair<int, int>> edges;
  edges.reserve(2 * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int next = (i + 1) % n;
    edges.emplace_back(i, next);
    edges.emplace_back(next, i);
  }
  return make_graph(n, std::move(edges));
}

DirectedGraph directed_cycle(int n) {
  if (n < 3) fail(ErrorCode::invalid_argument, "cycle graph requires n >= 3");
  std::vector<std::pair<int, int>> edges;
  edges.reserve(n);
  for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return make_graph(n, std::move(edges));
}

DirectedGraph complete_graph(int n) {
  if (n < 1) fail(ErrorCode::invalid_argument, "complete graph requires n >= 1");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) edges.emplace_back(i, j);
  return make_graph(n, std::move(edges));
}

DirectedGraph erdos_renyi(int n, double p, bool directed,
                          std::uint64_t seed) {
  if (n < 1) fail(ErrorCode::invalid_argument, "erdos_renyi requires n >= 1");
  if (!(p >= 0.0 && p <= 1.0))
    fail(ErrorCode::invalid_argument, "edge probability must be in [0, 1]");
  Rng rng(seed);
  std::vector<std::pair<int, int>> edges;
  if (directed) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && rng.bernoulli(p)) edges.emplace_back(i, j);
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng.bernoulli(p)) {
          edges.emplace_back(i, j);
          edges.emplace_back(j, i);
        }
  }
  return make_graph(n, std::move(edges));
}

DirectedGraph to_undirected(const DirectedGraph& g) {
  std::vector<std::pair<int, int>> edges = g.edges;
  for (const auto& [u, v] : g.edges) edges.emplace_back(v, u);
  DirectedGraph out = make_graph(g.num_nodes, std::move(edges));
  out.labels = g.labels;
  return out;
}

DirectedGraph add_self_loops(const DirectedGraph& g) {
  std::vector<std::pair<int, int>> edges = g.edges;
  for (int i = 0; i < g.num_nodes; ++i) edges.emplace_back(i, i);
  DirectedGraph out = make_graph(g.num_nodes, std::move(edges));
  out.labels = g.labels;
  out.directed = g.directed;
  return out;
}

ComponentResult largest_connected_component(const DirectedGraph& g,
                                            ComponentMode mode) {
  std::vector<int> component(g.num_nodes, -1);
  int num_components = 0;

  if (mode == ComponentMode::weak) {
    std::vector<std::vector<int>> adj(g.num_nodes);
    for (const auto& [u, v] : g.edges) {
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
    for (int s = 0; s < g.num_nodes; ++s) {
      if (component[s] >= 0) continue;
      const int c = num_components++;
      std::deque<int> queue{s};
      component[s] = c;
      while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        for (int v : adj[u])
          if (component[v] < 0) {
            component[v] = c;
            queue.push_back(v);
          }
      }
    }
  } else {
    // Tarjan, iterative.
    const auto adj = out_neighbors(g);
    std::vector<int> index(g.num_nodes, -1), low(g.num_nodes, 0);
    std::vector<bool> on_stack(g.num_nodes, false);
    std::vector<int> stack;
    int next_index = 0;
    struct Frame {
      int node;
      std::size_t child;
    };
    for (int s = 0; s < g.num_nodes; ++s) {
      if (index[s] >= 0) continue;
      std::vector<Frame> frames{{s, 0}};
      index[s] = low[s] = next_index++;
      stack.push_back(s);
      on_stack[s] = true;
      while (!frames.empty()) {
        auto& [u, child] = frames.back();
        if (child < adj[u].size()) {
          const int v = adj[u][child++];
          if (index[v] < 0) {
            index[v] = low[v] = next_index++;
            stack.push_back(v);
            on_stack[v] = true;
            frames.push_back({v, 0});
          } else if (on_stack[v]) {
            low[u] = std::min(low[u], index[v]);
          }
        } else {
          if (low[u] == index[u]) {
            const int c = num_components++;
            while (true) {
              const int w = stack.back();
              stack.pop_back();
              on_stack[w] = false;
              component[w] = c;
              if (w == u) break;
            }
          }
          frames.pop_back();
          if (!frames.empty())
            low[frames.back().node] = std::min(low[frames.back().node], low[u]);
        }
      }
    }
  }

  std::vector<int> sizes(num_components, 0);
  for (int c : component) ++sizes[c];
  const int best =
      static_cast<int>(std::max_element(sizes.begin(), sizes.end()) -
                       sizes.begin());

  std::vector<int> kept;
  std::vector<int> remap(g.num_nodes, -1);
  for (int i = 0; i < g.num_nodes; ++i)
    if (component[i] == best) {
      remap[i] = static_cast<int>(kept.size());
      kept.push_back(i);
    }

  std::vector<std::pair<int, int>> edges;
  for (const auto& [u, v] : g.edges)
    if (remap[u] >= 0 && remap[v] >= 0)
      edges.emplace_back(remap[u], remap[v]);
  DirectedGraph sub = make_graph(static_cast<int>(kept.size()),
                                 std::move(edges));
  if (g.has_labels()) {
    sub.labels.resize(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i)
      sub.labels[i] = g.labels[kept[i]];
  }
  return {std::move(sub), std::move(kept)};
}

Eigen::MatrixXi shortest_path_distances(const DirectedGraph& g) {
  const auto adj = out_neighbors(g);
  Eigen::MatrixXi dist =
      Eigen::MatrixXi::Constant(g.num_nodes, g.num_nodes, kUnreachable);
  std::vector<int> d(g.num_nodes);
  for (int s = 0; s < g.num_nodes; ++s) {
    std::fill(d.begin(), d.end(), kUnreachable);
    d[s] = 0;
    std::deque<int> queue{s};
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int v : adj[u])
        if (d[v] == kUnreachable) {
          d[v] = d[u] + 1;
          queue.push_back(v);
        }
    }
    // Column s holds distances from source s; row = destination node.
    for (int i = 0; i < g.num_nodes; ++i) dist(i, s) = d[i];
  }
  return dist;
}

bool is_balanced(const DirectedGraph& g) {
  const DegreeInfo d = degrees(g);
  for (int i = 0; i < g.num_nodes; ++i)
    if (d.in_degrees[i] != d.out_degrees[i]) return false;
  return true;
}

HomophilyResult homophily(const DirectedGraph& g) { return homophily_impl(g); }

HomophilyResult symmetrized_homophily(const DirectedGraph& g) {
  return homophily_impl(to_undirected(g));
}

std::uint64_t graph_hash(const DirectedGraph& g) {
  // FNV-1a over node count and the sorted arc list.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t x) {
    for (int b = 0; b < 8; ++b) {
      h ^= (x >> (8 * b)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  mix(static_cast<std::uint64_t>(g.num_nodes));
  for (const auto& [u, v] : g.edges) {
    mix(static_cast<std::uint64_t>(u));
    mix(static_cast<std::uint64_t>(v));
  }
  return h;
}

}  // namespace flode
