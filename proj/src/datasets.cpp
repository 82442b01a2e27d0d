#include "datasets.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

#include "error.hpp"
#include "nlohmann/json.hpp"
#include "rng.hpp"

namespace flode {

namespace {

using json = nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io_error, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  return fields;
}

double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() && s.find_first_not_of(" \t\r", used) != std::string::npos)
      fail(ErrorCode::parse_error, where + ": trailing characters in '" + s + "'");
    if (!std::isfinite(v))
      fail(ErrorCode::parse_error, where + ": non-finite value '" + s + "'");
    return v;
  } catch (const std::invalid_argument&) {
    fail(ErrorCode::parse_error, where + ": not a number: '" + s + "'");
  } catch (const std::out_of_range&) {
    fail(ErrorCode::parse_error, where + ": out of range: '" + s + "'");
  }
}

int parse_int(const std::string& s, const std::string& where) {
  int value = 0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first < last && (*first == ' ' || *first == '\t')) ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc())
    fail(ErrorCode::parse_error, where + ": not an integer: '" + s + "'");
  return value;
}

}  // namespace

void DsbmConfig::validate() const {
  if (num_nodes < 1 || num_clusters < 1)
    fail(ErrorCode::invalid_argument, "node/cluster counts must be positive");
  if (num_nodes % num_clusters != 0)
    fail(ErrorCode::invalid_argument,
         "num_nodes must be divisible by num_clusters");
  auto in01 = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!in01(alpha_intra) || !in01(alpha_inter) || !in01(beta_intra) ||
      !in01(beta_param))
    fail(ErrorCode::invalid_argument, "probabilities must lie in [0, 1]");
}

Dataset dsbm_generate(const DsbmConfig& config) {
  config.validate();
  const int n = config.num_nodes;
  const int per_cluster = n / config.num_clusters;

  Dataset ds;
  ds.labels.resize(n);
  for (int i = 0; i < n; ++i) ds.labels[i] = i / per_cluster;

  Rng rng(config.seed);
  Rng edge_rng = rng.fork(1);
  Rng feature_rng = rng.fork(2);

  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n; ++u) {
    const int cu = ds.labels[u];
    for (int v = u + 1; v < n; ++v) {
      const int cv = ds.labels[v];
      const double alpha =
          cu == cv ? config.alpha_intra : config.alpha_inter;
      if (!edge_rng.bernoulli(alpha)) continue;
      // Canonical pair order is lower cluster first (ties by node index, as
      // u < v). beta_param is the probability that the arc runs from the
      // higher cluster to the lower one.
      double p_u_to_v;  // arc u -> v
      if (cu == cv)
        p_u_to_v = config.beta_intra;
      else if (cu < cv)
        p_u_to_v = 1.0 - config.beta_param;
      else
        p_u_to_v = config.beta_param;
      if (edge_rng.bernoulli(p_u_to_v))
        edges.emplace_back(u, v);
      else
        edges.emplace_back(v, u);
    }
  }
  ds.graph = make_graph(n, std::move(edges));
  ds.graph.labels = ds.labels;

  const DegreeInfo deg = degrees(ds.graph);
  Eigen::MatrixXd raw(n, 2);
  for (int i = 0; i < n; ++i) {
    raw(i, 0) = deg.in_degrees[i];
    raw(i, 1) = deg.out_degrees[i];
  }
  const Eigen::MatrixXd deg_features =
      normalize_features(raw, NormalizeMode::standardize);

  constexpr int kNoiseDims = 8;
  ds.features.resize(n, 2 + kNoiseDims);
  ds.features.leftCols(2) = deg_features;
  for (int c = 0; c < kNoiseDims; ++c)
    for (int i = 0; i < n; ++i) ds.features(i, 2 + c) = feature_rng.normal();

  ds.provenance.push_back("dsbm: N=" + std::to_string(n) +
                          " clusters=" + std::to_string(config.num_clusters) +
                          " alpha_intra=" + std::to_string(config.alpha_intra) +
                          " alpha_inter=" + std::to_string(config.alpha_inter) +
                          " beta=" + std::to_string(config.beta_param) +
                          " seed=" + std::to_string(config.seed));
  ds.provenance.push_back(
      "features: standardized (in,out) degree + 8-dim seeded normal noise");
  return ds;
}

SplitIndices dsbm_splits(const std::vector<int>& labels, std::uint64_t seed,
                         int train_per_cluster, int val_total) {
  const int n = static_cast<int>(labels.size());
  const int num_clusters =
      labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  if (n < train_per_cluster * num_clusters + val_total)
    fail(ErrorCode::invalid_argument,
         "not enough nodes for the requested splits");

  Rng rng(seed);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Fisher-Yates with the seeded stream.
  for (int i = n - 1; i > 0; --i)
    std::swap(order[i], order[rng.below(static_cast<std::uint64_t>(i + 1))]);

  SplitIndices splits;
  std::vector<int> taken_per_cluster(num_clusters, 0);
  std::vector<bool> used(n, false);
  for (int idx : order) {
    const int c = labels[idx];
    if (taken_per_cluster[c] < train_per_cluster) {
      splits.train.push_back(idx);
      ++taken_per_cluster[c];
      used[idx] = true;
    }
  }
  int val_taken = 0;
  for (int idx : order) {
    if (used[idx] || val_taken >= val_total) continue;
    splits.val.push_back(idx);
    used[idx] = true;
    ++val_taken;
  }
  for (int idx = 0; idx < n; ++idx)
    if (!used[idx]) splits.test.push_back(idx);
  std::sort(splits.train.begin(), splits.train.end());
  std::sort(splits.val.begin(), splits.val.end());
  return splits;
}

Eigen::MatrixXd normalize_features(const Eigen::MatrixXd& x,
                                   NormalizeMode mode) {
  if (!x.allFinite())
    fail(ErrorCode::invalid_argument, "features contain NaN/Inf");
  Eigen::MatrixXd out = x;
  if (mode == NormalizeMode::row_l2) {
    for (long r = 0; r < out.rows(); ++r) {
      const double norm = out.row(r).norm();
      if (norm > 0.0) out.row(r) /= norm;
    }
    return out;
  }
  for (long c = 0; c < out.cols(); ++c) {
    const double mean = out.col(c).mean();
    out.col(c).array() -= mean;
    const double var = out.col(c).squaredNorm() / double(out.rows());
    if (var > 0.0) out.col(c) /= std::sqrt(var);
  }
  return out;
}

Dataset load_dataset(const std::filesystem::path& dir,
                     const LoadOptions& options) {
  Dataset ds;
  const auto edges_path = dir / "edges.tsv";
  if (!std::filesystem::exists(edges_path))
    fail(ErrorCode::io_error, "missing " + edges_path.string());
  ds.graph = load_edge_list(read_file(edges_path));
  ds.provenance.push_back("edges: " + edges_path.string());

  const auto features_path = dir / "features.csv";
  if (std::filesystem::exists(features_path)) {
    std::istringstream in(read_file(features_path));
    std::vector<std::vector<double>> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line[0] == '#') continue;
      const auto fields = split_csv_line(line);
      std::vector<double> row;
      row.reserve(fields.size());
      for (const auto& f : fields)
        row.push_back(
            parse_double(f, "features.csv line " + std::to_string(line_no)));
      if (!rows.empty() && row.size() != rows.front().size())
        fail(ErrorCode::parse_error,
             "features.csv line " + std::to_string(line_no) +
                 ": inconsistent column count");
      rows.push_back(std::move(row));
    }
    if (static_cast<int>(rows.size()) != ds.graph.num_nodes)
      fail(ErrorCode::dimension_mismatch,
           "features.csv has " + std::to_string(rows.size()) +
               " rows for " + std::to_string(ds.graph.num_nodes) + " nodes");
    ds.features.resize(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < rows[r].size(); ++c)
        ds.features(static_cast<long>(r), static_cast<long>(c)) = rows[r][c];
    ds.provenance.push_back("features: " + features_path.string());
  }

  const auto labels_path = dir / "labels.csv";
  if (std::filesystem::exists(labels_path)) {
    std::istringstream in(read_file(labels_path));
    ds.labels.assign(ds.graph.num_nodes, -1);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line[0] == '#') continue;
      const auto fields = split_csv_line(line);
      if (fields.size() != 2)
        fail(ErrorCode::parse_error,
             "labels.csv line " + std::to_string(line_no) +
                 ": expected node_id,label");
      const std::string where = "labels.csv line " + std::to_string(line_no);
      const int node = parse_int(fields[0], where);
      const int label = parse_int(fields[1], where);
      if (node < 0 || node >= ds.graph.num_nodes)
        fail(ErrorCode::invalid_argument, where + ": node out of range");
      ds.labels[node] = label;
    }
    ds.graph.labels = ds.labels;
    ds.provenance.push_back("labels: " + labels_path.string());
  }

  const auto splits_path = dir / "splits.json";
  if (std::filesystem::exists(splits_path)) {
    json j;
    try {
      j = json::parse(read_file(splits_path));
    } catch (const json::parse_error& e) {
      fail(ErrorCode::parse_error, std::string("splits.json: ") + e.what());
    }
    SplitIndices splits;
    auto read_split = [&](const char* key, std::vector<int>& out) {
      if (!j.contains(key)) return;
      for (const auto& v : j.at(key)) {
        const int idx = v.get<int>();
        if (idx < 0 || idx >= ds.graph.num_nodes)
          fail(ErrorCode::invalid_argument,
               std::string("splits.json: ") + key + " index out of range");
        out.push_back(idx);
      }
    };
    read_split("train", splits.train);
    read_split("val", splits.val);
    read_split("test", splits.test);
    ds.splits = std::move(splits);
    ds.provenance.push_back("splits: " + splits_path.string());
  }

  if (options.largest_component) {
    auto lcc = largest_connected_component(
        ds.graph, options.component_mode);
    std::vector<int> remap(ds.graph.num_nodes, -1);
    for (std::size_t i = 0; i < lcc.kept_nodes.size(); ++i)
      remap[lcc.kept_nodes[i]] = static_cast<int>(i);
    if (ds.features.size() > 0) {
      Eigen::MatrixXd sub(lcc.kept_nodes.size(), ds.features.cols());
      for (std::size_t i = 0; i < lcc.kept_nodes.size(); ++i)
        sub.row(static_cast<long>(i)) = ds.features.row(lcc.kept_nodes[i]);
      ds.features = std::move(sub);
    }
    if (!ds.labels.empty()) ds.labels = lcc.graph.labels;
    if (ds.splits) {
      auto remap_split = [&](std::vector<int>& split) {
        std::vector<int> out;
        for (int idx : split)
          if (remap[idx] >= 0) out.push_back(remap[idx]);
        split = std::move(out);
      };
      remap_split(ds.splits->train);
      remap_split(ds.splits->val);
      remap_split(ds.splits->test);
    }
    ds.graph = std::move(lcc.graph);
    ds.provenance.push_back(
        options.component_mode == ComponentMode::weak
            ? "preprocess: largest weakly connected component"
            : "preprocess: largest strongly connected component");
  }
  if (options.make_undirected) {
    ds.graph = to_undirected(ds.graph);
    ds.provenance.push_back("preprocess: symmetrized edge set");
  }
  if (options.self_loops) {
    ds.graph = add_self_loops(ds.graph);
    ds.provenance.push_back("preprocess: self-loops added");
  }
  if (options.normalize && ds.features.size() > 0) {
    ds.features = normalize_features(ds.features, *options.normalize);
    ds.provenance.push_back(*options.normalize == NormalizeMode::row_l2
                                ? "preprocess: row L2 feature normalization"
                                : "preprocess: feature standardization");
  }
  return ds;
}

void export_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "edges.tsv");
    if (!out) fail(ErrorCode::io_error, "cannot write edges.tsv");
    out << to_edge_list(dataset.graph);
  }
  if (dataset.features.size() > 0) {
    std::ofstream out(dir / "features.csv");
    out.precision(17);
    for (long r = 0; r < dataset.features.rows(); ++r) {
      for (long c = 0; c < dataset.features.cols(); ++c) {
        if (c) out << ',';
        out << dataset.features(r, c);
      }
      out << '\n';
    }
  }
  if (!dataset.labels.empty()) {
    std::ofstream out(dir / "labels.csv");
    for (std::size_t i = 0; i < dataset.labels.size(); ++i)
      out << i << ',' << dataset.labels[i] << '\n';
  }
  if (dataset.splits) {
    json j;
    j["train"] = dataset.splits->train;
    j["val"] = dataset.splits->val;
    j["test"] = dataset.splits->test;
    std::ofstream out(dir / "splits.json");
    out << j.dump(2) << '\n';
  }
}

}  // namespace flode
