#include <cmath>
#include <filesystem>
#include <fstream>

#include "datasets.hpp"
#include "doctest.h"
#include "error.hpp"

using namespace flode;

TEST_CASE("dsbm generation") {
  DsbmConfig config;
  config.num_nodes = 2500;
  config.num_clusters = 5;
  config.alpha_intra = 0.5;
  config.alpha_inter = 0.1;
  config.beta_param = 0.05;
  config.seed = 7;
  const Dataset ds = dsbm_generate(config);

  SUBCASE("cluster sizes are exact") {
    std::vector<int> counts(5, 0);
    for (int label : ds.labels) ++counts[label];
    for (int c : counts) CHECK(c == 500);
    CHECK(ds.features.rows() == 2500);
    CHECK(ds.features.cols() == 10);
  }
  SUBCASE("edge densities within binomial range") {
    // Undirected pair counts per cluster pair.
    long intra00 = 0, inter01 = 0;
    for (const auto& [u, v] : ds.graph.edges) {
      const int cu = ds.labels[u], cv = ds.labels[v];
      if (cu == 0 && cv == 0) ++intra00;
      if ((cu == 0 && cv == 1) || (cu == 1 && cv == 0)) ++inter01;
    }
    // Each undirected pair produced exactly one arc.
    const double pairs_intra = 500.0 * 499.0 / 2.0;
    const double mean_intra = pairs_intra * 0.5;
    const double sd_intra = std::sqrt(pairs_intra * 0.5 * 0.5);
    CHECK(std::abs(intra00 - mean_intra) < 4.0 * sd_intra);
    const double pairs_inter = 500.0 * 500.0;
    const double mean_inter = pairs_inter * 0.1;
    const double sd_inter = std::sqrt(pairs_inter * 0.1 * 0.9);
    CHECK(std::abs(inter01 - mean_inter) < 4.0 * sd_inter);
  }
  SUBCASE("direction flow matches beta") {
    // For clusters 0 < 1, arcs run 0 -> 1 with probability 1 - beta.
    long low_to_high = 0, high_to_low = 0;
    for (const auto& [u, v] : ds.graph.edges) {
      if (ds.labels[u] == 0 && ds.labels[v] == 1) ++low_to_high;
      if (ds.labels[u] == 1 && ds.labels[v] == 0) ++high_to_low;
    }
    const double total = double(low_to_high + high_to_low);
    const double fraction = low_to_high / total;
    const double sd = std::sqrt(0.05 * 0.95 / total);
    CHECK(std::abs(fraction - 0.95) < 4.0 * sd);
  }
  SUBCASE("symmetric orientation at beta = 1/2") {
    DsbmConfig sym = config;
    sym.beta_param = 0.5;
    sym.seed = 21;
    const Dataset d = dsbm_generate(sym);
    long low_to_high = 0, total = 0;
    for (const auto& [u, v] : d.graph.edges) {
      if (d.labels[u] == d.labels[v]) continue;
      ++total;
      if (d.labels[u] < d.labels[v]) ++low_to_high;
    }
    const double fraction = double(low_to_high) / double(total);
    CHECK(fraction == doctest::Approx(0.5).epsilon(0.04));  // 0.5 +/- 0.02
  }
  SUBCASE("deterministic per seed") {
    const Dataset again = dsbm_generate(config);
    CHECK(again.graph.edges == ds.graph.edges);
    CHECK(again.features == ds.features);
    DsbmConfig other = config;
    other.seed = 8;
    CHECK(dsbm_generate(other).graph.edges != ds.graph.edges);
  }
  SUBCASE("degenerate inter-cluster probability") {
    DsbmConfig isolated = config;
    isolated.num_nodes = 250;
    isolated.alpha_inter = 0.0;
    const Dataset iso = dsbm_generate(isolated);
    for (const auto& [u, v] : iso.graph.edges)
      CHECK(iso.labels[u] == iso.labels[v]);
  }
  SUBCASE("config validation") {
    DsbmConfig bad = config;
    bad.num_nodes = 2501;
    CHECK_THROWS_AS(dsbm_generate(bad), Error);
    bad = config;
    bad.alpha_inter = 1.5;
    CHECK_THROWS_AS(dsbm_generate(bad), Error);
  }
}

TEST_CASE("dsbm splits") {
  std::vector<int> labels(2500);
  for (int i = 0; i < 2500; ++i) labels[i] = i / 500;
  const SplitIndices splits = dsbm_splits(labels, 3);
  CHECK(splits.train.size() == 100);
  CHECK(splits.val.size() == 500);
  CHECK(splits.test.size() == 1900);

  SUBCASE("20 per cluster in train") {
    std::vector<int> counts(5, 0);
    for (int idx : splits.train) ++counts[labels[idx]];
    for (int c : counts) CHECK(c == 20);
  }
  SUBCASE("disjoint cover") {
    std::vector<int> seen(2500, 0);
    for (int idx : splits.train) ++seen[idx];
    for (int idx : splits.val) ++seen[idx];
    for (int idx : splits.test) ++seen[idx];
    for (int s : seen) CHECK(s == 1);
  }
  SUBCASE("seeds differ, reruns agree") {
    const SplitIndices again = dsbm_splits(labels, 3);
    CHECK(again.train == splits.train);
    const SplitIndices other = dsbm_splits(labels, 4);
    CHECK(other.train != splits.train);
  }
  SUBCASE("insufficient nodes rejected") {
    std::vector<int> small(120, 0);
    for (int i = 0; i < 120; ++i) small[i] = i % 5;
    CHECK_THROWS_AS(dsbm_splits(small, 1), Error);
  }
}

TEST_CASE("feature normalization") {
  Eigen::MatrixXd x(3, 2);
  x << 3.0, 4.0, 0.0, 0.0, 1.0, 0.0;

  SUBCASE("row l2") {
    const Eigen::MatrixXd out = normalize_features(x, NormalizeMode::row_l2);
    CHECK(out.row(0).norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(out.row(1).norm() == 0.0);  // zero rows stay zero
    CHECK(out.row(2).norm() == doctest::Approx(1.0));
  }
  SUBCASE("standardize") {
    Eigen::MatrixXd data(4, 2);
    data << 1.0, 5.0, 2.0, 5.0, 3.0, 5.0, 4.0, 5.0;
    const Eigen::MatrixXd out =
        normalize_features(data, NormalizeMode::standardize);
    CHECK(std::abs(out.col(0).mean()) < 1e-10);
    CHECK(out.col(0).squaredNorm() / 4.0 == doctest::Approx(1.0).epsilon(1e-8));
    // Constant columns end up centered at zero.
    CHECK(out.col(1).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("non-finite features rejected") {
    Eigen::MatrixXd bad(1, 1);
    bad << std::nan("");
    CHECK_THROWS_AS(normalize_features(bad, NormalizeMode::row_l2), Error);
  }
}

TEST_CASE("dataset directory round trip") {
  const auto dir =
      std::filesystem::temp_directory_path() / "flode_dataset_test";
  std::filesystem::remove_all(dir);

  DsbmConfig config;
  config.num_nodes = 100;
  config.num_clusters = 5;
  config.seed = 11;
  Dataset ds = dsbm_generate(config);
  ds.splits = dsbm_splits(ds.labels, 2, 4, 20);
  export_dataset(ds, dir);

  const Dataset loaded = load_dataset(dir);
  CHECK(loaded.graph.edges == ds.graph.edges);
  CHECK(loaded.labels == ds.labels);
  CHECK((loaded.features - ds.features).cwiseAbs().maxCoeff() < 1e-12);
  REQUIRE(loaded.splits.has_value());
  CHECK(loaded.splits->train == ds.splits->train);
  CHECK(loaded.splits->test == ds.splits->test);

  SUBCASE("preprocessing chain is recorded") {
    LoadOptions options;
    options.make_undirected = true;
    options.self_loops = true;
    options.normalize = NormalizeMode::row_l2;
    const Dataset processed = load_dataset(dir, options);
    CHECK_FALSE(processed.graph.directed);
    CHECK(processed.graph.num_edges() > loaded.graph.num_edges());
    bool normalized_step = false;
    for (const auto& line : processed.provenance)
      if (line.find("row L2") != std::string::npos) normalized_step = true;
    CHECK(normalized_step);
  }
  SUBCASE("feature row mismatch rejected") {
    const auto broken = dir / "broken";
    std::filesystem::create_directories(broken);
    std::ofstream(broken / "edges.tsv") << "0\t1\n1\t2\n";
    std::ofstream(broken / "features.csv") << "1.0,2.0\n3.0,4.0\n";
    CHECK_THROWS_AS(load_dataset(broken), Error);
  }
  SUBCASE("split index out of range rejected") {
    const auto broken = dir / "broken2";
    std::filesystem::create_directories(broken);
    std::ofstream(broken / "edges.tsv") << "0\t1\n1\t0\n";
    std::ofstream(broken / "splits.json") << "{\"train\": [0, 9]}";
    CHECK_THROWS_AS(load_dataset(broken), Error);
  }
  SUBCASE("missing edges file rejected") {
    CHECK_THROWS_AS(load_dataset(dir / "definitely_missing"), Error);
  }
  SUBCASE("NaN features rejected") {
    const auto broken = dir / "broken3";
    std::filesystem::create_directories(broken);
    std::ofstream(broken / "edges.tsv") << "0\t1\n1\t0\n";
    std::ofstream(broken / "features.csv") << "1.0,nan\n2.0,3.0\n";
    CHECK_THROWS_AS(load_dataset(broken), Error);
  }

  std::filesystem::remove_all(dir);
}

TEST_CASE("largest component remaps everything consistently") {
  const auto dir =
      std::filesystem::temp_directory_path() / "flode_lcc_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  // Triangle 0-1-2 plus isolated pair 3-4.
  std::ofstream(dir / "edges.tsv") << "0\t1\n1\t0\n1\t2\n2\t1\n0\t2\n2\t0\n"
                                   << "3\t4\n4\t3\n";
  std::ofstream(dir / "features.csv")
      << "0.0\n1.0\n2.0\n3.0\n4.0\n";
  std::ofstream(dir / "labels.csv") << "0,0\n1,0\n2,1\n3,1\n4,1\n";
  std::ofstream(dir / "splits.json")
      << "{\"train\": [0, 3], \"val\": [1], \"test\": [2, 4]}";

  LoadOptions options;
  options.largest_component = true;
  const Dataset ds = load_dataset(dir, options);
  CHECK(ds.graph.num_nodes == 3);
  CHECK(ds.features.rows() == 3);
  CHECK(ds.labels == std::vector<int>{0, 0, 1});
  REQUIRE(ds.splits.has_value());
  CHECK(ds.splits->train == std::vector<int>{0});  // node 3 dropped
  CHECK(ds.splits->test == std::vector<int>{2});   // node 4 dropped
  std::filesystem::remove_all(dir);
}
