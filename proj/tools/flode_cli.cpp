// Batch front end for the flode shared library. Wires graphs, spectra,
// dynamics and training into reproducible experiments with CSV/JSON outputs.
// Talks to the core exclusively through the C API in flode/flode.h.
//
// Exit codes: 0 success, 1 verification failure, 2 usage error,
// 3 numerical failure.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "flode/flode.h"
#include "nlohmann/json.hpp"

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

struct CliError {
  int code;
  std::string message;
};

[[noreturn]] void die(int code, const std::string& message) {
  throw CliError{code, message};
}

void check(flode_status status, const std::string& what) {
  if (status == FLODE_OK) return;
  const int code = status == FLODE_ERR_NUMERIC ? kExitNumeric : kExitUsage;
  die(code, what + ": " + flode_last_error());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) die(kExitUsage, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(value));
  return buf;
}

// Every output file gets a sidecar with the resolved-spec hash, the library
// version and the wall time that produced it.
class OutputWriter {
 public:
  OutputWriter(fs::path dir, std::string spec_hash)
      : dir_(std::move(dir)), spec_hash_(std::move(spec_hash)) {
    fs::create_directories(dir_);
    start_ = std::chrono::steady_clock::now();
  }

  fs::path write(const std::string& name, const std::string& content) {
    const fs::path path = dir_ / name;
    {
      std::ofstream out(path, std::ios::binary);
      if (!out) die(kExitUsage, "cannot write " + path.string());
      out << content;
    }
    json sidecar;
    sidecar["spec_hash"] = spec_hash_;
    sidecar["artifact_version"] = flode_version();
    sidecar["wall_seconds"] = std::chrono::duration<double>(
                                  std::chrono::steady_clock::now() - start_)
                                  .count();
    std::ofstream side(path.string() + ".provenance.json");
    side << sidecar.dump(2) << '\n';
    return path;
  }

  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::string spec_hash_;
  std::chrono::steady_clock::time_point start_;
};

// Index-ordered worker pool: workers pull configuration indices, results land
// in a pre-sized vector, the caller (single writer) consumes them in order.
template <typename Result, typename Fn>
std::vector<Result> run_pool(int jobs, int count, Fn&& fn) {
  std::vector<Result> results(count);
  std::vector<std::string> errors(count);
  std::atomic<int> next{0};
  auto worker = [&] {
    while (true) {
      const int idx = next.fetch_add(1);
      if (idx >= count) break;
      try {
        results[idx] = fn(idx);
      } catch (const CliError& e) {
        errors[idx] = e.message;
      }
    }
  };
  jobs = std::max(1, jobs);
  std::vector<std::thread> threads;
  for (int t = 0; t < jobs - 1; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  for (int i = 0; i < count; ++i)
    if (!errors[i].empty()) die(kExitNumeric, errors[i]);
  return results;
}

struct GraphHandle {
  flode_graph* ptr = nullptr;
  ~GraphHandle() { flode_graph_free(ptr); }
};

// Graph source: {"kind": "cycle"|"directed_cycle"|"complete"|"erdos_renyi"|
// "file", plus kind-specific fields}.
flode_graph* make_graph(const json& spec) {
  const std::string kind = spec.value("kind", "file");
  flode_graph* g = nullptr;
  if (kind == "cycle") {
    check(flode_graph_cycle(spec.at("n").get<int>(), &g), "cycle graph");
  } else if (kind == "directed_cycle") {
    check(flode_graph_directed_cycle(spec.at("n").get<int>(), &g),
          "directed cycle");
  } else if (kind == "complete") {
    check(flode_graph_complete(spec.at("n").get<int>(), &g), "complete graph");
  } else if (kind == "erdos_renyi") {
    check(flode_graph_erdos_renyi(
              spec.at("n").get<int>(), spec.at("p").get<double>(),
              spec.value("directed", true) ? 1 : 0,
              spec.value("seed", std::uint64_t{0}), &g),
          "random graph");
  } else if (kind == "file") {
    check(flode_graph_load_file(spec.at("path").get<std::string>().c_str(),
                                spec.value("num_nodes", -1), &g),
          "edge list");
  } else {
    die(kExitUsage, "unknown graph kind: " + kind);
  }
  return g;
}

flode_degree_policy policy_from(const std::string& name) {
  if (name == "error") return FLODE_DEGREE_ERROR;
  if (name == "pseudo_inverse") return FLODE_DEGREE_PSEUDO_INVERSE;
  if (name == "self_loop") return FLODE_DEGREE_SELF_LOOP;
  die(kExitUsage, "unknown degree policy: " + name);
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::istringstream in(text);
  std::string token;
  while (std::getline(in, token, ','))
    if (!token.empty()) seeds.push_back(std::stoull(token));
  if (seeds.empty()) die(kExitUsage, "empty seed list");
  return seeds;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

json dominance_json(const flode_dominance& d) {
  json j;
  j["regime"] = d.regime == FLODE_REGIME_HFD
                    ? "HFD"
                    : (d.regime == FLODE_REGIME_LFD ? "LFD" : "lambda_FD");
  j["limit_lambda"] = d.limit_lambda;
  j["predicted_limit"] = d.predicted_limit;
  j["lhs"] = d.lhs;
  j["rhs"] = d.rhs;
  j["margin"] = d.margin;
  j["condition_met"] = d.condition_met != 0;
  j["indeterminate"] = d.indeterminate != 0;
  j["lambda1_unique"] = d.lambda1_unique != 0;
  j["lambda1_re"] = d.lambda1_re;
  j["lambdaN_re"] = d.lambdaN_re;
  if (std::isfinite(d.lambda_plus)) j["lambda_plus"] = d.lambda_plus;
  if (std::isfinite(d.lambda_minus)) j["lambda_minus"] = d.lambda_minus;
  j["w_low"] = d.w_low;
  j["w_high"] = d.w_high;
  return j;
}

/* ------------------------------------------------------------------ */

int cmd_analyze(const std::string& config_text, const std::string& out_dir,
                int svd_rank) {
  const json config = json::parse(config_text);
  OutputWriter writer(out_dir, hex64(fnv1a(config.dump())));

  GraphHandle g{make_graph(config.at("graph"))};
  if (config.contains("labels_file")) {
    const std::string text =
        read_file(config.at("labels_file").get<std::string>());
    std::vector<int> labels(flode_graph_num_nodes(g.ptr), 0);
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos)
        die(kExitUsage, "labels file: expected node_id,label");
      labels.at(std::stoul(line.substr(0, comma))) =
          std::stoi(line.substr(comma + 1));
    }
    check(flode_graph_set_labels(g.ptr, labels.data(),
                                 static_cast<int>(labels.size())),
          "labels");
  }

  json report;
  report["num_nodes"] = flode_graph_num_nodes(g.ptr);
  report["num_edges"] = flode_graph_num_edges(g.ptr);
  report["directed"] = flode_graph_is_directed(g.ptr) != 0;
  report["balanced"] = flode_graph_is_balanced(g.ptr) != 0;

  if (flode_graph_has_labels(g.ptr)) {
    double value = 0.0;
    int excluded = 0;
    check(flode_graph_homophily(g.ptr, 0, &value, &excluded), "homophily");
    report["homophily_directed"] = value;
    report["homophily_excluded_nodes"] = excluded;
    check(flode_graph_homophily(g.ptr, 1, &value, &excluded), "homophily");
    report["homophily_symmetrized"] = value;
  } else {
    report["homophily"] = "undefined (no labels)";
  }

  const flode_degree_policy policy =
      policy_from(config.value("policy", "pseudo_inverse"));
  flode_sna* sna = nullptr;
  check(flode_sna_build(g.ptr, policy, &sna), "SNA");

  double gap = 0.0, defect = 0.0;
  check(flode_sna_weak_balance_gap(sna, &gap), "weak balance gap");
  check(flode_sna_normality_defect(sna, &defect), "normality defect");
  report["weak_balance_gap"] = gap;
  report["weakly_balanced"] = gap < 1e-8;
  report["normality_defect"] = defect;

  flode_spectrum* spectrum = nullptr;
  check(flode_sna_spectrum(sna, &spectrum), "spectrum");
  double re = 0.0, im = 0.0;
  check(flode_spectrum_eigenvalue(spectrum, 0, &re, &im), "eigenvalue");
  report["lambda_min_re"] = re;
  report["lambda_min_im"] = im;
  check(flode_spectrum_eigenvalue(spectrum,
                                  flode_spectrum_size(spectrum) - 1, &re, &im),
        "eigenvalue");
  report["lambda_max_re"] = re;
  report["lambda_max_im"] = im;

  flode_factors* factors = nullptr;
  const int n = flode_sna_num_nodes(sna);
  if (svd_rank > 0 && svd_rank < n) {
    check(flode_svd_truncated(sna, svd_rank, 0, &factors), "SVD");
  } else {
    check(flode_svd_full(sna, &factors), "SVD");
  }
  std::vector<double> sigma(flode_factors_rank(factors));
  check(flode_factors_singular_values(factors, sigma.data()), "sigma");
  report["sigma1"] = sigma.empty() ? 0.0 : sigma[0];

  flode_factors_free(factors);
  flode_spectrum_free(spectrum);
  flode_sna_free(sna);

  const auto path = writer.write("analyze.json", report.dump(2) + "\n");
  std::cout << report.dump(2) << "\n";
  std::cerr << "report written to " << path << "\n";
  return kExitOk;
}

/* ------------------------------------------------------------------ */

struct EvolveOutcome {
  json summary;
  std::string trajectory_csv;
  std::string file_stem;
};

int cmd_evolve(const std::string& config_text, const std::string& out_dir,
               int jobs, int svd_rank, const std::string& scheme_flag,
               const std::string& sign_flag) {
  json config = json::parse(config_text);
  if (!scheme_flag.empty()) config["scheme"] = scheme_flag;
  if (!sign_flag.empty()) config["sign"] = sign_flag;
  const std::string resolved = config.dump();
  OutputWriter writer(out_dir, hex64(fnv1a(resolved)));

  GraphHandle g{make_graph(config.at("graph"))};
  flode_sna* sna = nullptr;
  check(flode_sna_build(g.ptr,
                        policy_from(config.value("policy", "pseudo_inverse")),
                        &sna),
        "SNA");
  flode_spectrum* spectrum = nullptr;
  check(flode_sna_spectrum(sna, &spectrum), "spectrum");
  flode_factors* factors = nullptr;
  const int n = flode_sna_num_nodes(sna);
  if (svd_rank > 0 && svd_rank < n) {
    check(flode_svd_truncated(sna, svd_rank, 0, &factors), "SVD");
  } else {
    check(flode_svd_full(sna, &factors), "SVD");
  }

  const flode_scheme scheme = config.value("scheme", "heat") == "schrodinger"
                                  ? FLODE_SCHEME_SCHRODINGER
                                  : FLODE_SCHEME_HEAT;
  const flode_sign sign = config.value("sign", "minus") == "plus"
                              ? FLODE_SIGN_PLUS
                              : FLODE_SIGN_MINUS;
  const flode_graph_class graph_class =
      config.value("graph_class", "undirected_or_normal") == "directed_alpha1"
          ? FLODE_CLASS_DIRECTED_ALPHA1
          : FLODE_CLASS_UNDIRECTED_OR_NORMAL;

  const std::vector<double> alphas =
      config.value("alphas", std::vector<double>{1.0});
  const std::vector<std::uint64_t> w_seeds =
      config.value("w_seeds", std::vector<std::uint64_t>{1});
  const int channels = config.value("channels", 2);
  const std::int64_t steps = config.value("steps", std::int64_t{20000});
  const std::int64_t record_every =
      config.value("record_every", std::int64_t{50});
  const double h_override = config.value("h", 0.0);
  const double w_scale = config.value("w_scale", 1.5);

  struct Task {
    double alpha;
    std::uint64_t w_seed;
  };
  std::vector<Task> tasks;
  for (double alpha : alphas)
    for (std::uint64_t seed : w_seeds) tasks.push_back({alpha, seed});

  auto outcomes = run_pool<EvolveOutcome>(
      jobs, static_cast<int>(tasks.size()), [&](int idx) {
        const Task& task = tasks[idx];
        EvolveOutcome outcome;

        std::vector<double> w_re(channels), w_im(channels, 0.0);
        check(flode_seeded_uniform(task.w_seed, channels, -w_scale, w_scale,
                                   w_re.data()),
              "W draw");
        if (scheme == FLODE_SCHEME_SCHRODINGER)
          check(flode_seeded_uniform(task.w_seed ^ 0xabcdef, channels,
                                     -w_scale, w_scale, w_im.data()),
                "W draw");

        flode_dominance prediction;
        check(flode_predict_dominance(
                  spectrum, w_re.data(),
                  scheme == FLODE_SCHEME_SCHRODINGER ? w_im.data() : nullptr,
                  channels, scheme, task.alpha, graph_class, sign, &prediction),
              "dominance prediction");

        double max_h = 0.0;
        int unbounded = 0, degenerate = 0;
        double epsilon = 0.0;
        check(flode_step_size_guard(
                  spectrum, w_re.data(),
                  scheme == FLODE_SCHEME_SCHRODINGER ? w_im.data() : nullptr,
                  channels, scheme, task.alpha, sign, &max_h, &unbounded,
                  &degenerate, &epsilon),
              "step guard");
        const double h =
            h_override > 0.0
                ? h_override
                : (unbounded || !(max_h > 0.0) ? 0.1 : 0.45 * max_h);

        flode_operator* op = nullptr;
        check(flode_operator_create(factors, task.alpha, &op), "operator");

        std::vector<double> x0(static_cast<std::size_t>(n) * channels);
        check(flode_seeded_normals(task.w_seed ^ 0x515151, n * channels,
                                   x0.data()),
              "x0 draw");
        flode_trajectory* traj = nullptr;
        const flode_status evolve_status = flode_evolve(
            sna, op, w_re.data(),
            scheme == FLODE_SCHEME_SCHRODINGER ? w_im.data() : nullptr,
            channels, scheme, sign, x0.data(), nullptr, n, channels, h, steps,
            record_every, 1, &traj);
        flode_operator_free(op);
        check(evolve_status, "evolve");

        flode_verdict verdict = FLODE_VERDICT_UNDECIDED;
        check(flode_classify_trajectory(traj, &prediction, 1e-3, &verdict),
              "classification");

        std::ostringstream csv;
        csv << "step,h,raw_energy,normalized_energy,feature_norm\n";
        const std::int64_t records = flode_trajectory_num_records(traj);
        for (std::int64_t i = 0; i < records; ++i) {
          std::int64_t step = 0;
          double raw = 0.0, normalized = 0.0, fnorm = 0.0;
          check(flode_trajectory_record(traj, i, &step, &raw, &normalized,
                                        &fnorm),
                "record");
          csv << step << ',' << format_double(h) << ',' << format_double(raw)
              << ',' << format_double(normalized) << ','
              << format_double(fnorm) << '\n';
        }
        flode_trajectory_free(traj);

        json summary;
        summary["alpha"] = task.alpha;
        summary["w_seed"] = task.w_seed;
        summary["h"] = h;
        summary["steps"] = steps;
        summary["prediction"] = dominance_json(prediction);
        summary["verdict"] = verdict == FLODE_VERDICT_CONFIRMED
                                 ? "confirmed"
                                 : (verdict == FLODE_VERDICT_REFUTED
                                        ? "refuted"
                                        : "undecided");

        std::ostringstream stem;
        stem << "evolve_" << idx << "_"
             << hex64(fnv1a(resolved + std::to_string(idx)));
        outcome.file_stem = stem.str();
        outcome.summary = std::move(summary);
        outcome.trajectory_csv = csv.str();
        return outcome;
      });

  json index = json::array();
  for (const auto& outcome : outcomes) {
    writer.write(outcome.file_stem + ".csv", outcome.trajectory_csv);
    writer.write(outcome.file_stem + ".json", outcome.summary.dump(2) + "\n");
    json entry = outcome.summary;
    entry["trajectory"] = outcome.file_stem + ".csv";
    index.push_back(entry);
  }
  writer.write("evolve_index.json", index.dump(2) + "\n");

  flode_factors_free(factors);
  flode_spectrum_free(spectrum);
  flode_sna_free(sna);
  std::cout << index.dump(2) << "\n";
  return kExitOk;
}

/* ------------------------------------------------------------------ */

int cmd_verify(const std::string& suites, std::uint64_t seed,
               bool inject_fault, const std::string& out_dir) {
  char* results_json = nullptr;
  int all_passed = 0;
  check(flode_verify_run(suites.c_str(), seed, inject_fault ? 1 : 0,
                         &results_json, &all_passed),
        "verification");
  const std::string results = results_json;
  flode_string_free(results_json);

  const json parsed = json::parse(results);
  for (const auto& entry : parsed) {
    std::cout << (entry.at("passed").get<bool>() ? "[PASS] " : "[FAIL] ")
              << entry.at("name").get<std::string>() << "  ("
              << entry.at("detail").get<std::string>() << ")\n";
  }
  if (!out_dir.empty()) {
    OutputWriter writer(out_dir, hex64(fnv1a(suites)));
    writer.write("verify.json", results + "\n");
  }
  return all_passed ? kExitOk : kExitVerifyFailure;
}

/* ------------------------------------------------------------------ */

struct DsbmRun {
  double accuracy = 0.0;
};

int cmd_dsbm(const std::string& experiment, const std::string& seeds_text,
             const std::string& config_text, const std::string& out_dir,
             int jobs, int svd_rank) {
  json config =
      config_text.empty() ? json::object() : json::parse(config_text);
  const std::vector<std::uint64_t> seeds = parse_seeds(seeds_text);

  std::vector<double> grid;
  if (experiment == "density_sweep")
    grid = config.value("alpha_grid", std::vector<double>{0.1, 0.08, 0.05});
  else if (experiment == "flow_sweep")
    grid = config.value("beta_grid", std::vector<double>{0.05, 0.1, 0.15, 0.2,
                                                         0.25, 0.3, 0.35, 0.4});
  else
    die(kExitUsage, "experiment must be density_sweep or flow_sweep");

  json model_config = config.value("model", json::object());
  if (!model_config.contains("hidden_channels"))
    model_config["hidden_channels"] = 16;
  if (!model_config.contains("num_layers")) model_config["num_layers"] = 2;
  if (!model_config.contains("learning_rate"))
    model_config["learning_rate"] = 5e-3;
  if (!model_config.contains("weight_decay"))
    model_config["weight_decay"] = 1e-3;
  if (!model_config.contains("input_dropout"))
    model_config["input_dropout"] = 0.1;
  if (!model_config.contains("decoder_dropout"))
    model_config["decoder_dropout"] = 0.1;
  if (!model_config.contains("max_epochs")) model_config["max_epochs"] = 1000;
  if (!model_config.contains("patience")) model_config["patience"] = 200;

  json resolved = config;
  resolved["experiment"] = experiment;
  resolved["grid"] = grid;
  resolved["model"] = model_config;
  OutputWriter writer(out_dir, hex64(fnv1a(resolved.dump())));

  const int rank = svd_rank > 0 ? svd_rank : 64;
  const int num_nodes = config.value("num_nodes", 2500);

  struct Task {
    double param;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (double param : grid)
    for (std::uint64_t seed : seeds) tasks.push_back({param, seed});

  auto runs = run_pool<DsbmRun>(
      jobs, static_cast<int>(tasks.size()), [&](int idx) {
        const Task& task = tasks[idx];
        flode_dsbm_config dsbm;
        dsbm.num_nodes = num_nodes;
        dsbm.num_clusters = config.value("num_clusters", 5);
        dsbm.alpha_intra = 0.5;
        dsbm.beta_intra = 0.5;
        if (experiment == "density_sweep") {
          dsbm.alpha_inter = task.param;
          dsbm.beta_param = 0.05;
        } else {
          dsbm.alpha_inter = 0.1;
          dsbm.beta_param = task.param;
        }
        dsbm.seed = task.seed;

        flode_dataset* ds = nullptr;
        check(flode_dsbm_generate(&dsbm, &ds), "DSBM generation");
        check(flode_dataset_make_splits(ds, task.seed ^ 0x5eed), "splits");

        flode_graph* graph = nullptr;
        check(flode_dataset_graph(ds, &graph), "dataset graph");
        flode_sna* sna = nullptr;
        check(flode_sna_build(graph, FLODE_DEGREE_PSEUDO_INVERSE, &sna), "SNA");
        flode_factors* factors = nullptr;
        check(flode_svd_truncated(sna, rank, task.seed ^ 0x51d, &factors),
              "truncated SVD");

        json mc = model_config;
        mc["seed"] = task.seed;
        flode_model* model = nullptr;
        check(flode_model_create(mc.dump().c_str(), factors,
                                 flode_dataset_feature_dim(ds),
                                 flode_dataset_num_classes(ds), task.seed,
                                 &model),
              "model");
        double best_val = 0.0, test_acc = 0.0;
        check(flode_model_train(model, ds, nullptr, &best_val, &test_acc),
              "training");

        flode_model_free(model);
        flode_factors_free(factors);
        flode_sna_free(sna);
        flode_graph_free(graph);
        flode_dataset_free(ds);
        return DsbmRun{test_acc};
      });

  std::ostringstream csv;
  csv << (experiment == "density_sweep" ? "alpha_star" : "beta_star")
      << ",mean_accuracy,stderr,num_seeds";
  for (std::size_t s = 0; s < seeds.size(); ++s) csv << ",acc_seed" << s;
  csv << "\n";
  json table = json::array();
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    double sum = 0.0, sumsq = 0.0;
    std::vector<double> accs;
    for (std::size_t si = 0; si < seeds.size(); ++si) {
      const double acc = runs[gi * seeds.size() + si].accuracy;
      accs.push_back(acc);
      sum += acc;
      sumsq += acc * acc;
    }
    const double mean = sum / double(seeds.size());
    const double var =
        seeds.size() > 1
            ? std::max(0.0, (sumsq - double(seeds.size()) * mean * mean) /
                                (double(seeds.size()) - 1.0))
            : 0.0;
    const double stderr_mean = std::sqrt(var / double(seeds.size()));
    csv << format_double(grid[gi]) << ',' << format_double(mean) << ','
        << format_double(stderr_mean) << ',' << seeds.size();
    for (double acc : accs) csv << ',' << format_double(acc);
    csv << '\n';
    json row;
    row["param"] = grid[gi];
    row["mean_accuracy"] = mean;
    row["stderr"] = stderr_mean;
    row["accuracies"] = accs;
    table.push_back(row);
  }
  writer.write("dsbm_" + experiment + ".csv", csv.str());
  writer.write("dsbm_" + experiment + ".json", table.dump(2) + "\n");
  std::cout << csv.str();
  return kExitOk;
}

/* ------------------------------------------------------------------ */

int cmd_train(const std::string& data_dir, const std::string& config_text,
              const std::string& options_json, const std::string& out_dir,
              int svd_rank, std::uint64_t seed) {
  const json model_config =
      config_text.empty() ? json::object() : json::parse(config_text);
  json resolved;
  resolved["data"] = data_dir;
  resolved["model"] = model_config;
  resolved["options"] = options_json;
  resolved["seed"] = seed;
  OutputWriter writer(out_dir, hex64(fnv1a(resolved.dump())));

  flode_dataset* ds = nullptr;
  check(flode_dataset_load(
            data_dir.c_str(),
            options_json.empty() ? nullptr : options_json.c_str(), &ds),
        "dataset");
  int count = 0;
  if (flode_dataset_split(ds, 0, nullptr, &count) != FLODE_OK)
    check(flode_dataset_make_splits(ds, seed), "splits");

  flode_graph* graph = nullptr;
  check(flode_dataset_graph(ds, &graph), "dataset graph");
  flode_sna* sna = nullptr;
  check(flode_sna_build(graph, FLODE_DEGREE_PSEUDO_INVERSE, &sna), "SNA");
  flode_factors* factors = nullptr;
  const int n = flode_sna_num_nodes(sna);
  if (svd_rank > 0 && svd_rank < n) {
    check(flode_svd_truncated(sna, svd_rank, seed, &factors), "SVD");
  } else {
    check(flode_svd_full(sna, &factors), "SVD");
  }

  json mc = model_config;
  mc["seed"] = seed;
  flode_model* model = nullptr;
  check(flode_model_create(mc.dump().c_str(), factors,
                           flode_dataset_feature_dim(ds),
                           flode_dataset_num_classes(ds), seed, &model),
        "model");

  char* history_csv = nullptr;
  double best_val = 0.0, test_acc = 0.0;
  check(flode_model_train(model, ds, &history_csv, &best_val, &test_acc),
        "training");
  writer.write("history.csv", history_csv);
  flode_string_free(history_csv);

  const fs::path checkpoint = writer.dir() / "model.ckpt";
  check(flode_model_save(model, checkpoint.string().c_str()), "checkpoint");

  flode_spectrum* spectrum = nullptr;
  check(flode_sna_spectrum(sna, &spectrum), "spectrum");
  flode_dominance audit;
  json report;
  if (flode_model_dominance_audit(model, spectrum, &audit) == FLODE_OK) {
    report["dominance_audit"] = dominance_json(audit);
  } else {
    report["dominance_audit"] = nullptr;
    report["dominance_audit_error"] = flode_last_error();
  }
  char* provenance = nullptr;
  check(flode_dataset_provenance(ds, &provenance), "provenance");
  report["preprocessing"] = provenance;
  flode_string_free(provenance);
  char* params = nullptr;
  check(flode_model_params_json(model, &params), "parameters");
  report["learned_parameters"] = json::parse(params);
  flode_string_free(params);
  report["best_val_accuracy"] = best_val;
  report["test_accuracy"] = test_acc;
  writer.write("train_report.json", report.dump(2) + "\n");
  std::cout << report.dump(2) << "\n";

  flode_spectrum_free(spectrum);
  flode_model_free(model);
  flode_factors_free(factors);
  flode_sna_free(sna);
  flode_graph_free(graph);
  flode_dataset_free(ds);
  return kExitOk;
}

/* ------------------------------------------------------------------ */

int cmd_gradcheck(const std::string& config_text, std::uint64_t seed) {
  const json config =
      config_text.empty() ? json::object() : json::parse(config_text);

  flode_dsbm_config dsbm;
  dsbm.num_nodes = config.value("num_nodes", 30);
  dsbm.num_clusters = config.value("num_clusters", 3);
  dsbm.alpha_intra = 0.5;
  dsbm.alpha_inter = 0.2;
  dsbm.beta_intra = 0.5;
  dsbm.beta_param = 0.1;
  dsbm.seed = seed;
  flode_dataset* ds = nullptr;
  check(flode_dsbm_generate(&dsbm, &ds), "instance");

  flode_graph* graph = nullptr;
  check(flode_dataset_graph(ds, &graph), "graph");
  flode_sna* sna = nullptr;
  check(flode_sna_build(graph, FLODE_DEGREE_PSEUDO_INVERSE, &sna), "SNA");
  flode_factors* factors = nullptr;
  check(flode_svd_full(sna, &factors), "SVD");

  double worst = 0.0;
  for (const char* scheme : {"heat", "schrodinger"}) {
    json mc = config.value("model", json::object());
    if (!mc.contains("hidden_channels")) mc["hidden_channels"] = 4;
    if (!mc.contains("num_layers")) mc["num_layers"] = 2;
    mc["scheme"] = scheme;
    flode_model* model = nullptr;
    check(flode_model_create(mc.dump().c_str(), factors,
                             flode_dataset_feature_dim(ds),
                             flode_dataset_num_classes(ds), seed, &model),
          "model");
    double err = 0.0;
    check(flode_model_gradient_check(model, ds, &err), "gradient check");
    std::cout << scheme << ": max relative gradient error " << err << "\n";
    worst = std::max(worst, err);
    flode_model_free(model);
  }

  flode_factors_free(factors);
  flode_sna_free(sna);
  flode_graph_free(graph);
  flode_dataset_free(ds);

  std::cout << "worst: " << worst << (worst < 1e-5 ? "  (ok)" : "  (FAIL)")
            << "\n";
  return worst < 1e-5 ? kExitOk : kExitVerifyFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fractional graph Laplacian ODE laboratory"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", seeds_text = "0";
  int jobs = 1, svd_rank = 0;
  std::string scheme_flag, sign_flag;
  app.add_option("--config", config_path, "JSON experiment configuration");
  app.add_option("--seed", seeds_text, "comma-separated seed list");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--jobs", jobs, "worker pool size for sweeps");
  app.add_option("--svd-rank", svd_rank,
                 "truncated-SVD rank (0 selects the full SVD)");
  app.add_option("--scheme", scheme_flag, "heat or schrodinger")
      ->check(CLI::IsMember({"heat", "schrodinger", ""}));
  app.add_option("--sign", sign_flag, "plus or minus (Schrodinger unit)")
      ->check(CLI::IsMember({"plus", "minus", ""}));

  app.fallthrough();
  auto* analyze = app.add_subcommand("analyze", "graph and spectrum report");
  analyze->fallthrough();
  auto* evolve = app.add_subcommand(
      "evolve", "Dirichlet-energy trajectories and dominance verdicts");
  evolve->fallthrough();
  auto* verify = app.add_subcommand("verify", "run verification suites");
  verify->fallthrough();
  std::string suites = "all";
  bool inject_fault = false;
  verify->add_option("--suite", suites, "comma-separated suite selector");
  verify->add_flag("--inject-fault", inject_fault,
                   "perturb one SNA entry inside the checks (sensitivity)");
  auto* dsbm = app.add_subcommand("dsbm", "synthetic block-model experiments");
  dsbm->fallthrough();
  std::string experiment = "density_sweep";
  dsbm->add_option("--experiment", experiment,
                   "density_sweep or flow_sweep");
  auto* train = app.add_subcommand("train", "train on a dataset directory");
  train->fallthrough();
  std::string data_dir, load_options;
  train->add_option("--data", data_dir, "dataset directory")->required();
  train->add_option("--load-options", load_options,
                    "JSON preprocessing options for the loader");
  auto* gradcheck = app.add_subcommand(
      "gradcheck", "finite-difference audit of the model gradients");
  gradcheck->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    const std::string config_text =
        config_path.empty() ? std::string() : read_file(config_path);
    const std::vector<std::uint64_t> seeds = parse_seeds(seeds_text);

    if (analyze->parsed()) {
      if (config_text.empty()) die(kExitUsage, "analyze needs --config");
      return cmd_analyze(config_text, out_dir, svd_rank);
    }
    if (evolve->parsed()) {
      if (config_text.empty()) die(kExitUsage, "evolve needs --config");
      return cmd_evolve(config_text, out_dir, jobs, svd_rank, scheme_flag,
                        sign_flag);
    }
    if (verify->parsed())
      return cmd_verify(suites, seeds.front(), inject_fault, out_dir);
    if (dsbm->parsed())
      return cmd_dsbm(experiment, seeds_text, config_text, out_dir, jobs,
                      svd_rank);
    if (train->parsed())
      return cmd_train(data_dir, config_text, load_options, out_dir, svd_rank,
                       seeds.front());
    if (gradcheck->parsed()) return cmd_gradcheck(config_text, seeds.front());
    die(kExitUsage, "no subcommand selected");
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}
