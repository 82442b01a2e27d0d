/* flode — fractional graph Laplacian neural ODE laboratory.
 *
 * C interface to the shared library. Every object is an opaque handle
 * created by a flode_*_create/load function and released by the matching
 * flode_*_free. Functions return FLODE_OK on success; on failure they
 * return an error code and flode_last_error() describes the problem
 * (thread-local). Strings returned through char** are heap-allocated and
 * must be released with flode_string_free.
 *
 * Feature matrices cross the boundary as column-major arrays of doubles
 * (separate real and imaginary parts; a NULL imaginary pointer means a
 * real matrix).
 */
#ifndef FLODE_H
#define FLODE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum flode_status {
  FLODE_OK = 0,
  FLODE_ERR_INVALID_ARGUMENT = 1,
  FLODE_ERR_PARSE = 2,
  FLODE_ERR_DIMENSION = 3,
  FLODE_ERR_NUMERIC = 4,
  FLODE_ERR_IO = 5,
  FLODE_ERR_UNSUPPORTED = 6,
  FLODE_ERR_INTERNAL = 7
} flode_status;

typedef enum flode_degree_policy {
  FLODE_DEGREE_ERROR = 0,
  FLODE_DEGREE_PSEUDO_INVERSE = 1,
  FLODE_DEGREE_SELF_LOOP = 2
} flode_degree_policy;

typedef enum flode_scheme {
  FLODE_SCHEME_HEAT = 0,
  FLODE_SCHEME_SCHRODINGER = 1
} flode_scheme;

/* Sign of the imaginary unit in the Schrodinger update. */
typedef enum flode_sign {
  FLODE_SIGN_PLUS = 0,
  FLODE_SIGN_MINUS = 1
} flode_sign;

typedef enum flode_graph_class {
  FLODE_CLASS_UNDIRECTED_OR_NORMAL = 0,
  FLODE_CLASS_DIRECTED_ALPHA1 = 1
} flode_graph_class;

typedef enum flode_regime {
  FLODE_REGIME_HFD = 0,
  FLODE_REGIME_LFD = 1,
  FLODE_REGIME_LAMBDA_FD = 2
} flode_regime;

typedef enum flode_verdict {
  FLODE_VERDICT_CONFIRMED = 0,
  FLODE_VERDICT_REFUTED = 1,
  FLODE_VERDICT_UNDECIDED = 2
} flode_verdict;

typedef struct flode_graph flode_graph;
typedef struct flode_sna flode_sna;
typedef struct flode_spectrum flode_spectrum;
typedef struct flode_factors flode_factors;
typedef struct flode_operator flode_operator;
typedef struct flode_trajectory flode_trajectory;
typedef struct flode_dataset flode_dataset;
typedef struct flode_model flode_model;

const char* flode_version(void);
/* Message for the most recent failure on this thread. */
const char* flode_last_error(void);
void flode_string_free(char* s);

/* ------------------------------------------------------------------ */
/* Graphs. An edge (u, v) is the arc u -> v, adjacency entry a[v][u].   */

flode_status flode_graph_from_edge_list(const char* text, int num_nodes,
                                        flode_graph** out); /* num_nodes < 0: infer */
flode_status flode_graph_load_file(const char* path, int num_nodes,
                                   flode_graph** out);
flode_status flode_graph_cycle(int n, flode_graph** out);
flode_status flode_graph_directed_cycle(int n, flode_graph** out);
flode_status flode_graph_complete(int n, flode_graph** out);
flode_status flode_graph_erdos_renyi(int n, double p, int directed,
                                     uint64_t seed, flode_graph** out);
flode_status flode_graph_to_undirected(const flode_graph* g, flode_graph** out);
flode_status flode_graph_add_self_loops(const flode_graph* g,
                                        flode_graph** out);
/* strong = 0 selects weak connectivity; node indices are remapped densely. */
flode_status flode_graph_largest_component(const flode_graph* g, int strong,
                                           flode_graph** out);
int flode_graph_num_nodes(const flode_graph* g);
int64_t flode_graph_num_edges(const flode_graph* g);
int flode_graph_is_directed(const flode_graph* g);
int flode_graph_is_balanced(const flode_graph* g);
flode_status flode_graph_set_labels(flode_graph* g, const int* labels,
                                    int count);
int flode_graph_has_labels(const flode_graph* g);
/* symmetrized != 0 evaluates the statistic on the symmetrized edge set.
 * excluded (optional) counts zero-in-degree nodes left out of the mean. */
flode_status flode_graph_homophily(const flode_graph* g, int symmetrized,
                                   double* value, int* excluded);
/* Column-major N x N matrix of directed hop counts (from column node to
 * row node); -1 marks unreachable pairs. */
flode_status flode_graph_distances(const flode_graph* g, int* out);
void flode_graph_free(flode_graph* g);

/* ------------------------------------------------------------------ */
/* Symmetrically normalized adjacency and Dirichlet energies.           */

flode_status flode_sna_build(const flode_graph* g, flode_degree_policy policy,
                             flode_sna** out);
int flode_sna_num_nodes(const flode_sna* sna);
flode_status flode_sna_entry(const flode_sna* sna, int row, int col,
                             double* out);
flode_status flode_sna_weak_balance_gap(const flode_sna* sna, double* out);
flode_status flode_sna_normality_defect(const flode_sna* sna, double* out);
flode_status flode_sna_spectrum(const flode_sna* sna, flode_spectrum** out);

flode_status flode_dirichlet_energy(const flode_graph* g, const double* re,
                                    const double* im, int rows, int cols,
                                    double* out);
flode_status flode_dirichlet_energy_trace(const flode_sna* sna,
                                          const double* re, const double* im,
                                          int rows, int cols, double* out);
flode_status flode_normalized_dirichlet_energy(const flode_sna* sna,
                                               const double* re,
                                               const double* im, int rows,
                                               int cols, double* out);
void flode_sna_free(flode_sna* sna);

/* Eigenvalues ascending by real part (ties by imaginary part). */
int flode_spectrum_size(const flode_spectrum* s);
flode_status flode_spectrum_eigenvalue(const flode_spectrum* s, int index,
                                       double* re, double* im);
void flode_spectrum_free(flode_spectrum* s);

/* ------------------------------------------------------------------ */
/* SVD factors and fractional operators.                                */

flode_status flode_svd_full(const flode_sna* sna, flode_factors** out);
flode_status flode_svd_truncated(const flode_sna* sna, int rank, uint64_t seed,
                                 flode_factors** out);
int flode_factors_rank(const flode_factors* f);
int flode_factors_is_truncated(const flode_factors* f);
flode_status flode_factors_singular_values(const flode_factors* f,
                                           double* out /* rank entries */);
flode_status flode_factors_explained_variance(const flode_factors* f, int k,
                                              double* out);
flode_status flode_factors_save(const flode_factors* f, const char* path);
flode_status flode_factors_load(const char* path, flode_factors** out);
/* Cache key for offline SVD reuse: graph hash + policy + rank + seed. */
flode_status flode_factors_cache_key(const flode_graph* g,
                                     flode_degree_policy policy, int rank,
                                     uint64_t seed, char** out);
void flode_factors_free(flode_factors* f);

flode_status flode_operator_create(const flode_factors* f, double alpha,
                                   flode_operator** out);
flode_status flode_operator_apply(const flode_operator* op, const double* re,
                                  const double* im, int rows, int cols,
                                  double* out_re, double* out_im);
flode_status flode_operator_entry(const flode_operator* op, int row, int col,
                                  double* out);
/* JSON report for the virtual-edge bound: max_ratio, worst pair,
 * unreachable-entry maximum, sigma1. */
flode_status flode_operator_bound_report(const flode_operator* op,
                                         const flode_graph* g, char** out);
void flode_operator_free(flode_operator* op);

/* ------------------------------------------------------------------ */
/* Dynamics.                                                            */

typedef struct flode_dominance {
  flode_regime regime;
  double limit_lambda;
  double predicted_limit;
  double lhs;
  double rhs;
  double margin;
  int condition_met;
  int indeterminate;
  int lambda1_unique;
  double lambda1_re;
  double lambdaN_re;
  double lambda_plus;   /* NaN outside the alpha < 0 branch */
  double lambda_minus;  /* NaN outside the alpha < 0 branch */
  double w_low;
  double w_high;
} flode_dominance;

flode_status flode_predict_dominance(const flode_spectrum* sna_spectrum,
                                     const double* w_re, const double* w_im,
                                     int channels, flode_scheme scheme,
                                     double alpha,
                                     flode_graph_class graph_class,
                                     flode_sign sign, flode_dominance* out);

flode_status flode_step_size_guard(const flode_spectrum* sna_spectrum,
                                   const double* w_re, const double* w_im,
                                   int channels, flode_scheme scheme,
                                   double alpha, flode_sign sign,
                                   double* max_h, int* unbounded,
                                   int* degenerate, double* epsilon);

flode_status flode_evolve(const flode_sna* sna, const flode_operator* op,
                          const double* w_re, const double* w_im, int channels,
                          flode_scheme scheme, flode_sign sign,
                          const double* x0_re, const double* x0_im, int rows,
                          int cols, double h, int64_t steps,
                          int64_t record_every, int renormalize,
                          flode_trajectory** out);

flode_status flode_closed_form(const flode_operator* op, const double* w_re,
                               const double* w_im, int channels,
                               flode_scheme scheme, flode_sign sign,
                               const double* x0_re, const double* x0_im,
                               int rows, int cols, double t, double* out_re,
                               double* out_im);

flode_status flode_gcn_evolve(const flode_sna* sna, const double* x0,
                              int rows, int cols, const double* w_diag,
                              int64_t layers, int64_t record_every,
                              flode_trajectory** out);

int64_t flode_trajectory_num_records(const flode_trajectory* t);
flode_status flode_trajectory_record(const flode_trajectory* t, int64_t index,
                                     int64_t* step, double* raw_energy,
                                     double* normalized_energy,
                                     double* feature_norm);
flode_status flode_classify_trajectory(const flode_trajectory* t,
                                       const flode_dominance* report,
                                       double tol, flode_verdict* out);
void flode_trajectory_free(flode_trajectory* t);

/* ------------------------------------------------------------------ */
/* Datasets.                                                            */

typedef struct flode_dsbm_config {
  int num_nodes;
  int num_clusters;
  double alpha_intra;
  double alpha_inter;
  double beta_intra;
  double beta_param;
  uint64_t seed;
} flode_dsbm_config;

flode_status flode_dsbm_generate(const flode_dsbm_config* config,
                                 flode_dataset** out);
/* options_json fields (all optional): largest_component (bool),
 * component_mode ("weak"/"strong"), make_undirected (bool), self_loops
 * (bool), normalize ("row_l2"/"standardize"). */
flode_status flode_dataset_load(const char* dir, const char* options_json,
                                flode_dataset** out);
flode_status flode_dataset_export(const flode_dataset* ds, const char* dir);
/* Draws 20-per-cluster/500/rest splits into the dataset. */
flode_status flode_dataset_make_splits(flode_dataset* ds, uint64_t seed);
int flode_dataset_num_nodes(const flode_dataset* ds);
int flode_dataset_feature_dim(const flode_dataset* ds);
int flode_dataset_num_classes(const flode_dataset* ds);
flode_status flode_dataset_graph(const flode_dataset* ds, flode_graph** out);
flode_status flode_dataset_features(const flode_dataset* ds, double* out);
flode_status flode_dataset_labels(const flode_dataset* ds, int* out);
/* which: 0 train, 1 val, 2 test. Call with out == NULL to query count. */
flode_status flode_dataset_split(const flode_dataset* ds, int which, int* out,
                                 int* count);
/* Newline-joined preprocessing provenance. */
flode_status flode_dataset_provenance(const flode_dataset* ds, char** out);
void flode_dataset_free(flode_dataset* ds);

/* ------------------------------------------------------------------ */
/* Model.                                                               */

/* config_json mirrors the model configuration: hidden_channels,
 * num_layers, encoder_layers, decoder_layers, input_dropout,
 * decoder_dropout, scheme, sign, learning_rate, weight_decay, max_epochs,
 * patience, seed, leaky_slope. */
flode_status flode_model_create(const char* config_json,
                                const flode_factors* factors, int in_dim,
                                int num_classes, uint64_t seed,
                                flode_model** out);
/* Full-batch training with early stopping; the model keeps the
 * best-validation parameters. history_csv (optional) receives
 * "epoch,train_loss,train_acc,val_acc,test_acc" rows. */
flode_status flode_model_train(flode_model* model, const flode_dataset* ds,
                               char** history_csv, double* best_val_acc,
                               double* test_acc);
flode_status flode_model_evaluate(const flode_model* model,
                                  const flode_dataset* ds, const int* mask,
                                  int mask_len, double* accuracy);
flode_status flode_model_logits(const flode_model* model,
                                const flode_dataset* ds, double* out);
flode_status flode_model_gradient_check(const flode_model* model,
                                        const flode_dataset* ds,
                                        double* max_rel_error);
flode_status flode_model_dominance_audit(const flode_model* model,
                                         const flode_spectrum* sna_spectrum,
                                         flode_dominance* out);
/* Learned scalar parameters as JSON: alpha, h, W spectrum endpoints. */
flode_status flode_model_params_json(const flode_model* model, char** out);
flode_status flode_model_save(const flode_model* model, const char* path);
flode_status flode_model_load(const char* path, const flode_factors* factors,
                              flode_model** out);
void flode_model_free(flode_model* model);

/* ------------------------------------------------------------------ */
/* Verification suites and utilities.                                   */

/* names: comma-separated suite list or "all". Returns a JSON array of
 * {name, passed, detail, seconds}. all_passed (optional) is the
 * conjunction. inject_fault perturbs one SNA entry inside the suites so
 * their sensitivity can be exercised. */
flode_status flode_verify_run(const char* names, uint64_t seed,
                              int inject_fault, char** results_json,
                              int* all_passed);
flode_status flode_verify_suite_names(char** csv_out);

/* Seeded standard normals (deterministic across platforms); convenience
 * for reproducible experiment drivers. */
flode_status flode_seeded_normals(uint64_t seed, int count, double* out);
flode_status flode_seeded_uniform(uint64_t seed, int count, double lo,
                                  double hi, double* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* FLODE_H */
