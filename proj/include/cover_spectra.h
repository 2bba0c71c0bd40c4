/* C interface to the coverspectra library: random covering graphs of a
 * fixed base graph, adjacency/Hashimoto spectra, new-eigenvalue statistics,
 * and the associated experiment drivers.
 *
 * All functions return CS_OK (0) on success or a nonzero cs_status; the
 * thread-local cs_last_error() carries a human-readable detail message.
 * Objects are opaque handles created and destroyed by this library, and
 * strings returned through char** must be released with cs_string_free.
 * Experiments are deterministic in (seed, parameters) and independent of
 * the thread count.
 */

#ifndef COVER_SPECTRA_H
#define COVER_SPECTRA_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cs_status {
    CS_OK = 0,
    CS_ERROR_INVALID_ARGUMENT = 2,
    CS_ERROR_BUDGET_EXHAUSTED = 3,
    CS_ERROR_SIZE_CAP = 4,
    CS_ERROR_NO_CONVERGENCE = 5,
    CS_ERROR_IO = 6,
    CS_ERROR_INTERNAL = 7
} cs_status;

typedef struct cs_graph cs_graph;
typedef struct cs_cover cs_cover;

const char* cs_status_name(cs_status status);
/* Detail message for the most recent failure on this thread. */
const char* cs_last_error(void);
void cs_string_free(char* text);

/* ---- graphs ---------------------------------------------------------- */

/* Builds a graph from directed-edge arrays; iota must be the edge
 * involution with tail(iota e) = head(e). */
cs_status cs_graph_create(int vertex_count, int dir_edge_count, const int* tails, const int* heads,
                          const int* iota, cs_graph** out);
void cs_graph_destroy(cs_graph* graph);

cs_status cs_graph_parse(const char* text, cs_graph** out);
cs_status cs_graph_format(const cs_graph* graph, char** out);
cs_status cs_graph_read_file(const char* path, cs_graph** out);
cs_status cs_graph_write_file(const cs_graph* graph, const char* path);

/* A single vertex carrying whole_loops whole-loops and half_loops
 * half-loops. */
cs_status cs_graph_bouquet(int whole_loops, int half_loops, cs_graph** out);
cs_status cs_graph_cycle(int length, cs_graph** out);
/* Random multigraph for smoke tests; may contain half- and whole-loops. */
cs_status cs_graph_random(unsigned long long seed, int max_vertices, int max_degree, cs_graph** out);

int cs_graph_vertex_count(const cs_graph* graph);
int cs_graph_dir_edge_count(const cs_graph* graph);
int cs_graph_edge_count(const cs_graph* graph);

typedef struct cs_graph_stats_t {
    int order;                        /* #E - #V (edges = involution orbits) */
    int euler_characteristic_twice;   /* 2 #V - #E_dir */
    int half_loop_count;              /* o1 */
    int non_half_edge_count;          /* o2 */
} cs_graph_stats_t;

cs_status cs_graph_stats(const cs_graph* graph, cs_graph_stats_t* out);
/* degrees must hold vertex_count ints. */
cs_status cs_graph_degrees(const cs_graph* graph, int* degrees);
/* out must hold vertex_count^2 doubles (row major). */
cs_status cs_graph_adjacency(const cs_graph* graph, double* out);
/* out must hold dir_edge_count^2 doubles (row major). */
cs_status cs_graph_hashimoto(const cs_graph* graph, double* out);
cs_status cs_graph_prune(const cs_graph* graph, cs_graph** out);
cs_status cs_graph_subdivide(const cs_graph* graph, int dir_edge, int parts, cs_graph** out);
cs_status cs_graph_is_isomorphic(const cs_graph* a, const cs_graph* b, int size_cap, int* out);

/* ---- spectra ---------------------------------------------------------- */

/* Adjacency eigenvalues, descending; out must hold vertex_count doubles. */
cs_status cs_graph_adjacency_spectrum(const cs_graph* graph, double* out);
/* Perron eigenvalue of the Hashimoto matrix. */
cs_status cs_graph_mu1(const cs_graph* graph, double* out);
/* Max scaled residual of the Ihara determinantal identity at sample_points
 * points (0 for the default 2 #E_dir + 1). */
cs_status cs_ihara_check(const cs_graph* graph, int sample_points, double* max_residual);
/* Runs the identity on `count` random graphs; optional TSV of per-graph
 * residuals. */
cs_status cs_ihara_check_random(int count, int max_vertices, unsigned long long seed, double* worst_residual,
                                char** tsv);
/* JSON spectral report of a cover of a d-regular base. */
cs_status cs_spectral_report(const cs_graph* cover, const cs_graph* base, int d, double epsilon, char** json);

/* ---- covers ----------------------------------------------------------- */

/* model is one of: permutation, perm-involution-even, perm-involution-odd,
 * cyclic, cyclic-involution-even, cyclic-involution-odd. */
cs_status cs_cover_sample(const cs_graph* base, int n, const char* model, unsigned long long seed,
                          unsigned long long trial, cs_cover** out);
void cs_cover_destroy(cs_cover* cover);
cs_status cs_cover_realize(const cs_cover* cover, cs_graph** out);
cs_status cs_cover_format(const cs_cover* cover, char** out);
cs_status cs_cover_parse(const char* text, const cs_graph* base, cs_cover** out);

/* ---- experiments ------------------------------------------------------ */
/* Each driver renders a TSV table (and a JSON sidecar with the full
 * configuration) as strings owned by the caller. */

/* Exact expected-count formulas vs Monte Carlo for every etale shape with
 * at most max_edges edges over the base. */
cs_status cs_expect_table(const cs_graph* base, const char* model, const char* n_csv, int max_edges, long trials,
                          unsigned long long seed, int threads, char** tsv, char** meta_json);

/* E[Trace(H_G^k) - Trace(H_B^k)], optionally filtered by tangle-freeness
 * (use_filter != 0 with nu, r, tangle_budget). */
cs_status cs_trace_scan(const cs_graph* base, const char* model, const char* k_csv, const char* n_csv, long trials,
                        unsigned long long seed, int use_filter, double nu, int r, long tangle_budget, int threads,
                        char** tsv, char** meta_json);

/* P[some new eigenvalue exceeds 2 sqrt(d-1) + eps] per n, with a log-log
 * slope fit. */
cs_status cs_nonalon_scan(const cs_graph* base, const char* model, double eps, const char* n_csv, long trials,
                          unsigned long long seed, int threads, char** tsv, char** meta_json);

typedef struct cs_tangle_report_t {
    int found;
    int budget_exhausted;
    double witness_mu1;
    int witness_order;
} cs_tangle_report_t;

/* Searches for a connected pruned subgraph with order < r and mu1 >= nu;
 * witness_text (optional) receives the witness in graph format. */
cs_status cs_tangle_search(const cs_graph* graph, double nu, int r, long edge_budget, cs_tangle_report_t* out,
                           char** witness_text);

typedef struct cs_shannon_result_t {
    double valence;
    double z0;
    double bisection_residual;
} cs_shannon_result_t;

/* lengths has one entry per edge orbit, in orbit-representative order. */
cs_status cs_shannon_valence(const cs_graph* graph, const int* lengths, cs_shannon_result_t* out);

typedef struct cs_markov_bounds_t {
    double adjacency_as_written;
    double adjacency_balanced;
    double hashimoto;
    int r_default;
} cs_markov_bounds_t;

cs_status cs_markov_bounds(int d, int r, cs_markov_bounds_t* out);

typedef struct cs_puder_comparison_t {
    double alon;
    double offset_bound;
    double hashimoto_at_d;
} cs_puder_comparison_t;

cs_status cs_puder_comparison(int d, cs_puder_comparison_t* out);

#ifdef __cplusplus
}
#endif

#endif /* COVER_SPECTRA_H */
