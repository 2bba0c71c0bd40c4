#pragma once

#include <optional>
#include <vector>

#include "covers.hpp"
#include "graph.hpp"
#include "rational.hpp"

namespace cspec {

// Perron-Frobenius eigenvalue of the Hashimoto matrix of psi.
double mu1(const Graph& psi);

// Cross-check route: mu1 = 1 / y0 with y0 the smallest positive root of
// det(I - y A + y^2 (D - I)).
double mu1_via_ihara_root(const Graph& psi);

// Lower bound m(d) on the tangle power of models over d-regular bases.
int m_lower(int d);

// epsilon_0 = mu1 + (d-1)/mu1 - 2 sqrt(d-1); requires mu1 > sqrt(d-1).
double epsilon0(const Graph& psi, int d);

// Spectral radius of the adjacency operator of the relative tree over a
// d-regular base: mu1 + (d-1)/mu1.
double tree_radius(const Graph& psi, int d);

// R rounds of completing every deficient vertex to degree d with fresh
// pendant edges (psi^R in the universal-cover construction).
Graph build_relative_tree(const Graph& psi, int d, int rounds);
// Base-labelled variant: completes each vertex star to the full star of its
// base image.
BGraph build_relative_tree(const BGraph& psi, int rounds);

// lambda_1 of the adjacency of psi^R, by sparse power iteration; increases
// with R towards tree_radius.
double truncated_tree_radius(const Graph& psi, int d, int rounds);

struct ShannonResult {
    double valence = 0.0;
    double z0 = 0.0;
    double bisection_residual = 0.0;
};

// Shannon's algorithm: the valence 1/z0 where rho(Z(z0)) = 1 and Z(z) has
// (v1, v2) entry sum z^{k(e)} over directed edges with head v1 and tail v2.
// `edge_lengths` is indexed by orbit (orbit_reps order).  Equals
// lambda_1(VLG(t, k)).  Throws when the valence would be below 1.
ShannonResult shannon_valence(const Graph& t, const std::vector<int>& edge_lengths);

// Power series coefficients a_2..a_K of S_d(z) = (1 - sqrt(1-4(d-1)z^2))/2,
// the first-return generating function of the (d-1)-ary rooted tree.
std::vector<Rational> s_d_series(int d, int k_max);

// Entrywise residual of I - Z(z) = (1 - S_d(z)) (I - y A + y^2 (D - I))
// with y = z / (1 - S_d(z)), for z inside the convergence disc.
double curious_identity_check(const Graph& psi, int d, const std::vector<double>& z_samples);

struct TangleReport {
    double nu = 0.0;
    int r = 0;
    bool found = false;
    std::optional<Graph> witness;
    double witness_mu1 = 0.0;
    int witness_order = 0;
    bool search_budget_exhausted = false;
};

// Searches the pruned 2-core of g for a connected pruned subgraph with
// order < r and mu1 >= nu.  Sound always; complete only for witnesses with
// at most edge_budget edges (and within an internal candidate cap), which
// the report discloses.
TangleReport has_tangles(const Graph& g, double nu, int r, long edge_budget);

// Push-forward of a vertex function along a covering morphism pi: T -> G
// given as a BGraph (total = T, base = G): (pi_* f)(v) = sum over the fibre.
std::vector<double> push_forward(const BGraph& pi, const std::vector<double>& f);

struct FundamentalRow {
    int n = 0;
    long attempts = 0;
    long accepted = 0;
    double lambda = 0.0;        // tree_radius(psi, d)
    double mean_max_new = 0.0;  // mean over accepted samples of the max new eigenvalue
    double frac_above = 0.0;    // fraction with max new >= lambda - gap
    bool conditioned = true;
};

// For each n: rejection-samples covers conditioned on containing psi and
// reports the distribution of the largest new adjacency eigenvalue against
// lambda = tree_radius(psi, d).  With condition=false the same table is
// produced for unconditioned covers (the contrast row).
std::vector<FundamentalRow> fundamental_subgraph_experiment(const Graph& base, const BGraph& psi,
                                                            const std::vector<int>& n_grid, const ModelSpec& spec,
                                                            long samples_per_n, long rejection_budget, double gap,
                                                            bool condition = true, int threads = 0);

}  // namespace cspec
