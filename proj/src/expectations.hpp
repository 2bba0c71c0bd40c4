#pragma once

#include <string>
#include <vector>

#include "covers.hpp"
#include "rational.hpp"
#include "series.hpp"

namespace cspec {

// Exact expected number of ordered copies E[#[S^<=] cap G] for one of the
// basic models; 0 when s is not etale, carries a forbidden half-loop
// pattern, or fails cyclic feasibility.  The value does not depend on the
// choice of ordering.  Requires #V_S <= n and #E_S <= n.
Rational expected_count(const BGraph& s, long n, const ModelSpec& spec);

// True iff the partial injection that the S-edges over whole-loop
// direction e induce on the fibre over its vertex is acyclic (so a full
// n-cycle can extend it whenever #E_S <= n - 1).
bool cyclic_feasible(const BGraph& s, int base_dir_edge);

struct ExpansionSeries {
    int leading_power = 0;          // exponent of the leading n power (= -ord(S))
    std::vector<Rational> coeffs;   // c_0 .. c_{r-1}, with c_0 = 1
    int truncation_order = 0;

    // Evaluates n^leading_power * sum c_i n^{-i} as an exact rational.
    Rational evaluate(long n) const;
};

// Exact 1/n expansion of expected_count, normalized by the leading power;
// throws for s that do not occur in the model.
ExpansionSeries expansion_series(const BGraph& s, const ModelSpec& spec, int order);

struct MonteCarloEstimate {
    double mean = 0.0;
    double stderr_of_mean = 0.0;
    long trials = 0;
};

// Sample mean and standard error of #[S^<=] cap G over independent covers;
// trial t uses the model's substream for trial t, so results are
// reproducible and thread-count independent.
MonteCarloEstimate monte_carlo_expected_count(const BGraph& s, int n, const ModelSpec& spec, long trials,
                                              int threads = 0);

// Batched variant: counts every shape on the same sampled covers (one
// cover per trial), amortizing the sampling.  trial_offset shifts the
// substream indices, giving fresh independent trials for retests.
std::vector<MonteCarloEstimate> monte_carlo_counts(const std::vector<const BGraph*>& shapes, int n,
                                                   const ModelSpec& spec, long trials, int threads = 0,
                                                   std::uint64_t trial_offset = 0);

// Average of #[S^<=] cap G over ALL assignments of the model at degree n,
// as an exact rational.  Only usable at tiny n.
Rational exhaustive_expected_count(const BGraph& s, int n, ModelKind kind);

// All etale B-graph shapes over `base` with at most max_edges edge orbits
// and no isolated vertices, pruned (every vertex has degree >= 2), up to
// B-graph isomorphism.  Shapes that cannot occur in the model (forbidden
// half-loop patterns, cyclically infeasible placements) are kept or
// dropped according to `occurring_only`.
struct EtaleShape {
    BGraph graph;
    std::string id;  // canonical encoding, stable across runs
};
std::vector<EtaleShape> enumerate_etale_shapes(const Graph& base, int max_edges, ModelKind kind,
                                               bool occurring_only = true);

// Enumerators for exhaustive averages.
std::vector<std::vector<int>> all_permutations(int n);
std::vector<std::vector<int>> all_full_cycles(int n);
std::vector<std::vector<int>> all_perfect_matchings(int n);
std::vector<std::vector<int>> all_near_perfect_matchings(int n);

}  // namespace cspec
