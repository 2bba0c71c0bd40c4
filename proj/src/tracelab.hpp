#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "covers.hpp"
#include "graph.hpp"

namespace cspec {

struct TangleFilter {
    double nu = 0.0;
    int r = 0;
    long edge_budget = 0;
};

struct TraceScanCell {
    int k = 0;
    int n = 0;
    double mean = 0.0;
    double stderr_of_mean = 0.0;
    long trials = 0;
    bool filter_budget_flagged = false;
};

struct TraceScanResult {
    std::vector<TraceScanCell> cells;  // n-major, then k in the requested order
    std::vector<int> k_list;
    std::vector<int> n_list;
    long trials = 0;
    std::uint64_t seed = 0;
};

// Monte Carlo estimate of E[(Trace(H_G^k) - Trace(H_B^k)) 1_TangleFree] per
// (k, n).  Traces are exact integers from non-backtracking path counts; a
// cell is flagged when the tangle filter hit its search budget on any trial.
TraceScanResult trace_scan(const Graph& base, const ModelSpec& spec, const std::vector<int>& k_list,
                           const std::vector<int>& n_list, long trials,
                           const std::optional<TangleFilter>& filter = std::nullopt, int threads = 0,
                           long walk_budget = 10000000);

// c_0(k) for the filtered trace difference: sum over proper divisors k' of
// k of Trace(H_B^{k'}) minus h(k), with h the model's non-occurring cycle
// count (identically 0 for permutation-family models over half-loop-free
// bases).
double c0_prediction(const Graph& base, int k, const std::function<double(int)>& h = {});

struct CoefficientFit {
    int k = 0;
    std::vector<double> coefficients;    // c_0 .. c_{r-1}
    std::vector<double> ci_half_widths;  // 95% half widths from error propagation
    double weighted_rms_residual = 0.0;
};

// Weighted least squares of y(n) against {1, 1/n, ..., 1/n^{r-1}}.
CoefficientFit fit_inverse_powers(const std::vector<long>& n_values, const std::vector<double>& means,
                                  const std::vector<double>& stderrs, int r);

// Same, pulling one k-row out of a scan.
CoefficientFit fit_coefficients(const TraceScanResult& scan, int k, int r);

struct NonAlonRow {
    int n = 0;
    double p_hat = 0.0;
    double stderr_of_p = 0.0;
    long trials = 0;
};

struct NonAlonScan {
    std::vector<NonAlonRow> rows;
    double epsilon = 0.0;
    double threshold = 0.0;  // 2 sqrt(d-1) + epsilon
    double slope = 0.0;      // log-log fit over rows with p_hat > 0
    double slope_ci_half_width = 0.0;
    bool slope_valid = false;
};

// Fraction of covers with at least one new adjacency eigenvalue exceeding
// 2 sqrt(d-1) + epsilon in absolute value, per n, with a log-log slope fit.
NonAlonScan nonalon_probability_scan(const Graph& base, const ModelSpec& spec, double epsilon,
                                     const std::vector<int>& n_list, long trials, int threads = 0);

struct MarkovBounds {
    int d = 0;
    int r = 0;
    double adjacency_as_written = 0.0;  // d^(1/r) (2 sqrt(d-1))^(r/(r+1))
    double adjacency_balanced = 0.0;    // d^(1/(r+1)) (2 sqrt(d-1))^(r/(r+1))
    double hashimoto = 0.0;             // sqrt(d-1) ((d-1)^(1/2r) + (d-1)^(-1/2r))
    int r_default = 0;                  // 2 floor(sqrt(d-1) + 1)
};

MarkovBounds markov_bounds(int d, int r);

struct PuderComparison {
    int d = 0;
    double alon = 0.0;            // 2 sqrt(d-1)
    double offset_bound = 0.0;    // 2 sqrt(d-1) + 0.86
    double hashimoto_at_d = 0.0;  // the Hashimoto-route bound at r = d
};

PuderComparison puder_comparison(int d);

}  // namespace cspec
