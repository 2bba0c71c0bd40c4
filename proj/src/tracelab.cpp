#include "tracelab.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "linalg.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "spectra.hpp"
#include "tangles.hpp"
#include "walks.hpp"

namespace cspec {

TraceScanResult trace_scan(const Graph& base, const ModelSpec& spec, const std::vector<int>& k_list,
                           const std::vector<int>& n_list, long trials, const std::optional<TangleFilter>& filter,
                           int threads, long walk_budget) {
    require(trials >= 1, "trace_scan: need at least one trial");
    require(!k_list.empty() && !n_list.empty(), "trace_scan: empty grid");
    for (int k : k_list) require(k >= 1, "trace_scan: k must be positive");

    TraceScanResult result;
    result.k_list = k_list;
    result.n_list = n_list;
    result.trials = trials;
    result.seed = spec.seed;

    const size_t kc = k_list.size();
    std::vector<long long> base_traces(kc);
    for (size_t i = 0; i < kc; ++i) base_traces[i] = hashimoto_trace(base, k_list[i], walk_budget);

    for (int n : n_list) {
        std::vector<long long> values(trials * kc, 0);
        std::vector<char> flagged(trials, 0);
        parallel_for(trials, threads, [&](long t) {
            CoordCover cover = sample_cover(base, n, spec, static_cast<std::uint64_t>(t));
            BGraph realized = realize(cover);
            bool keep = true;
            if (filter) {
                TangleReport report = has_tangles(realized.total, filter->nu, filter->r, filter->edge_budget);
                if (report.search_budget_exhausted) flagged[t] = 1;
                keep = !report.found;
            }
            if (!keep) return;  // indicator zeroes the contribution
            for (size_t i = 0; i < kc; ++i)
                values[t * kc + i] = hashimoto_trace(realized.total, k_list[i], walk_budget) - base_traces[i];
        });

        bool any_flagged = std::find(flagged.begin(), flagged.end(), 1) != flagged.end();
        for (size_t i = 0; i < kc; ++i) {
            double mean = 0.0, m2 = 0.0;
            for (long t = 0; t < trials; ++t) {
                double v = static_cast<double>(values[t * kc + i]);
                double delta = v - mean;
                mean += delta / (t + 1);
                m2 += delta * (v - mean);
            }
            TraceScanCell cell;
            cell.k = k_list[i];
            cell.n = n;
            cell.mean = mean;
            cell.stderr_of_mean = trials > 1 ? std::sqrt(m2 / (trials - 1) / trials) : 0.0;
            cell.trials = trials;
            cell.filter_budget_flagged = any_flagged;
            result.cells.push_back(cell);
        }
    }
    return result;
}

double c0_prediction(const Graph& base, int k, const std::function<double(int)>& h) {
    require(k >= 1, "c0_prediction: k must be positive");
    double sum = 0.0;
    for (int kp = 1; kp < k; ++kp)
        if (k % kp == 0) sum += static_cast<double>(hashimoto_trace(base, kp));
    // The k' = k divisor cancels against the subtracted Trace(H_B^k).
    if (h) sum -= h(k);
    return sum;
}

CoefficientFit fit_inverse_powers(const std::vector<long>& n_values, const std::vector<double>& means,
                                  const std::vector<double>& stderrs, int r) {
    const int rows = static_cast<int>(n_values.size());
    require(r >= 1, "fit_inverse_powers: r must be positive");
    require(rows == static_cast<int>(means.size()) && rows == static_cast<int>(stderrs.size()),
            "fit_inverse_powers: size mismatch");
    {
        std::vector<long> distinct = n_values;
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        require(static_cast<int>(distinct.size()) >= r + 2, "fit_inverse_powers: need at least r + 2 distinct n values");
    }

    Matrix design(rows, r);
    for (int i = 0; i < rows; ++i) {
        double x = 1.0;
        for (int j = 0; j < r; ++j) {
            design(i, j) = x;
            x /= static_cast<double>(n_values[i]);
        }
    }
    std::vector<double> weight(rows);
    for (int i = 0; i < rows; ++i) {
        double se = std::max(stderrs[i], 1e-12);
        weight[i] = 1.0 / (se * se);
    }

    Matrix normal(r, r);
    std::vector<double> rhs(r, 0.0);
    for (int i = 0; i < rows; ++i)
        for (int a = 0; a < r; ++a) {
            rhs[a] += weight[i] * design(i, a) * means[i];
            for (int b = 0; b < r; ++b) normal(a, b) += weight[i] * design(i, a) * design(i, b);
        }

    // Condition estimate through the explicit inverse; clustered n values
    // make the normal matrix numerically singular.
    Matrix inverse(r, r);
    double norm_f = 0.0, inv_f = 0.0;
    for (int col = 0; col < r; ++col) {
        std::vector<double> unit(r, 0.0);
        unit[col] = 1.0;
        std::vector<double> sol;
        try {
            sol = lu_solve(normal, unit);
        } catch (const Error&) {
            fail_invalid("fit_inverse_powers: ill-conditioned design");
        }
        for (int i = 0; i < r; ++i) inverse(i, col) = sol[i];
    }
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            norm_f += normal(i, j) * normal(i, j);
            inv_f += inverse(i, j) * inverse(i, j);
        }
    require(std::sqrt(norm_f * inv_f) < 1e14, "fit_inverse_powers: ill-conditioned design");

    CoefficientFit fit;
    fit.coefficients = lu_solve(normal, rhs);
    fit.ci_half_widths.resize(r);
    for (int j = 0; j < r; ++j) fit.ci_half_widths[j] = 1.96 * std::sqrt(std::max(0.0, inverse(j, j)));

    double wss = 0.0;
    for (int i = 0; i < rows; ++i) {
        double fitted = 0.0;
        for (int j = 0; j < r; ++j) fitted += design(i, j) * fit.coefficients[j];
        double resid = means[i] - fitted;
        wss += weight[i] * resid * resid;
    }
    fit.weighted_rms_residual = std::sqrt(wss / rows);
    return fit;
}

CoefficientFit fit_coefficients(const TraceScanResult& scan, int k, int r) {
    std::vector<long> ns;
    std::vector<double> means, ses;
    for (const TraceScanCell& cell : scan.cells)
        if (cell.k == k) {
            ns.push_back(cell.n);
            means.push_back(cell.mean);
            ses.push_back(cell.stderr_of_mean);
        }
    require(!ns.empty(), "fit_coefficients: k not present in scan");
    CoefficientFit fit = fit_inverse_powers(ns, means, ses, r);
    fit.k = k;
    return fit;
}

NonAlonScan nonalon_probability_scan(const Graph& base, const ModelSpec& spec, double epsilon,
                                     const std::vector<int>& n_list, long trials, int threads) {
    require(trials >= 1, "nonalon_probability_scan: need trials");
    require(!base.empty() && base.dir_edge_count() > 0, "nonalon_probability_scan: empty base");
    int d = base.degree(0);
    for (int v = 0; v < base.vertex_count(); ++v)
        require(base.degree(v) == d, "nonalon_probability_scan: base must be regular");

    NonAlonScan scan;
    scan.epsilon = epsilon;
    scan.threshold = alon_bound(d) + epsilon;

    Matrix ab = Matrix::from_row_major(base.vertex_count(), base.vertex_count(), adjacency_matrix(base));
    EigenDecomposition base_eigen = symmetric_eigen(ab);

    for (int n : n_list) {
        std::vector<char> hit(trials, 0);
        parallel_for(trials, threads, [&](long t) {
            BGraph cover = realize(sample_cover(base, n, spec, static_cast<std::uint64_t>(t)));
            ExtremeEigenvalues ext = extreme_new_adjacency(cover.total, cover.vertex_map, base_eigen, d,
                                                           derive_seed(spec.seed, t, 0x5eedULL));
            double top = std::max(std::fabs(ext.max), std::fabs(ext.min));
            hit[t] = top > scan.threshold ? 1 : 0;
        });
        long count = 0;
        for (long t = 0; t < trials; ++t) count += hit[t];
        NonAlonRow row;
        row.n = n;
        row.trials = trials;
        row.p_hat = static_cast<double>(count) / trials;
        row.stderr_of_p = std::sqrt(std::max(row.p_hat * (1.0 - row.p_hat), 1.0 / trials) / trials);
        scan.rows.push_back(row);
    }

    // log-log slope over rows with positive estimates.  Plain OLS on equal
    // grid weights: the deviation from the asymptotic power law at small n
    // is systematic, so inverse-variance weights would just over-trust the
    // most saturated rows.
    std::vector<double> xs, ys;
    for (const NonAlonRow& row : scan.rows)
        if (row.p_hat > 0.0) {
            xs.push_back(std::log(static_cast<double>(row.n)));
            ys.push_back(std::log(row.p_hat));
        }
    const int rows = static_cast<int>(xs.size());
    if (rows >= 2) {
        double mx = 0, my = 0;
        for (int i = 0; i < rows; ++i) {
            mx += xs[i];
            my += ys[i];
        }
        mx /= rows;
        my /= rows;
        double sxx = 0, sxy = 0, syy = 0;
        for (int i = 0; i < rows; ++i) {
            sxx += (xs[i] - mx) * (xs[i] - mx);
            sxy += (xs[i] - mx) * (ys[i] - my);
            syy += (ys[i] - my) * (ys[i] - my);
        }
        require(sxx > 0, "nonalon_probability_scan: degenerate n grid");
        scan.slope = sxy / sxx;
        if (rows > 2) {
            double resid = std::max(0.0, syy - scan.slope * sxy) / (rows - 2);
            scan.slope_ci_half_width = 1.96 * std::sqrt(resid / sxx);
        } else {
            scan.slope_ci_half_width = 0.0;
        }
        scan.slope_valid = true;
    }
    return scan;
}

MarkovBounds markov_bounds(int d, int r) {
    require(d >= 3, "markov_bounds: d must be at least 3");
    require(r >= 1, "markov_bounds: r must be positive");
    MarkovBounds out;
    out.d = d;
    out.r = r;
    double rho = 2.0 * std::sqrt(static_cast<double>(d - 1));
    double rho_part = std::pow(rho, static_cast<double>(r) / (r + 1));
    out.adjacency_as_written = std::pow(static_cast<double>(d), 1.0 / r) * rho_part;
    out.adjacency_balanced = std::pow(static_cast<double>(d), 1.0 / (r + 1)) * rho_part;
    double half = std::sqrt(static_cast<double>(d - 1));
    out.hashimoto = half * (std::pow(static_cast<double>(d - 1), 1.0 / (2 * r)) +
                            std::pow(static_cast<double>(d - 1), -1.0 / (2 * r)));
    out.r_default = 2 * static_cast<int>(std::floor(std::sqrt(static_cast<double>(d - 1)) + 1.0));
    return out;
}

PuderComparison puder_comparison(int d) {
    require(d >= 3, "puder_comparison: d must be at least 3");
    PuderComparison out;
    out.d = d;
    out.alon = 2.0 * std::sqrt(static_cast<double>(d - 1));
    out.offset_bound = out.alon + 0.86;
    out.hashimoto_at_d = markov_bounds(d, d).hashimoto;
    return out;
}

}  // namespace cspec
