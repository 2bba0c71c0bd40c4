#include "tangles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "errors.hpp"
#include "linalg.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "spectra.hpp"
#include "walks.hpp"

namespace cspec {

double mu1(const Graph& psi) {
    require(!psi.empty(), "mu1: empty graph");
    int m = psi.dir_edge_count();
    if (m == 0) return 0.0;
    Matrix h = Matrix::from_row_major(m, m, hashimoto_matrix(psi));
    return perron_eigenvalue(h);
}

double mu1_via_ihara_root(const Graph& psi) {
    require(!psi.empty() && psi.dir_edge_count() > 0, "mu1_via_ihara_root: empty graph");
    const int n = psi.vertex_count();
    Matrix a = Matrix::from_row_major(n, n, adjacency_matrix(psi));
    std::vector<int> deg = psi.degree_sequence();
    auto value = [&](double y) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) m(i, j) = -y * a(i, j);
            m(i, i) += 1.0 + y * y * (deg[i] - 1);
        }
        return det_lu(std::move(m));
    };
    // det at y = 0 is 1; scan for the first sign change, then bisect.
    double step = 1e-3, prev = 0.0, prev_val = value(0.0);
    double lo = -1, hi = -1;
    for (double y = step; y <= 1.0 + 1e-12; y += step) {
        double v = value(y);
        if (v == 0.0 || (v > 0) != (prev_val > 0)) {
            lo = prev;
            hi = y;
            break;
        }
        prev = y;
        prev_val = v;
    }
    require(lo >= 0, "mu1_via_ihara_root: no root in (0, 1]");
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double v = value(mid);
        if (v == 0.0) return 1.0 / mid;
        if ((v > 0) == (value(lo) > 0))
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-14) break;
    }
    return 1.0 / (0.5 * (lo + hi));
}

int m_lower(int d) {
    require(d >= 3, "m_lower: d must be at least 3");
    return static_cast<int>(std::floor((std::sqrt(static_cast<double>(d - 1)) - 1.0) / 2.0)) + 1;
}

double epsilon0(const Graph& psi, int d) {
    require(d >= 3, "epsilon0: d must be at least 3");
    double m1 = mu1(psi);
    require(m1 > std::sqrt(static_cast<double>(d - 1)), "epsilon0: requires mu1(psi) > sqrt(d-1)");
    return m1 + (d - 1) / m1 - 2.0 * std::sqrt(static_cast<double>(d - 1));
}

double tree_radius(const Graph& psi, int d) {
    require(d >= 3, "tree_radius: d must be at least 3");
    for (int v = 0; v < psi.vertex_count(); ++v)
        require(psi.degree(v) <= d, "tree_radius: vertex degree exceeds d");
    double m1 = mu1(psi);
    require(m1 > std::sqrt(static_cast<double>(d - 1)), "tree_radius: requires mu1(psi) > sqrt(d-1)");
    return m1 + (d - 1) / m1;
}

Graph build_relative_tree(const Graph& psi, int d, int rounds) {
    require(rounds >= 0, "build_relative_tree: negative rounds");
    for (int v = 0; v < psi.vertex_count(); ++v)
        require(psi.degree(v) <= d, "build_relative_tree: vertex degree exceeds d");

    std::vector<int> tails, heads, iota;
    tails.reserve(psi.dir_edge_count());
    for (int e = 0; e < psi.dir_edge_count(); ++e) {
        tails.push_back(psi.tail(e));
        heads.push_back(psi.head(e));
        iota.push_back(psi.iota(e));
    }
    int vertices = psi.vertex_count();
    std::vector<int> degree(vertices);
    for (int v = 0; v < vertices; ++v) degree[v] = psi.degree(v);

    std::vector<int> frontier;
    for (int v = 0; v < vertices; ++v)
        if (degree[v] < d) frontier.push_back(v);

    for (int round = 0; round < rounds; ++round) {
        std::vector<int> next_frontier;
        for (int v : frontier) {
            while (degree[v] < d) {
                int leaf = vertices++;
                degree.push_back(1);
                int id = static_cast<int>(tails.size());
                tails.push_back(v);
                heads.push_back(leaf);
                tails.push_back(leaf);
                heads.push_back(v);
                iota.push_back(id + 1);
                iota.push_back(id);
                ++degree[v];
                next_frontier.push_back(leaf);
            }
        }
        frontier = std::move(next_frontier);
    }
    return Graph(vertices, std::move(tails), std::move(heads), std::move(iota));
}

BGraph build_relative_tree(const BGraph& psi, int rounds) {
    require(rounds >= 0, "build_relative_tree: negative rounds");
    require(is_etale(psi), "build_relative_tree: psi must be etale");
    const Graph& base = psi.base;

    std::vector<int> tails, heads, iota, emap, vmap;
    for (int e = 0; e < psi.total.dir_edge_count(); ++e) {
        tails.push_back(psi.total.tail(e));
        heads.push_back(psi.total.head(e));
        iota.push_back(psi.total.iota(e));
        emap.push_back(psi.edge_map[e]);
    }
    vmap = psi.vertex_map;
    int vertices = psi.total.vertex_count();

    // Directed base edges already present at each vertex star.
    std::vector<std::set<int>> covered(vertices);
    for (int e = 0; e < psi.total.dir_edge_count(); ++e) covered[psi.total.tail(e)].insert(psi.edge_map[e]);

    std::vector<int> frontier(vertices);
    for (int v = 0; v < vertices; ++v) frontier[v] = v;

    for (int round = 0; round < rounds; ++round) {
        std::vector<int> next_frontier;
        for (int v : frontier) {
            int bv = vmap[v];
            for (const int* it = base.out_begin(bv); it != base.out_end(bv); ++it) {
                int be = *it;
                if (covered[v].count(be)) continue;
                // A half base edge missing from the star lifts to a pendant
                // half... a half-loop must close on the vertex itself, which
                // would change its degree pattern; lift it as a half-loop.
                if (base.is_half_loop(be)) {
                    int id = static_cast<int>(tails.size());
                    tails.push_back(v);
                    heads.push_back(v);
                    iota.push_back(id);
                    emap.push_back(be);
                    covered[v].insert(be);
                    continue;
                }
                int leaf = vertices++;
                vmap.push_back(base.head(be));
                covered.push_back({base.iota(be)});
                int id = static_cast<int>(tails.size());
                tails.push_back(v);
                heads.push_back(leaf);
                tails.push_back(leaf);
                heads.push_back(v);
                iota.push_back(id + 1);
                iota.push_back(id);
                emap.push_back(be);
                emap.push_back(base.iota(be));
                covered[v].insert(be);
                next_frontier.push_back(leaf);
            }
        }
        frontier = std::move(next_frontier);
    }

    BGraph out;
    out.total = Graph(vertices, std::move(tails), std::move(heads), std::move(iota));
    out.base = base;
    out.vertex_map = std::move(vmap);
    out.edge_map = std::move(emap);
    out.validate();
    return out;
}

namespace {

// lambda_1 of the adjacency by power iteration on A + I (trees are
// bipartite, the shift breaks the +-lambda oscillation).
double adjacency_lambda1(const Graph& g, double tol = 1e-10, long max_iter = 200000) {
    const int n = g.vertex_count();
    require(n > 0, "adjacency_lambda1: empty graph");
    std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n))), y(n);
    double estimate = 0.0;
    int stable = 0;
    for (long it = 0; it < max_iter; ++it) {
        for (int v = 0; v < n; ++v) y[v] = x[v];
        for (int e = 0; e < g.dir_edge_count(); ++e) y[g.tail(e)] += x[g.head(e)];
        double norm = 0.0;
        for (double v : y) norm += v * v;
        norm = std::sqrt(norm);
        if (norm == 0.0) return 0.0;
        double rayleigh_q = 0.0;
        for (int v = 0; v < n; ++v) rayleigh_q += x[v] * y[v];
        for (int v = 0; v < n; ++v) x[v] = y[v] / norm;
        if (std::fabs(rayleigh_q - estimate) < tol) {
            if (++stable >= 3) return rayleigh_q - 1.0;
        } else {
            stable = 0;
        }
        estimate = rayleigh_q;
    }
    throw Error(ErrorKind::NoConvergence, "adjacency_lambda1: no convergence");
}

}  // namespace

double truncated_tree_radius(const Graph& psi, int d, int rounds) {
    Graph tree = build_relative_tree(psi, d, rounds);
    return adjacency_lambda1(tree);
}

ShannonResult shannon_valence(const Graph& t, const std::vector<int>& edge_lengths) {
    require(!t.empty() && t.dir_edge_count() > 0, "shannon_valence: need a nonempty graph");
    require(t.connected(), "shannon_valence: graph must be connected");
    std::vector<int> reps = t.orbit_reps();
    require(edge_lengths.size() == reps.size(), "shannon_valence: need one length per orbit");
    for (int k : edge_lengths) require(k >= 1, "shannon_valence: lengths must be positive");

    // The entries of Z(z) are the walk-generating series of the directed
    // suppression of the variable-length graph: every walk between
    // t-vertices whose interior stays on the glued chains counts, bouncing
    // included.  Eliminating the chain vertices gives
    //   Z(z) = z A_TT + z A_TP (I - z A_PP)^{-1} z A_PT
    // where P is the set of interior chain vertices.
    std::vector<int> oriented;
    for (int rep : reps) oriented.push_back(rep);
    OrderedGraph built = vlg({t, oriented}, edge_lengths);
    const int total = built.graph.vertex_count();
    const int nt = t.vertex_count();
    const int np = total - nt;
    Matrix a = Matrix::from_row_major(total, total, adjacency_matrix(built.graph));

    auto rho = [&](double z) -> double {
        Matrix zmat(nt, nt);
        for (int i = 0; i < nt; ++i)
            for (int j = 0; j < nt; ++j) zmat(i, j) = z * a(i, j);
        if (np > 0) {
            Matrix m(np, np);  // I - z A_PP
            for (int i = 0; i < np; ++i)
                for (int j = 0; j < np; ++j) m(i, j) = (i == j ? 1.0 : 0.0) - z * a(nt + i, nt + j);
            // Past the chain-block pole the series diverges; report +inf so
            // the bisection steps back (the true root lies before the pole).
            Matrix x(np, nt);
            for (int col = 0; col < nt; ++col) {
                std::vector<double> b(np);
                for (int i = 0; i < np; ++i) b[i] = z * a(nt + i, col);
                std::vector<double> sol;
                try {
                    sol = lu_solve(m, b);
                } catch (const Error&) {
                    return 1e300;
                }
                for (int i = 0; i < np; ++i) {
                    if (sol[i] < -1e-12) return 1e300;
                    x(i, col) = sol[i];
                }
            }
            for (int i = 0; i < nt; ++i)
                for (int j = 0; j < nt; ++j) {
                    double acc = 0.0;
                    for (int p = 0; p < np; ++p) acc += z * a(i, nt + p) * x(p, j);
                    zmat(i, j) += acc;
                }
        }
        return perron_eigenvalue(zmat);
    };

    // rho(Z(z)) increases from 0 and reaches 1 before the chain pole; the
    // crossing is at 1/lambda_1(VLG) <= 1.
    double hi = 1.0, lo = 1e-12;
    require(rho(hi) >= 1.0 - 1e-12, "shannon_valence: valence below 1");
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (rho(mid) >= 1.0)
            hi = mid;
        else
            lo = mid;
        if (hi - lo < 1e-15) break;
    }
    ShannonResult out;
    out.z0 = hi;
    out.valence = 1.0 / out.z0;
    double residual = rho(out.z0) - 1.0;
    out.bisection_residual = std::fabs(residual) < 1e300 ? std::fabs(residual) : 1.0;
    return out;
}

std::vector<Rational> s_d_series(int d, int k_max) {
    require(d >= 3, "s_d_series: d must be at least 3");
    require(k_max >= 2 && k_max <= 40, "s_d_series: k_max out of range");
    // S_d = sum_{m>=1} Catalan(m-1) ((d-1) z^2)^m.
    std::vector<Rational> out;
    BigInt catalan = 1;  // Catalan(0)
    BigInt dm1 = d - 1;
    BigInt power = dm1;
    for (int k = 2; k <= k_max; ++k) {
        if (k % 2 == 1) {
            out.emplace_back(0);
            continue;
        }
        int m = k / 2;
        if (m > 1) {
            // Catalan(m-1) = Catalan(m-2) * 2(2m-3)/m
            catalan = catalan * 2 * (2 * m - 3) / m;
            power *= dm1;
        }
        out.emplace_back(catalan * power);
    }
    return out;
}

double curious_identity_check(const Graph& psi, int d, const std::vector<double>& z_samples) {
    require(d >= 3, "curious_identity_check: d must be at least 3");
    require(!psi.empty(), "curious_identity_check: empty graph");
    const int n = psi.vertex_count();
    Matrix a = Matrix::from_row_major(n, n, adjacency_matrix(psi));
    std::vector<int> deg = psi.degree_sequence();
    const double disc_radius = 1.0 / (2.0 * std::sqrt(static_cast<double>(d - 1)));

    double worst = 0.0;
    for (double z : z_samples) {
        require(z > 0.0 && z < disc_radius, "curious_identity_check: z outside the convergence disc");
        double s = (1.0 - std::sqrt(1.0 - 4.0 * (d - 1) * z * z)) / 2.0;
        double y = z / (1.0 - s);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double lhs = (i == j ? 1.0 : 0.0) - (z * a(i, j) + (i == j ? s / (d - 1) * (d - deg[i]) : 0.0));
                double rhs = (1.0 - s) * ((i == j ? 1.0 : 0.0) - y * a(i, j) + (i == j ? y * y * (deg[i] - 1) : 0.0));
                worst = std::max(worst, std::fabs(lhs - rhs));
            }
    }
    return worst;
}

TangleReport has_tangles(const Graph& g, double nu, int r, long edge_budget) {
    require(nu > 1.0, "has_tangles: nu must exceed 1");
    require(r >= 1, "has_tangles: r must be positive");
    TangleReport report;
    report.nu = nu;
    report.r = r;

    Graph core = prune(g).graph;
    if (core.empty()) return report;

    // Component split.
    std::vector<int> comp(core.vertex_count(), -1);
    int comps = 0;
    for (int v0 = 0; v0 < core.vertex_count(); ++v0) {
        if (comp[v0] != -1) continue;
        std::vector<int> stack = {v0};
        comp[v0] = comps;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (const int* it = core.out_begin(v); it != core.out_end(v); ++it)
                if (comp[core.head(*it)] == -1) {
                    comp[core.head(*it)] = comps;
                    stack.push_back(core.head(*it));
                }
        }
        ++comps;
    }

    const long candidate_cap = 200000;
    for (int c = 0; c < comps; ++c) {
        // Extract the component.
        std::vector<int> vmap(core.vertex_count(), -1);
        int nv = 0;
        for (int v = 0; v < core.vertex_count(); ++v)
            if (comp[v] == c) vmap[v] = nv++;
        std::vector<int> tails, heads, iota_old;
        std::vector<int> edge_ids;
        std::vector<int> edge_new(core.dir_edge_count(), -1);
        for (int e = 0; e < core.dir_edge_count(); ++e)
            if (comp[core.tail(e)] == c) {
                edge_new[e] = static_cast<int>(edge_ids.size());
                edge_ids.push_back(e);
                tails.push_back(vmap[core.tail(e)]);
                heads.push_back(vmap[core.head(e)]);
            }
        std::vector<int> iota(edge_ids.size());
        for (size_t i = 0; i < edge_ids.size(); ++i) iota[i] = edge_new[core.iota(edge_ids[i])];
        Graph part(nv, std::move(tails), std::move(heads), std::move(iota));

        // Subgraph monotonicity: if mu1 of the whole component misses nu, no
        // subgraph can reach it.
        double comp_mu1 = mu1(part);
        if (comp_mu1 < nu) continue;
        if (part.order() < r) {
            report.found = true;
            report.witness = part;
            report.witness_mu1 = comp_mu1;
            report.witness_order = part.order();
            return report;
        }

        if (part.edge_count() > 64) {
            report.search_budget_exhausted = true;
            continue;
        }
        std::vector<int> reps = part.orbit_reps();
        int orbit_count = static_cast<int>(reps.size());
        std::vector<int> orbit = part.orbit_index();
        long budget_edges = std::min<long>(edge_budget, orbit_count);
        if (budget_edges < orbit_count) report.search_budget_exhausted = true;

        // BFS over connected edge subsets with dedup by orbit bitmask.
        std::set<std::uint64_t> seen;
        std::vector<std::uint64_t> frontier;
        for (int o = 0; o < orbit_count; ++o) {
            std::uint64_t m = 1ULL << o;
            seen.insert(m);
            frontier.push_back(m);
        }
        long examined = 0;
        auto test_candidate = [&](std::uint64_t mask) -> bool {
            // Build the subgraph on the chosen orbits, prune, then test.
            GraphBuilder sb(part.vertex_count());
            for (int o = 0; o < orbit_count; ++o) {
                if (!(mask >> o & 1)) continue;
                int e = reps[o];
                if (part.is_half_loop(e))
                    sb.add_half_loop(part.tail(e));
                else
                    sb.add_edge(part.tail(e), part.head(e));
            }
            Graph candidate = prune(sb.build()).graph;
            if (candidate.empty() || !candidate.connected() || candidate.order() >= r) return false;
            double m1 = mu1(candidate);
            if (m1 >= nu) {
                report.found = true;
                report.witness = candidate;
                report.witness_mu1 = m1;
                report.witness_order = candidate.order();
                return true;
            }
            return false;
        };

        while (!frontier.empty()) {
            std::vector<std::uint64_t> next;
            for (std::uint64_t mask : frontier) {
                if (++examined > candidate_cap) {
                    report.search_budget_exhausted = true;
                    next.clear();
                    frontier.clear();
                    break;
                }
                if (test_candidate(mask)) return report;
                if (__builtin_popcountll(mask) >= budget_edges) continue;
                // Grow by any orbit incident to the current vertex set.
                for (int o = 0; o < orbit_count; ++o) {
                    if (mask >> o & 1) continue;
                    std::uint64_t grown = mask | (1ULL << o);
                    if (seen.count(grown)) continue;
                    // Incidence test: the new orbit touches a vertex already used.
                    bool touches = false;
                    int e1 = reps[o];
                    for (int oo = 0; oo < orbit_count && !touches; ++oo) {
                        if (!(mask >> oo & 1)) continue;
                        int e2 = reps[oo];
                        touches = part.tail(e1) == part.tail(e2) || part.tail(e1) == part.head(e2) ||
                                  part.head(e1) == part.tail(e2) || part.head(e1) == part.head(e2);
                    }
                    if (!touches) continue;
                    seen.insert(grown);
                    next.push_back(grown);
                }
            }
            frontier = std::move(next);
        }
    }
    return report;
}

std::vector<double> push_forward(const BGraph& pi, const std::vector<double>& f) {
    pi.validate();
    require(static_cast<int>(f.size()) == pi.total.vertex_count(), "push_forward: size mismatch");
    require(is_etale(pi), "push_forward: morphism is not a covering (not even etale)");
    for (int v = 0; v < pi.total.vertex_count(); ++v)
        require(pi.total.degree(v) == pi.base.degree(pi.vertex_map[v]),
                "push_forward: morphism is not a covering (star not full)");
    std::vector<double> out(pi.base.vertex_count(), 0.0);
    for (int v = 0; v < pi.total.vertex_count(); ++v) out[pi.vertex_map[v]] += f[v];
    return out;
}

std::vector<FundamentalRow> fundamental_subgraph_experiment(const Graph& base, const BGraph& psi,
                                                            const std::vector<int>& n_grid, const ModelSpec& spec,
                                                            long samples_per_n, long rejection_budget, double gap,
                                                            bool condition, int threads) {
    require(samples_per_n >= 1, "fundamental_subgraph_experiment: need samples");
    int d = base.degree(0);
    for (int v = 0; v < base.vertex_count(); ++v)
        require(base.degree(v) == d, "fundamental_subgraph_experiment: base must be regular");
    double lambda = tree_radius(psi.total, d);

    Matrix ab = Matrix::from_row_major(base.vertex_count(), base.vertex_count(), adjacency_matrix(base));
    EigenDecomposition base_eigen = symmetric_eigen(ab);

    std::vector<FundamentalRow> rows;
    for (int n : n_grid) {
        FundamentalRow row;
        row.n = n;
        row.lambda = lambda;
        row.conditioned = condition;

        std::vector<double> max_new(samples_per_n, 0.0);
        std::vector<long> attempts(samples_per_n, 0);
        std::vector<char> ok(samples_per_n, 0);
        parallel_for(samples_per_n, threads, [&](long i) {
            // Substream per accepted sample: attempt t of sample i uses
            // trial index i * budget + t, disjoint across samples.
            for (long t = 0; t < rejection_budget; ++t) {
                ++attempts[i];
                CoordCover cover = sample_cover(base, n, spec, static_cast<std::uint64_t>(i) * rejection_budget + t);
                BGraph realized = realize(cover);
                if (condition && count_embeddings(psi, realized) == 0) continue;
                ExtremeEigenvalues ext = extreme_new_adjacency(realized.total, realized.vertex_map, base_eigen, d,
                                                               derive_seed(spec.seed, i, t));
                max_new[i] = ext.max;
                ok[i] = 1;
                return;
            }
        });

        double sum = 0.0;
        long above = 0;
        for (long i = 0; i < samples_per_n; ++i) {
            row.attempts += attempts[i];
            if (!ok[i]) continue;
            ++row.accepted;
            sum += max_new[i];
            if (max_new[i] >= lambda - gap) ++above;
        }
        if (row.accepted > 0) {
            row.mean_max_new = sum / row.accepted;
            row.frac_above = static_cast<double>(above) / row.accepted;
        }
        if (condition && row.accepted < samples_per_n)
            fail_budget("fundamental_subgraph_experiment: rejection budget exhausted");
        rows.push_back(row);
    }
    return rows;
}

}  // namespace cspec
