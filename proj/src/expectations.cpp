#include "expectations.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "errors.hpp"
#include "parallel.hpp"

namespace cspec {

namespace {

// Per-base-orbit footprint of S: for half-loop base edges the factor is
// indexed by S-edge orbits (a whole S-edge is one matching constraint even
// though it has two directed edges over e); elsewhere the directed count
// over the orientation representative equals the orbit count.
struct OrbitFootprint {
    int rep = -1;
    int directed_over_rep = 0;  // a(e) for the representative direction
    int half_loops_over = 0;    // S half-loops over a half base edge
    int whole_orbits_over = 0;  // S whole-edge orbits over the base orbit
};

std::vector<OrbitFootprint> footprints(const BGraph& s) {
    std::vector<int> orbit_of = s.base.orbit_index();
    std::vector<OrbitFootprint> out(s.base.edge_count());
    for (int rep : s.base.orbit_reps()) out[orbit_of[rep]].rep = rep;
    for (int f = 0; f < s.total.dir_edge_count(); ++f) {
        int be = s.edge_map[f];
        OrbitFootprint& fp = out[orbit_of[be]];
        if (be == fp.rep) ++fp.directed_over_rep;
        if (s.total.iota(f) == f)
            ++fp.half_loops_over;
        else if (f < s.total.iota(f))
            ++fp.whole_orbits_over;
    }
    return out;
}

enum class FactorKind { Permutation, CyclicLoop, InvolutionEven, InvolutionOdd };

FactorKind factor_kind(const Graph& base, int rep, ModelKind model) {
    if (base.is_half_loop(rep)) return (model_parity(model) == 0) ? FactorKind::InvolutionEven : FactorKind::InvolutionOdd;
    if (base.is_whole_loop(rep) && model_is_cyclic(model)) return FactorKind::CyclicLoop;
    return FactorKind::Permutation;
}

}  // namespace

bool cyclic_feasible(const BGraph& s, int base_dir_edge) {
    const Graph& base = s.base;
    require(base.is_whole_loop(base_dir_edge), "cyclic_feasible: not a whole-loop");
    // Arcs of the partial injection on the fibre over the loop vertex.
    std::vector<int> next(s.total.vertex_count(), -1);
    for (int f = 0; f < s.total.dir_edge_count(); ++f)
        if (s.edge_map[f] == base_dir_edge) next[s.total.tail(f)] = s.total.head(f);
    // A functional partial map has a cycle iff following it from some vertex
    // returns to a visited one within the chain.
    std::vector<int> state(s.total.vertex_count(), 0);  // 0 new, 1 active, 2 done
    for (int v = 0; v < s.total.vertex_count(); ++v) {
        if (state[v] != 0) continue;
        int u = v;
        std::vector<int> chain;
        while (u != -1 && state[u] == 0) {
            state[u] = 1;
            chain.push_back(u);
            u = next[u];
        }
        if (u != -1 && state[u] == 1) return false;  // closed a cycle
        for (int w : chain) state[w] = 2;
    }
    return true;
}

Rational expected_count(const BGraph& s, long n, const ModelSpec& spec) {
    s.validate();
    check_model_compatible(s.base, static_cast<int>(n), spec.kind);
    require(s.total.vertex_count() <= n, "expected_count: #V_S must be at most n");
    require(s.total.edge_count() <= n, "expected_count: #E_S must be at most n");

    if (!is_etale(s)) return Rational(0);

    Rational probability(1);
    for (const OrbitFootprint& fp : footprints(s)) {
        if (fp.rep < 0) continue;
        switch (factor_kind(s.base, fp.rep, spec.kind)) {
            case FactorKind::Permutation:
                probability /= falling_factorial(n, fp.directed_over_rep);
                break;
            case FactorKind::CyclicLoop: {
                if (fp.directed_over_rep == 0) break;
                if (fp.directed_over_rep == static_cast<int>(n)) {
                    // n arcs on at most n fibre points form a total injection:
                    // a full cycle extends it only if it already is one n-cycle.
                    std::vector<int> next(s.total.vertex_count(), -1);
                    for (int f = 0; f < s.total.dir_edge_count(); ++f)
                        if (s.edge_map[f] == fp.rep) next[s.total.tail(f)] = s.total.head(f);
                    int at = s.base.tail(fp.rep);
                    // Arcs live on the fibre over the loop vertex; pick any one.
                    for (int v = 0; v < s.total.vertex_count(); ++v)
                        if (next[v] != -1) {
                            at = v;
                            break;
                        }
                    long steps = 0;
                    int walker = at;
                    do {
                        walker = next[walker];
                        ++steps;
                    } while (walker != -1 && walker != at && steps <= n);
                    if (walker != at || steps != n) return Rational(0);
                    probability /= falling_factorial(n - 1, static_cast<int>(n) - 1);
                } else {
                    if (!cyclic_feasible(s, fp.rep)) return Rational(0);
                    probability /= step_product(n - 1, fp.directed_over_rep, 1);
                }
                break;
            }
            case FactorKind::InvolutionEven:
                if (fp.half_loops_over > 0) return Rational(0);  // no fixed points exist
                probability /= step_product(n - 1, fp.whole_orbits_over, 2);
                break;
            case FactorKind::InvolutionOdd:
                if (fp.half_loops_over > 1) return Rational(0);  // only one fixed point exists
                probability /= step_product(n, fp.whole_orbits_over + fp.half_loops_over, 2);
                break;
        }
    }

    Rational vertex_ways(1);
    FibreCounts fc = fibre_counts(s);
    for (int v = 0; v < s.base.vertex_count(); ++v) vertex_ways *= falling_factorial(n, fc.b[v]);
    return vertex_ways * probability;
}

namespace {

bool occurs_in_model(const BGraph& s, ModelKind kind) {
    if (!is_etale(s)) return false;
    for (const OrbitFootprint& fp : footprints(s)) {
        if (fp.rep < 0) continue;
        switch (factor_kind(s.base, fp.rep, kind)) {
            case FactorKind::Permutation:
                break;
            case FactorKind::CyclicLoop:
                if (fp.directed_over_rep > 0 && !cyclic_feasible(s, fp.rep)) return false;
                break;
            case FactorKind::InvolutionEven:
                if (fp.half_loops_over > 0) return false;
                break;
            case FactorKind::InvolutionOdd:
                if (fp.half_loops_over > 1) return false;
                break;
        }
    }
    return true;
}

}  // namespace

Rational ExpansionSeries::evaluate(long n) const {
    Rational x = Rational(1) / Rational(n);
    Rational acc(0);
    for (int i = static_cast<int>(coeffs.size()) - 1; i >= 0; --i) acc = acc * x + coeffs[i];
    Rational scale(1);
    for (int i = 0; i < std::abs(leading_power); ++i) scale *= Rational(n);
    if (leading_power >= 0) return Rational(acc * scale);
    return Rational(acc / scale);
}

ExpansionSeries expansion_series(const BGraph& s, const ModelSpec& spec, int order) {
    s.validate();
    require(order >= 1, "expansion_series: order must be positive");
    require(occurs_in_model(s, spec.kind), "expansion_series: S does not occur in this model");

    // Every factor is (power of n) times a product of series in x = 1/n
    // with unit constant term, so the leading coefficient is exactly 1.
    RationalSeries series = RationalSeries::one(order);
    int power = 0;

    FibreCounts fc = fibre_counts(s);
    for (int v = 0; v < s.base.vertex_count(); ++v) {
        power += fc.b[v];
        for (int j = 1; j < fc.b[v]; ++j) series = series * RationalSeries::linear(Rational(j), order);
    }

    for (const OrbitFootprint& fp : footprints(s)) {
        if (fp.rep < 0) continue;
        switch (factor_kind(s.base, fp.rep, spec.kind)) {
            case FactorKind::Permutation:
                power -= fp.directed_over_rep;
                for (int j = 1; j < fp.directed_over_rep; ++j)
                    series = series * RationalSeries::geometric(Rational(j), order);
                break;
            case FactorKind::CyclicLoop:
                power -= fp.directed_over_rep;
                for (int t = 1; t <= fp.directed_over_rep; ++t)
                    series = series * RationalSeries::geometric(Rational(t), order);
                break;
            case FactorKind::InvolutionEven:
                power -= fp.whole_orbits_over;
                for (int t = 0; t < fp.whole_orbits_over; ++t)
                    series = series * RationalSeries::geometric(Rational(2 * t + 1), order);
                break;
            case FactorKind::InvolutionOdd: {
                int constraints = fp.whole_orbits_over + fp.half_loops_over;
                power -= constraints;
                for (int t = 1; t < constraints; ++t)
                    series = series * RationalSeries::geometric(Rational(2 * t), order);
                break;
            }
        }
    }

    ExpansionSeries out;
    out.leading_power = power;
    out.truncation_order = order;
    out.coeffs.resize(order);
    for (int i = 0; i < order; ++i) out.coeffs[i] = series[i];
    return out;
}

MonteCarloEstimate monte_carlo_expected_count(const BGraph& s, int n, const ModelSpec& spec, long trials,
                                              int threads) {
    return monte_carlo_counts({&s}, n, spec, trials, threads).front();
}

std::vector<MonteCarloEstimate> monte_carlo_counts(const std::vector<const BGraph*>& shapes, int n,
                                                   const ModelSpec& spec, long trials, int threads,
                                                   std::uint64_t trial_offset) {
    require(trials >= 1, "monte_carlo_counts: need at least one trial");
    require(!shapes.empty(), "monte_carlo_counts: no shapes");
    const Graph& base = shapes.front()->base;
    const size_t m = shapes.size();

    std::vector<std::vector<int>> orders(m);
    for (size_t i = 0; i < m; ++i) orders[i] = EmbeddingCounter::search_order(*shapes[i]);

    std::vector<long long> counts(static_cast<size_t>(trials) * m);
    parallel_for(trials, threads, [&](long t) {
        BGraph cover = realize(sample_cover(base, n, spec, trial_offset + static_cast<std::uint64_t>(t)));
        EmbeddingCounter counter;
        counter.attach_host(cover);
        for (size_t i = 0; i < m; ++i) counts[static_cast<size_t>(t) * m + i] = counter.count(*shapes[i], orders[i]);
    });

    // Deterministic accumulation in trial order.
    std::vector<MonteCarloEstimate> out(m);
    for (size_t i = 0; i < m; ++i) {
        double mean = 0.0, m2 = 0.0;
        for (long t = 0; t < trials; ++t) {
            double v = static_cast<double>(counts[static_cast<size_t>(t) * m + i]);
            double delta = v - mean;
            mean += delta / (t + 1);
            m2 += delta * (v - mean);
        }
        out[i].mean = mean;
        out[i].trials = trials;
        out[i].stderr_of_mean = trials > 1 ? std::sqrt(m2 / (trials - 1) / trials) : 0.0;
    }
    return out;
}

std::vector<std::vector<int>> all_permutations(int n) {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::vector<int>> out;
    do out.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    return out;
}

std::vector<std::vector<int>> all_full_cycles(int n) {
    std::vector<std::vector<int>> out;
    for (const auto& p : all_permutations(n)) {
        int steps = 0, at = 0;
        do {
            at = p[at];
            ++steps;
        } while (at != 0 && steps <= n);
        if (steps == n) out.push_back(p);
    }
    return out;
}

namespace {

void matchings_rec(std::vector<int>& sigma, std::vector<int>& free_ids, std::vector<std::vector<int>>& out) {
    if (free_ids.empty()) {
        out.push_back(sigma);
        return;
    }
    int a = free_ids.front();
    for (size_t j = 1; j < free_ids.size(); ++j) {
        int b = free_ids[j];
        sigma[a] = b;
        sigma[b] = a;
        std::vector<int> rest;
        for (size_t t = 1; t < free_ids.size(); ++t)
            if (free_ids[t] != b) rest.push_back(free_ids[t]);
        matchings_rec(sigma, rest, out);
        sigma[a] = sigma[b] = -1;
    }
}

}  // namespace

std::vector<std::vector<int>> all_perfect_matchings(int n) {
    require(n % 2 == 0, "all_perfect_matchings: n must be even");
    std::vector<std::vector<int>> out;
    std::vector<int> sigma(n, -1), ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    matchings_rec(sigma, ids, out);
    return out;
}

std::vector<std::vector<int>> all_near_perfect_matchings(int n) {
    require(n % 2 == 1, "all_near_perfect_matchings: n must be odd");
    std::vector<std::vector<int>> out;
    for (int fixed = 0; fixed < n; ++fixed) {
        std::vector<int> sigma(n, -1), ids;
        sigma[fixed] = fixed;
        for (int i = 0; i < n; ++i)
            if (i != fixed) ids.push_back(i);
        std::vector<std::vector<int>> partial;
        matchings_rec(sigma, ids, partial);
        for (auto& m : partial) out.push_back(std::move(m));
    }
    return out;
}

Rational exhaustive_expected_count(const BGraph& s, int n, ModelKind kind) {
    const Graph& base = s.base;
    check_model_compatible(base, n, kind);
    std::vector<int> reps = base.orbit_reps();

    std::vector<std::vector<std::vector<int>>> options;
    for (int rep : reps) {
        if (base.is_half_loop(rep))
            options.push_back(n % 2 == 0 ? all_perfect_matchings(n) : all_near_perfect_matchings(n));
        else if (base.is_whole_loop(rep) && model_is_cyclic(kind))
            options.push_back(all_full_cycles(n));
        else
            options.push_back(all_permutations(n));
    }

    CoordCover cover;
    cover.base = base;
    cover.degree = n;
    cover.sigma.assign(base.dir_edge_count(), {});

    BigInt total = 0;
    BigInt assignments = 0;
    std::vector<size_t> choice(reps.size(), 0);
    for (;;) {
        for (size_t r = 0; r < reps.size(); ++r) {
            const std::vector<int>& sigma = options[r][choice[r]];
            cover.sigma[reps[r]] = sigma;
            if (base.iota(reps[r]) != reps[r]) {
                std::vector<int> inverse(n);
                for (int i = 0; i < n; ++i) inverse[sigma[i]] = i;
                cover.sigma[base.iota(reps[r])] = std::move(inverse);
            }
        }
        total += count_embeddings(s, realize(cover));
        assignments += 1;

        size_t r = 0;
        while (r < reps.size() && ++choice[r] == options[r].size()) choice[r++] = 0;
        if (r == reps.size()) break;
    }
    return Rational(total, assignments);
}

namespace {

// One placement of S-edges over a single base orbit: arcs between fibre
// slots (partial injection), plus fixed points for half-loop bases.
struct OrbitPlacement {
    std::vector<std::pair<int, int>> arcs;  // tail slot -> head slot over the rep direction
    std::vector<int> fixed;                 // S half-loop slots (half base edges only)
};

void injections_rec(int tail_slots, int head_slots, int from, std::vector<char>& head_used,
                    std::vector<std::pair<int, int>>& current, std::vector<OrbitPlacement>& out, int max_arcs) {
    out.push_back({current, {}});
    if (static_cast<int>(current.size()) >= max_arcs) return;
    for (int t = from; t < tail_slots; ++t)
        for (int h = 0; h < head_slots; ++h) {
            if (head_used[h]) continue;
            head_used[h] = 1;
            current.emplace_back(t, h);
            injections_rec(tail_slots, head_slots, t + 1, head_used, current, out, max_arcs);
            current.pop_back();
            head_used[h] = 0;
        }
}

// All partial involutions on [slots]: disjoint pairs plus fixed points.
void involutions_rec(int slots, int from, std::vector<char>& used, OrbitPlacement& current,
                     std::vector<OrbitPlacement>& out, int max_constraints) {
    out.push_back(current);
    int constraints = static_cast<int>(current.arcs.size() + current.fixed.size());
    if (constraints >= max_constraints) return;
    for (int a = from; a < slots; ++a) {
        if (used[a]) continue;
        used[a] = 1;
        current.fixed.push_back(a);
        involutions_rec(slots, a + 1, used, current, out, max_constraints);
        current.fixed.pop_back();
        for (int b = a + 1; b < slots; ++b) {
            if (used[b]) continue;
            used[b] = 1;
            current.arcs.emplace_back(a, b);
            involutions_rec(slots, a + 1, used, current, out, max_constraints);
            current.arcs.pop_back();
            used[b] = 0;
        }
        used[a] = 0;
    }
}

std::string canonical_encoding(const BGraph& s, const std::vector<int>& fibre_sizes) {
    // Minimize the edge-list encoding over products of fibre permutations.
    const Graph& base = s.base;
    std::vector<std::vector<int>> fibre_members(base.vertex_count());
    for (int v = 0; v < s.total.vertex_count(); ++v) fibre_members[s.vertex_map[v]].push_back(v);

    std::vector<std::vector<std::vector<int>>> perms;
    for (int bv = 0; bv < base.vertex_count(); ++bv) perms.push_back(all_permutations(fibre_sizes[bv]));

    std::string best;
    std::vector<size_t> choice(base.vertex_count(), 0);
    std::vector<int> relabel(s.total.vertex_count());
    for (;;) {
        for (int bv = 0; bv < base.vertex_count(); ++bv) {
            const std::vector<int>& p = perms[bv][choice[bv]];
            for (size_t i = 0; i < fibre_members[bv].size(); ++i) relabel[fibre_members[bv][i]] = p[i];
        }
        std::vector<std::string> lines;
        for (int f = 0; f < s.total.dir_edge_count(); ++f) {
            if (f > s.total.iota(f)) continue;
            std::ostringstream line;
            int t = relabel[s.total.tail(f)], h = relabel[s.total.head(f)];
            int be = s.edge_map[f];
            bool half = s.total.iota(f) == f;
            // Normalize whole-edge direction towards the smaller encoding.
            std::ostringstream alt;
            line << be << ":" << t << ">" << h << (half ? "h" : "w");
            alt << s.base.iota(be) << ":" << h << ">" << t << (half ? "h" : "w");
            lines.push_back(std::min(line.str(), alt.str()));
        }
        std::sort(lines.begin(), lines.end());
        std::string enc;
        for (const std::string& l : lines) enc += l + ";";
        if (best.empty() || enc < best) best = enc;

        int bv = 0;
        while (bv < base.vertex_count() && ++choice[bv] == perms[bv].size()) choice[bv++] = 0;
        if (bv == base.vertex_count()) break;
    }
    return best;
}

}  // namespace

std::vector<EtaleShape> enumerate_etale_shapes(const Graph& base, int max_edges, ModelKind kind,
                                               bool occurring_only) {
    require(max_edges >= 1, "enumerate_etale_shapes: max_edges must be positive");
    std::vector<int> reps = base.orbit_reps();

    std::vector<EtaleShape> shapes;
    std::map<std::string, char> seen;
    std::vector<int> fibre_sizes(base.vertex_count(), 0);

    auto build_candidate = [&](const std::vector<std::vector<OrbitPlacement>>& placements,
                               const std::vector<size_t>& choice) {
        // Slot (bv, i) -> S vertex id.
        std::vector<int> slot_base;
        std::vector<int> offset(base.vertex_count() + 1, 0);
        for (int bv = 0; bv < base.vertex_count(); ++bv) {
            offset[bv + 1] = offset[bv] + fibre_sizes[bv];
            for (int i = 0; i < fibre_sizes[bv]; ++i) slot_base.push_back(bv);
        }
        int nv = offset[base.vertex_count()];

        std::vector<int> tails, heads, iota, emap;
        for (size_t r = 0; r < reps.size(); ++r) {
            const OrbitPlacement& p = placements[r][choice[r]];
            int rep = reps[r];
            int tail_off = offset[base.tail(rep)];
            int head_off = offset[base.head(rep)];
            for (auto [t, h] : p.arcs) {
                int id = static_cast<int>(tails.size());
                tails.push_back(tail_off + t);
                heads.push_back(head_off + h);
                tails.push_back(head_off + h);
                heads.push_back(tail_off + t);
                iota.push_back(id + 1);
                iota.push_back(id);
                emap.push_back(rep);
                emap.push_back(base.iota(rep));
            }
            for (int f : p.fixed) {
                int id = static_cast<int>(tails.size());
                tails.push_back(tail_off + f);
                heads.push_back(tail_off + f);
                iota.push_back(id);
                emap.push_back(rep);  // half base edge: iota(rep) == rep
            }
        }

        BGraph s;
        s.total = Graph(nv, std::move(tails), std::move(heads), std::move(iota));
        s.base = base;
        s.vertex_map = slot_base;
        s.edge_map = std::move(emap);
        s.validate();

        for (int v = 0; v < s.total.vertex_count(); ++v)
            if (s.total.degree(v) < 2) return;  // not pruned
        if (occurring_only && !occurs_in_model(s, kind)) return;

        std::string id = canonical_encoding(s, fibre_sizes);
        if (seen.emplace(id, 1).second) shapes.push_back({std::move(s), std::move(id)});
    };

    std::function<void(int, int)> fibres = [&](int bv, int used) {
        if (bv == base.vertex_count()) {
            if (used == 0) return;
            std::vector<std::vector<OrbitPlacement>> placements;
            for (int rep : reps) {
                std::vector<OrbitPlacement> opts;
                if (base.is_half_loop(rep)) {
                    std::vector<char> used_slots(fibre_sizes[base.tail(rep)], 0);
                    OrbitPlacement current;
                    involutions_rec(fibre_sizes[base.tail(rep)], 0, used_slots, current, opts, max_edges);
                } else {
                    std::vector<char> head_used(fibre_sizes[base.head(rep)], 0);
                    std::vector<std::pair<int, int>> current;
                    injections_rec(fibre_sizes[base.tail(rep)], fibre_sizes[base.head(rep)], 0, head_used, current,
                                   opts, max_edges);
                }
                placements.push_back(std::move(opts));
            }

            std::vector<size_t> choice(reps.size(), 0);
            for (;;) {
                int edge_total = 0;
                for (size_t r = 0; r < reps.size(); ++r) {
                    const OrbitPlacement& p = placements[r][choice[r]];
                    edge_total += static_cast<int>(p.arcs.size() + p.fixed.size());
                }
                if (edge_total >= 1 && edge_total <= max_edges) build_candidate(placements, choice);

                size_t r = 0;
                while (r < reps.size() && ++choice[r] == placements[r].size()) choice[r++] = 0;
                if (r == reps.size()) break;
            }
            return;
        }
        for (int b = 0; b + used <= max_edges; ++b) {
            fibre_sizes[bv] = b;
            fibres(bv + 1, used + b);
        }
        fibre_sizes[bv] = 0;
    };

    fibres(0, 0);
    return shapes;
}

}  // namespace cspec
