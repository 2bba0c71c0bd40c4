#include "walks.hpp"

#include <algorithm>

#include "errors.hpp"

namespace cspec {

int Walk::vertex_at(int j) const {
    require(host != nullptr, "Walk: no host graph");
    if (j == 0) return start;
    return host->head(edges[j - 1]);
}

void Walk::validate() const {
    require(host != nullptr, "Walk: no host graph");
    require(start >= 0 && start < host->vertex_count(), "Walk: start out of range");
    int v = start;
    for (int e : edges) {
        require(e >= 0 && e < host->dir_edge_count(), "Walk: edge out of range");
        require(host->tail(e) == v, "Walk: broken vertex/edge chain");
        v = host->head(e);
    }
}

bool Walk::closed() const { return !edges.empty() && host->head(edges.back()) == start; }

bool Walk::non_backtracking() const {
    for (size_t i = 0; i + 1 < edges.size(); ++i)
        if (host->iota(edges[i]) == edges[i + 1]) return false;
    return true;
}

bool Walk::snbc() const { return closed() && non_backtracking() && host->iota(edges.back()) != edges.front(); }

namespace {

struct SnbcDfs {
    const Graph* g;
    int k;
    long long budget;
    long long expansions = 0;
    const std::function<void(const Walk&)>* fn;  // may be null: counting only
    long long count = 0;
    std::vector<int> stack;

    void charge() {
        if (++expansions > budget) fail_budget("snbc enumeration budget exceeded");
    }

    void run() {
        for (int e = 0; e < g->dir_edge_count(); ++e) {
            stack.assign(1, e);
            extend();
        }
    }

    void extend() {
        charge();
        int depth = static_cast<int>(stack.size());
        int last = stack.back();
        if (depth == k) {
            int first = stack.front();
            if (g->head(last) == g->tail(first) && g->iota(last) != first) {
                ++count;
                if (fn) {
                    Walk w;
                    w.host = g;
                    w.start = g->tail(first);
                    w.edges = stack;
                    (*fn)(w);
                }
            }
            return;
        }
        int v = g->head(last);
        for (const int* it = g->out_begin(v); it != g->out_end(v); ++it) {
            if (*it == g->iota(last)) continue;
            stack.push_back(*it);
            extend();
            stack.pop_back();
        }
    }
};

}  // namespace

void for_each_snbc(const Graph& g, int k, long long budget, const std::function<void(const Walk&)>& fn) {
    require(k >= 1, "for_each_snbc: k must be positive");
    SnbcDfs dfs;
    dfs.g = &g;
    dfs.k = k;
    dfs.budget = budget;
    dfs.fn = &fn;
    dfs.run();
}

std::vector<Walk> enumerate_snbc(const Graph& g, int k, long long budget) {
    std::vector<Walk> out;
    for_each_snbc(g, k, budget, [&](const Walk& w) { out.push_back(w); });
    return out;
}

long long hashimoto_trace(const Graph& g, int k, long long budget) {
    require(k >= 1, "hashimoto_trace: k must be positive");
    SnbcDfs dfs;
    dfs.g = &g;
    dfs.k = k;
    dfs.budget = budget;
    dfs.fn = nullptr;
    dfs.run();
    return dfs.count;
}

std::vector<long long> hashimoto_traces(const Graph& g, int k_max, long long budget) {
    std::vector<long long> out;
    out.reserve(k_max);
    for (int k = 1; k <= k_max; ++k) out.push_back(hashimoto_trace(g, k, budget));
    return out;
}

VisitedSubgraph visited_subgraph_ordered(const Walk& w) {
    w.validate();
    const Graph& g = *w.host;
    VisitedSubgraph out;
    std::vector<int> vertex_new(g.vertex_count(), -1);
    std::vector<int> edge_new(g.dir_edge_count(), -1);
    std::vector<int> tails, heads, iota;

    auto see_vertex = [&](int hv) {
        if (vertex_new[hv] == -1) {
            vertex_new[hv] = static_cast<int>(out.host_vertex.size());
            out.host_vertex.push_back(hv);
        }
        return vertex_new[hv];
    };

    see_vertex(w.start);
    for (int he : w.edges) {
        int tv = see_vertex(g.tail(he));
        int hv = see_vertex(g.head(he));
        if (edge_new[he] == -1) {
            int id = static_cast<int>(out.host_edge.size());
            edge_new[he] = id;
            out.host_edge.push_back(he);
            tails.push_back(tv);
            heads.push_back(hv);
            out.ordered.oriented_edges.push_back(id);
            if (g.iota(he) == he) {
                iota.push_back(id);
            } else {
                edge_new[g.iota(he)] = id + 1;
                out.host_edge.push_back(g.iota(he));
                tails.push_back(hv);
                heads.push_back(tv);
                iota.push_back(id + 1);
                iota.push_back(id);
            }
        }
    }
    out.ordered.graph = Graph(static_cast<int>(out.host_vertex.size()), std::move(tails), std::move(heads), std::move(iota));
    return out;
}

WalkRecord classify_steps(const Walk& base_walk, int i0, const CoordCover& cover) {
    base_walk.validate();
    require(base_walk.host->vertex_count() == cover.base.vertex_count() &&
                base_walk.host->dir_edge_count() == cover.base.dir_edge_count(),
            "classify_steps: walk host is not the cover base");
    require(i0 >= 0 && i0 < cover.degree, "classify_steps: fibre index out of range");
    const Graph& b = cover.base;
    const int n = cover.degree;

    WalkRecord record;
    record.fibre_trajectory.push_back(i0);
    record.orders.push_back(-1);  // gamma_0 is a single vertex

    // Visited lifted vertices (v, i) and lifted edge orbits keyed by their
    // minimal directed encoding e * n + i.
    std::vector<char> vertex_seen(static_cast<size_t>(b.vertex_count()) * n, 0);
    std::vector<char> edge_seen(static_cast<size_t>(b.dir_edge_count()) * n, 0);
    vertex_seen[static_cast<size_t>(base_walk.start) * n + i0] = 1;

    int vertices = 1, orbits = 0;
    int i = i0;
    for (int e : base_walk.edges) {
        int j = cover.sigma[e][i];
        long enc = static_cast<long>(e) * n + i;
        long partner = static_cast<long>(b.iota(e)) * n + j;
        long key = std::min(enc, partner);
        int head_vertex = b.head(e);
        size_t vkey = static_cast<size_t>(head_vertex) * n + j;

        if (edge_seen[key]) {
            record.classes.push_back(StepClass::Forced);
        } else {
            edge_seen[key] = 1;
            ++orbits;
            if (vertex_seen[vkey]) {
                record.classes.push_back(StepClass::Coincidence);
                ++record.coincidences;
            } else {
                vertex_seen[vkey] = 1;
                ++vertices;
                record.classes.push_back(StepClass::New);
            }
        }
        i = j;
        record.fibre_trajectory.push_back(i);
        record.orders.push_back(orbits - vertices);
    }
    record.closed = (i == i0);
    return record;
}

std::vector<int> bead_vertices(const Graph& g, const std::vector<int>& keep) {
    std::vector<char> kept(g.vertex_count(), 0);
    for (int v : keep) kept[v] = 1;
    std::vector<int> beads;
    for (int v = 0; v < g.vertex_count(); ++v) {
        if (kept[v] || g.degree(v) != 2) continue;
        bool self_loop = false;
        for (const int* it = g.out_begin(v); it != g.out_end(v); ++it)
            if (g.head(*it) == v) self_loop = true;
        if (!self_loop) beads.push_back(v);
    }
    return beads;
}

HomotopyData suppress_beads(const OrderedGraph& s, const std::vector<int>& beads) {
    const Graph& g = s.graph;
    std::vector<char> is_bead(g.vertex_count(), 0);
    for (int v : beads) {
        require(v >= 0 && v < g.vertex_count(), "suppress_beads: vertex out of range");
        require(g.degree(v) == 2, "suppress_beads: vertex is not a bead (degree != 2)");
        for (const int* it = g.out_begin(v); it != g.out_end(v); ++it)
            require(g.head(*it) != v, "suppress_beads: vertex is not a bead (self-loop)");
        is_bead[v] = 1;
    }

    HomotopyData out;
    out.suppressed = beads;
    std::vector<int> vertex_new(g.vertex_count(), -1);
    for (int v = 0; v < g.vertex_count(); ++v)
        if (!is_bead[v]) {
            vertex_new[v] = static_cast<int>(out.vertex_ids.size());
            out.vertex_ids.push_back(v);
        }

    std::vector<int> orbit = g.orbit_index();
    std::vector<int> orbit_rank(g.edge_count(), -1);
    for (size_t r = 0; r < s.oriented_edges.size(); ++r) orbit_rank[orbit[s.oriented_edges[r]]] = static_cast<int>(r);

    // Collect beaded paths starting from non-bead vertices.
    struct PathRec {
        std::vector<int> edges;  // s dir edges along the path
        int min_rank;
        bool min_rank_forward;  // true if the lowest-rank orbit is traversed in its oriented direction
    };
    std::vector<PathRec> paths;
    std::vector<char> consumed(g.dir_edge_count(), 0);
    for (int v = 0; v < g.vertex_count(); ++v) {
        if (is_bead[v]) continue;
        for (const int* it = g.out_begin(v); it != g.out_end(v); ++it) {
            if (consumed[*it]) continue;
            PathRec rec;
            rec.min_rank = orbit_rank[orbit[*it]];
            rec.min_rank_forward = (s.oriented_edges[rec.min_rank] == *it);
            int e = *it;
            consumed[e] = 1;
            consumed[g.iota(e)] = 1;
            rec.edges.push_back(e);
            while (is_bead[g.head(e)]) {
                int bead = g.head(e);
                int next = -1;
                for (const int* jt = g.out_begin(bead); jt != g.out_end(bead); ++jt)
                    if (*jt != g.iota(e)) next = *jt;
                require(next != -1, "suppress_beads: internal bead walk failure");
                e = next;
                consumed[e] = 1;
                consumed[g.iota(e)] = 1;
                int r = orbit_rank[orbit[e]];
                if (r < rec.min_rank) {
                    rec.min_rank = r;
                    rec.min_rank_forward = (s.oriented_edges[r] == e);
                }
                rec.edges.push_back(e);
            }
            paths.push_back(std::move(rec));
        }
    }

    // A component consisting entirely of beads never reaches the loop above
    // and leaves its edges unconsumed.
    for (int e = 0; e < g.dir_edge_count(); ++e)
        if (!consumed[e]) fail_invalid("suppress_beads: improper bead set (a full component of beads)");

    // Each orbit of beaded paths was collected exactly once (consuming both
    // edge directions); flip it if its lowest-rank orbit was traversed
    // against that orbit's orientation, then rank by the lowest rank.
    for (PathRec& rec : paths) {
        if (!rec.min_rank_forward) {
            std::vector<int> reversed(rec.edges.size());
            for (size_t t = 0; t < rec.edges.size(); ++t)
                reversed[t] = g.iota(rec.edges[rec.edges.size() - 1 - t]);
            rec.edges = std::move(reversed);
        }
    }
    std::sort(paths.begin(), paths.end(), [](const PathRec& a, const PathRec& b) { return a.min_rank < b.min_rank; });

    std::vector<int> tails, heads, iota;
    for (const PathRec& rec : paths) {
        int id = static_cast<int>(tails.size());
        int tv = vertex_new[g.tail(rec.edges.front())];
        int hv = vertex_new[g.head(rec.edges.back())];
        bool half = rec.edges.size() == 1 && g.is_half_loop(rec.edges.front());
        tails.push_back(tv);
        heads.push_back(hv);
        out.beaded_paths.push_back(rec.edges);
        if (half) {
            iota.push_back(id);
        } else {
            tails.push_back(hv);
            heads.push_back(tv);
            iota.push_back(id + 1);
            iota.push_back(id);
            std::vector<int> backward(rec.edges.size());
            for (size_t t = 0; t < rec.edges.size(); ++t)
                backward[t] = g.iota(rec.edges[rec.edges.size() - 1 - t]);
            out.beaded_paths.push_back(std::move(backward));
        }
        out.reduction.oriented_edges.push_back(id);
        out.edge_lengths.push_back(static_cast<int>(rec.edges.size()));
    }
    out.reduction.graph =
        Graph(static_cast<int>(out.vertex_ids.size()), std::move(tails), std::move(heads), std::move(iota));
    return out;
}

OrderedGraph vlg(const OrderedGraph& t, const std::vector<int>& edge_lengths) {
    const Graph& g = t.graph;
    require(static_cast<int>(edge_lengths.size()) == g.edge_count(), "vlg: need one length per orbit");
    for (int k : edge_lengths) require(k >= 1, "vlg: lengths must be positive");

    std::vector<int> tails, heads, iota;
    std::vector<int> oriented;
    int vertices = g.vertex_count();

    auto push_whole = [&](int u, int v) {
        int id = static_cast<int>(tails.size());
        tails.push_back(u);
        heads.push_back(v);
        tails.push_back(v);
        heads.push_back(u);
        iota.push_back(id + 1);
        iota.push_back(id);
        oriented.push_back(id);  // oriented along the glued path
    };

    for (size_t r = 0; r < t.oriented_edges.size(); ++r) {
        int e = t.oriented_edges[r];
        int k = edge_lengths[r];
        if (g.is_half_loop(e)) {
            require(k == 1, "vlg: half-loop orbits only admit length 1");
            int id = static_cast<int>(tails.size());
            tails.push_back(g.tail(e));
            heads.push_back(g.tail(e));
            iota.push_back(id);
            oriented.push_back(id);
            continue;
        }
        int prev = g.tail(e);
        for (int step = 0; step + 1 < k; ++step) {
            int mid = vertices++;
            push_whole(prev, mid);
            prev = mid;
        }
        push_whole(prev, g.head(e));
    }

    OrderedGraph out;
    out.graph = Graph(vertices, std::move(tails), std::move(heads), std::move(iota));
    out.oriented_edges = std::move(oriented);
    return out;
}

Wording induced_wording(const Walk& w, const BGraph& host) {
    require(w.host == &host.total, "induced_wording: walk host is not the B-graph total");
    require(w.non_backtracking(), "induced_wording: walk must be non-backtracking");

    VisitedSubgraph visu = visited_subgraph_ordered(w);
    std::vector<int> keep;
    // Walk endpoints keep their beads; ViSu vertex 0 is the start and the
    // final vertex is host-mapped back to a ViSu id.
    keep.push_back(0);
    int final_host = w.vertex_at(w.length());
    for (size_t v = 0; v < visu.host_vertex.size(); ++v)
        if (visu.host_vertex[v] == final_host) keep.push_back(static_cast<int>(v));

    Wording out;
    out.homotopy = suppress_beads(visu.ordered, bead_vertices(visu.ordered.graph, keep));
    out.words.resize(out.homotopy.beaded_paths.size());
    for (size_t d = 0; d < out.homotopy.beaded_paths.size(); ++d) {
        for (int sub_edge : out.homotopy.beaded_paths[d])
            out.words[d].push_back(host.edge_map[visu.host_edge[sub_edge]]);
    }
    return out;
}

std::map<int, long long> snbc_order_census(const CoordCover& c, int k, long long budget) {
    std::map<int, long long> census;
    // Lifting is a bijection between cover SNBC walks and pairs of a base
    // SNBC walk with a closed fibre trajectory, so the census never needs
    // the realized cover.
    for_each_snbc(c.base, k, budget, [&](const Walk& base_walk) {
        for (int i0 = 0; i0 < c.degree; ++i0) {
            WalkRecord record = classify_steps(base_walk, i0, c);
            if (record.closed) ++census[record.coincidences - 1];
        }
    });
    return census;
}

std::map<int, long long> snbc_order_census_realized(const BGraph& cover, int k, long long budget) {
    std::map<int, long long> census;
    for_each_snbc(cover.total, k, budget, [&](const Walk& w) {
        VisitedSubgraph visu = visited_subgraph_ordered(w);
        ++census[visu.ordered.graph.order()];
    });
    return census;
}

}  // namespace cspec
