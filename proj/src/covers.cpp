#include "covers.hpp"

#include <algorithm>
#include <sstream>

#include "errors.hpp"
#include "rng.hpp"

namespace cspec {

bool model_is_cyclic(ModelKind kind) {
    return kind == ModelKind::Cyclic || kind == ModelKind::CyclicInvolutionEven ||
           kind == ModelKind::CyclicInvolutionOdd;
}

bool model_is_involution(ModelKind kind) {
    return kind == ModelKind::PermInvolutionEven || kind == ModelKind::PermInvolutionOdd ||
           kind == ModelKind::CyclicInvolutionEven || kind == ModelKind::CyclicInvolutionOdd;
}

std::optional<int> model_parity(ModelKind kind) {
    switch (kind) {
        case ModelKind::PermInvolutionEven:
        case ModelKind::CyclicInvolutionEven:
            return 0;
        case ModelKind::PermInvolutionOdd:
        case ModelKind::CyclicInvolutionOdd:
            return 1;
        default:
            return std::nullopt;
    }
}

const char* model_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::Permutation: return "permutation";
        case ModelKind::PermInvolutionEven: return "perm-involution-even";
        case ModelKind::PermInvolutionOdd: return "perm-involution-odd";
        case ModelKind::Cyclic: return "cyclic";
        case ModelKind::CyclicInvolutionEven: return "cyclic-involution-even";
        case ModelKind::CyclicInvolutionOdd: return "cyclic-involution-odd";
    }
    return "unknown";
}

ModelKind parse_model(const std::string& name) {
    for (ModelKind kind : {ModelKind::Permutation, ModelKind::PermInvolutionEven, ModelKind::PermInvolutionOdd,
                           ModelKind::Cyclic, ModelKind::CyclicInvolutionEven, ModelKind::CyclicInvolutionOdd})
        if (name == model_name(kind)) return kind;
    fail_invalid("unknown model '" + name + "'");
}

void check_model_compatible(const Graph& base, int n, ModelKind kind) {
    require(n >= 1, "cover degree must be positive");
    if (!model_is_involution(kind))
        require(base.half_loop_count() == 0, std::string(model_name(kind)) + " model requires a base without half-loops");
    if (auto parity = model_parity(kind))
        require(n % 2 == *parity, std::string(model_name(kind)) + " model requires n with parity " + std::to_string(*parity));
}

void CoordCover::validate() const {
    const int m = base.dir_edge_count();
    require(degree >= 1, "CoordCover: degree must be positive");
    require(static_cast<int>(sigma.size()) == m, "CoordCover: sigma size mismatch");
    std::vector<char> seen(degree);
    for (int e = 0; e < m; ++e) {
        require(static_cast<int>(sigma[e].size()) == degree, "CoordCover: sigma[e] size mismatch");
        std::fill(seen.begin(), seen.end(), 0);
        for (int i : sigma[e]) {
            require(i >= 0 && i < degree && !seen[i], "CoordCover: sigma[e] is not a permutation");
            seen[i] = 1;
        }
        for (int i = 0; i < degree; ++i)
            require(sigma[base.iota(e)][sigma[e][i]] == i, "CoordCover: sigma(iota e) != sigma(e)^-1");
    }
}

void BGraph::validate() const {
    require(static_cast<int>(vertex_map.size()) == total.vertex_count(), "BGraph: vertex map size");
    require(static_cast<int>(edge_map.size()) == total.dir_edge_count(), "BGraph: edge map size");
    for (int v : vertex_map) require(v >= 0 && v < base.vertex_count(), "BGraph: vertex map out of range");
    for (int e = 0; e < total.dir_edge_count(); ++e) {
        int be = edge_map[e];
        require(be >= 0 && be < base.dir_edge_count(), "BGraph: edge map out of range");
        require(vertex_map[total.tail(e)] == base.tail(be), "BGraph: tails not intertwined");
        require(vertex_map[total.head(e)] == base.head(be), "BGraph: heads not intertwined");
        require(edge_map[total.iota(e)] == base.iota(be), "BGraph: involutions not intertwined");
    }
}

BGraph realize(const CoordCover& cover) {
    cover.validate();
    const Graph& b = cover.base;
    const int n = cover.degree;
    const int nv = b.vertex_count() * n;
    const int m = b.dir_edge_count();

    std::vector<int> tails(m * n), heads(m * n), iota(m * n);
    for (int e = 0; e < m; ++e)
        for (int i = 0; i < n; ++i) {
            int id = e * n + i;
            tails[id] = b.tail(e) * n + i;
            heads[id] = b.head(e) * n + cover.sigma[e][i];
            iota[id] = b.iota(e) * n + cover.sigma[e][i];
        }

    BGraph out;
    out.total = Graph(nv, std::move(tails), std::move(heads), std::move(iota));
    out.base = b;
    out.vertex_map.resize(nv);
    for (int v = 0; v < b.vertex_count(); ++v)
        for (int i = 0; i < n; ++i) out.vertex_map[v * n + i] = v;
    out.edge_map.resize(m * n);
    for (int e = 0; e < m; ++e)
        for (int i = 0; i < n; ++i) out.edge_map[e * n + i] = e;
    out.validate();
    return out;
}

FibreCounts fibre_counts(const BGraph& s) {
    FibreCounts out;
    out.a.assign(s.base.dir_edge_count(), 0);
    out.b.assign(s.base.vertex_count(), 0);
    for (int e : s.edge_map) ++out.a[e];
    for (int v : s.vertex_map) ++out.b[v];
    return out;
}

bool is_etale(const BGraph& s) {
    // Injectivity on each tail star (head stars follow by the involution).
    std::vector<char> seen(s.base.dir_edge_count(), 0);
    for (int v = 0; v < s.total.vertex_count(); ++v) {
        const int* begin = s.total.out_begin(v);
        const int* end = s.total.out_end(v);
        for (const int* it = begin; it != end; ++it)
            if (seen[s.edge_map[*it]]++) {
                for (const int* jt = begin; jt != end; ++jt) seen[s.edge_map[*jt]] = 0;
                return false;
            }
        for (const int* it = begin; it != end; ++it) seen[s.edge_map[*it]] = 0;
    }
    return true;
}

// Backtracking run state shared by count_embeddings and EmbeddingCounter.
// Host-vertex/edge usage is tracked with version stamps so successive
// counts skip re-clearing host-sized arrays.
struct EmbeddingCountRun {
    EmbeddingCounter* c;
    const BGraph* s;
    const BGraph* g;
    const std::vector<int>* order;
    bool stop_early;
    long long count = 0;

    bool used_vertex(int gv) const { return c->vertex_stamp_[gv] == c->version_; }
    bool used_edge(int eg) const { return c->edge_stamp_[eg] == c->version_; }

    bool bind_vertex(int sv, int gv, bool& fresh) {
        if (c->vmap_[sv] != -1) {
            fresh = false;
            return c->vmap_[sv] == gv;
        }
        if (used_vertex(gv)) return false;
        if (s->vertex_map[sv] != g->vertex_map[gv]) return false;
        c->vmap_[sv] = gv;
        c->vertex_stamp_[gv] = c->version_;
        fresh = true;
        return true;
    }
    void unbind_vertex(int sv) {
        c->vertex_stamp_[c->vmap_[sv]] = 0;
        c->vmap_[sv] = -1;
    }

    bool done() const { return stop_early && count > 0; }

    void place_edge(size_t k) {
        if (k == order->size()) {
            count += count_isolated_vertices();
            return;
        }
        int es = (*order)[k];
        int sv_tail = s->total.tail(es);

        if (c->vmap_[sv_tail] != -1) {
            int gv = c->vmap_[sv_tail];
            for (const int* it = g->total.out_begin(gv); it != g->total.out_end(gv) && !done(); ++it)
                try_edge(k, es, *it);
        } else {
            for (int gv : c->fibre_[s->vertex_map[sv_tail]]) {
                for (const int* it = g->total.out_begin(gv); it != g->total.out_end(gv) && !done(); ++it)
                    try_edge(k, es, *it);
                if (done()) break;
            }
        }
    }

    void try_edge(size_t k, int es, int eg) {
        if (used_edge(eg)) return;
        if (g->edge_map[eg] != s->edge_map[es]) return;
        if ((s->total.iota(es) == es) != (g->total.iota(eg) == eg)) return;

        bool fresh_tail = false, fresh_head = false;
        if (!bind_vertex(s->total.tail(es), g->total.tail(eg), fresh_tail)) return;
        if (!bind_vertex(s->total.head(es), g->total.head(eg), fresh_head)) {
            if (fresh_tail) unbind_vertex(s->total.tail(es));
            return;
        }

        c->edge_stamp_[eg] = c->version_;
        int eg_partner = g->total.iota(eg);
        bool whole = s->total.iota(es) != es;
        if (whole) c->edge_stamp_[eg_partner] = c->version_;

        place_edge(k + 1);

        if (whole) c->edge_stamp_[eg_partner] = 0;
        c->edge_stamp_[eg] = 0;
        if (fresh_head) unbind_vertex(s->total.head(es));
        if (fresh_tail) unbind_vertex(s->total.tail(es));
    }

    // Isolated s-vertices land on any unused fibre vertex; per base vertex
    // that is a falling factorial of choices.  Rare path: pruned shapes
    // have no isolated vertices, so usually this just returns 1.
    long long count_isolated_vertices() {
        long long ways = 1;
        std::vector<int> temp_bound;
        for (int sv = 0; sv < s->total.vertex_count() && ways > 0; ++sv) {
            if (c->vmap_[sv] != -1) continue;
            int bv = s->vertex_map[sv];
            int free_count = 0;
            int first_free = -1;
            for (int gv : c->fibre_[bv])
                if (!used_vertex(gv)) {
                    if (first_free == -1) first_free = gv;
                    ++free_count;
                }
            ways *= free_count;
            if (ways > 0) {
                // Bind one slot so the next isolated vertex over the same
                // base vertex sees one fewer choice.
                c->vmap_[sv] = first_free;
                c->vertex_stamp_[first_free] = c->version_;
                temp_bound.push_back(sv);
            }
        }
        for (int sv : temp_bound) unbind_vertex(sv);
        return ways;
    }
};

void EmbeddingCounter::attach_host(const BGraph& g) {
    g_ = &g;
    fibre_.assign(g.base.vertex_count(), {});
    for (int gv = 0; gv < g.total.vertex_count(); ++gv) fibre_[g.vertex_map[gv]].push_back(gv);
    vertex_stamp_.assign(g.total.vertex_count(), 0);
    edge_stamp_.assign(g.total.dir_edge_count(), 0);
    version_ = 0;
}

std::vector<int> EmbeddingCounter::search_order(const BGraph& s) {
    const Graph& st = s.total;
    std::vector<char> vertex_seen(st.vertex_count(), 0), orbit_taken(st.dir_edge_count(), 0);
    std::vector<int> order;
    for (int seed = 0; seed < st.vertex_count(); ++seed) {
        if (vertex_seen[seed]) continue;
        std::vector<int> frontier = {seed};
        vertex_seen[seed] = 1;
        while (!frontier.empty()) {
            int v = frontier.back();
            frontier.pop_back();
            for (const int* it = st.out_begin(v); it != st.out_end(v); ++it) {
                int e = *it;
                if (orbit_taken[e]) continue;
                orbit_taken[e] = 1;
                orbit_taken[st.iota(e)] = 1;
                order.push_back(e);
                int w = st.head(e);
                if (!vertex_seen[w]) {
                    vertex_seen[w] = 1;
                    frontier.push_back(w);
                }
            }
        }
    }
    return order;
}

long long EmbeddingCounter::count(const BGraph& s, const std::vector<int>& order, bool stop_early) {
    require(g_ != nullptr, "EmbeddingCounter: no host attached");
    require(s.base.vertex_count() == g_->base.vertex_count() &&
                s.base.dir_edge_count() == g_->base.dir_edge_count(),
            "EmbeddingCounter: shape and host must share a base");
    ++version_;
    vmap_.assign(s.total.vertex_count(), -1);
    EmbeddingCountRun run{this, &s, g_, &order, stop_early};
    run.place_edge(0);
    return run.count;
}

long long count_embeddings(const BGraph& s, const BGraph& g, int edge_cap) {
    require(s.base.vertex_count() == g.base.vertex_count() && s.base.dir_edge_count() == g.base.dir_edge_count(),
            "count_embeddings: S and G must share a base");
    if (s.total.edge_count() > edge_cap) throw Error(ErrorKind::SizeCap, "count_embeddings: edge cap exceeded");
    EmbeddingCounter counter;
    counter.attach_host(g);
    return counter.count(s, EmbeddingCounter::search_order(s));
}

namespace {

std::vector<int> inverse_permutation(const std::vector<int>& p) {
    std::vector<int> inv(p.size());
    for (size_t i = 0; i < p.size(); ++i) inv[p[i]] = static_cast<int>(i);
    return inv;
}

}  // namespace

CoordCover sample_cover(const Graph& base, int n, const ModelSpec& spec, std::uint64_t trial) {
    check_model_compatible(base, n, spec.kind);
    CoordCover cover;
    cover.base = base;
    cover.degree = n;
    cover.sigma.assign(base.dir_edge_count(), {});

    std::vector<int> orbit = base.orbit_index();
    for (int e = 0; e < base.dir_edge_count(); ++e) {
        if (e > base.iota(e)) continue;  // one draw per orbit
        RngStream rng(derive_seed(spec.seed, trial, static_cast<std::uint64_t>(orbit[e])));
        std::vector<int> sigma;
        if (base.is_half_loop(e)) {
            sigma = (n % 2 == 0) ? rng.perfect_matching(n) : rng.near_perfect_matching(n);
        } else if (base.is_whole_loop(e) && model_is_cyclic(spec.kind)) {
            sigma = rng.full_cycle(n);
        } else {
            sigma = rng.permutation(n);
        }
        if (base.iota(e) == e) {
            cover.sigma[e] = std::move(sigma);  // involutions are self-inverse
        } else {
            cover.sigma[base.iota(e)] = inverse_permutation(sigma);
            cover.sigma[e] = std::move(sigma);
        }
    }
    cover.validate();
    return cover;
}

std::string format_cover(const CoordCover& cover) {
    std::ostringstream out;
    out << "cover " << cover.degree << " " << cover.base.vertex_count() << " " << cover.base.dir_edge_count() << "\n";
    for (const auto& sigma : cover.sigma) {
        out << "s";
        for (int i : sigma) out << " " << i;
        out << "\n";
    }
    return out.str();
}

CoordCover parse_cover(const std::string& text, const Graph& base) {
    std::istringstream in(text);
    std::string tag;
    int n = 0, nv = 0, m = 0;
    if (!(in >> tag >> n >> nv >> m) || tag != "cover") fail_invalid("parse_cover: bad header (line 1)");
    require(nv == base.vertex_count() && m == base.dir_edge_count(), "parse_cover: base shape mismatch");
    CoordCover cover;
    cover.base = base;
    cover.degree = n;
    cover.sigma.assign(m, std::vector<int>(n));
    for (int e = 0; e < m; ++e) {
        if (!(in >> tag) || tag != "s") fail_invalid("parse_cover: bad sigma record (line " + std::to_string(e + 2) + ")");
        for (int i = 0; i < n; ++i)
            if (!(in >> cover.sigma[e][i]))
                fail_invalid("parse_cover: truncated sigma record (line " + std::to_string(e + 2) + ")");
    }
    cover.validate();
    return cover;
}

}  // namespace cspec
