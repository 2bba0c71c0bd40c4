#include "graph.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "errors.hpp"
#include "rng.hpp"

namespace cspec {

Graph::Graph(int vertex_count, std::vector<int> tails, std::vector<int> heads, std::vector<int> iota)
    : vertex_count_(vertex_count), tails_(std::move(tails)), heads_(std::move(heads)), iota_(std::move(iota)) {
    require(vertex_count_ >= 0, "Graph: negative vertex count");
    const int m = dir_edge_count();
    require(static_cast<int>(heads_.size()) == m && static_cast<int>(iota_.size()) == m,
            "Graph: edge array sizes disagree");
    for (int e = 0; e < m; ++e) {
        require(tails_[e] >= 0 && tails_[e] < vertex_count_, "Graph: tail out of range");
        require(heads_[e] >= 0 && heads_[e] < vertex_count_, "Graph: head out of range");
        require(iota_[e] >= 0 && iota_[e] < m, "Graph: iota out of range");
        require(iota_[iota_[e]] == e, "Graph: iota is not an involution");
        require(tails_[iota_[e]] == heads_[e], "Graph: tail(iota e) != head(e)");
        if (iota_[e] == e) {
            ++half_loop_count_;
            require(tails_[e] == heads_[e], "Graph: half-loop with distinct endpoints");
        }
    }
    edge_count_ = (m - half_loop_count_) / 2 + half_loop_count_;

    out_offset_.assign(vertex_count_ + 1, 0);
    for (int e = 0; e < m; ++e) ++out_offset_[tails_[e] + 1];
    for (int v = 0; v < vertex_count_; ++v) out_offset_[v + 1] += out_offset_[v];
    out_edges_.resize(m);
    std::vector<int> cursor(out_offset_.begin(), out_offset_.end() - 1);
    for (int e = 0; e < m; ++e) out_edges_[cursor[tails_[e]]++] = e;
}

Graph Graph::bouquet(int whole_loops, int half_loops) {
    GraphBuilder b(1);
    for (int i = 0; i < whole_loops; ++i) b.add_edge(0, 0);
    for (int i = 0; i < half_loops; ++i) b.add_half_loop(0);
    return b.build();
}

Graph Graph::cycle(int length) {
    require(length >= 1, "cycle: length must be positive");
    GraphBuilder b(length);
    for (int i = 0; i < length; ++i) b.add_edge(i, (i + 1) % length);
    return b.build();
}

Graph Graph::path(int edges) {
    require(edges >= 0, "path: negative length");
    GraphBuilder b(edges + 1);
    for (int i = 0; i < edges; ++i) b.add_edge(i, i + 1);
    return b.build();
}

Graph Graph::single_vertex() { return Graph(1, {}, {}, {}); }

std::vector<int> Graph::degree_sequence() const {
    std::vector<int> d(vertex_count_);
    for (int v = 0; v < vertex_count_; ++v) d[v] = degree(v);
    return d;
}

std::vector<int> Graph::orbit_reps() const {
    std::vector<int> reps;
    reps.reserve(edge_count_);
    for (int e = 0; e < dir_edge_count(); ++e)
        if (e <= iota_[e]) reps.push_back(e);
    return reps;
}

std::vector<int> Graph::orbit_index() const {
    std::vector<int> idx(dir_edge_count(), -1);
    int next = 0;
    for (int e = 0; e < dir_edge_count(); ++e)
        if (e <= iota_[e]) {
            idx[e] = next;
            idx[iota_[e]] = next;
            ++next;
        }
    return idx;
}

bool Graph::connected() const {
    if (vertex_count_ <= 1) return true;
    std::vector<char> seen(vertex_count_, 0);
    std::vector<int> stack = {0};
    seen[0] = 1;
    int visited = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (const int* it = out_begin(v); it != out_end(v); ++it) {
            int w = heads_[*it];
            if (!seen[w]) {
                seen[w] = 1;
                ++visited;
                stack.push_back(w);
            }
        }
    }
    return visited == vertex_count_;
}

int GraphBuilder::add_vertex() { return vertex_count_++; }

int GraphBuilder::add_edge(int u, int v) {
    require(u >= 0 && u < vertex_count_ && v >= 0 && v < vertex_count_, "add_edge: vertex out of range");
    int e = static_cast<int>(tails_.size());
    tails_.push_back(u);
    heads_.push_back(v);
    tails_.push_back(v);
    heads_.push_back(u);
    iota_.push_back(e + 1);
    iota_.push_back(e);
    return e;
}

int GraphBuilder::add_half_loop(int v) {
    require(v >= 0 && v < vertex_count_, "add_half_loop: vertex out of range");
    int e = static_cast<int>(tails_.size());
    tails_.push_back(v);
    heads_.push_back(v);
    iota_.push_back(e);
    return e;
}

Graph GraphBuilder::build() const { return Graph(vertex_count_, tails_, heads_, iota_); }

GraphStats stats(const Graph& g) {
    GraphStats s;
    s.order = g.order();
    s.euler_characteristic_twice = g.euler_characteristic_twice();
    s.half_loop_count = g.half_loop_count();
    s.non_half_edge_count = g.edge_count() - g.half_loop_count();
    s.degree_sequence = g.degree_sequence();
    return s;
}

std::vector<double> adjacency_matrix(const Graph& g) {
    const int n = g.vertex_count();
    std::vector<double> a(static_cast<size_t>(n) * n, 0.0);
    for (int e = 0; e < g.dir_edge_count(); ++e) a[static_cast<size_t>(g.tail(e)) * n + g.head(e)] += 1.0;
    return a;
}

std::vector<double> hashimoto_matrix(const Graph& g) {
    const int m = g.dir_edge_count();
    std::vector<double> h(static_cast<size_t>(m) * m, 0.0);
    for (int e1 = 0; e1 < m; ++e1) {
        int v = g.head(e1);
        for (const int* it = g.out_begin(v); it != g.out_end(v); ++it) {
            int e2 = *it;
            if (g.iota(e1) != e2) h[static_cast<size_t>(e1) * m + e2] = 1.0;
        }
    }
    return h;
}

PruneResult prune(const Graph& g) {
    const int n = g.vertex_count();
    const int m = g.dir_edge_count();
    std::vector<char> vertex_gone(n, 0), edge_gone(m, 0);
    std::vector<int> degree(n);
    for (int v = 0; v < n; ++v) degree[v] = g.degree(v);

    std::vector<int> queue;
    for (int v = 0; v < n; ++v)
        if (degree[v] <= 1) queue.push_back(v);
    while (!queue.empty()) {
        int v = queue.back();
        queue.pop_back();
        if (vertex_gone[v]) continue;
        vertex_gone[v] = 1;
        for (const int* it = g.out_begin(v); it != g.out_end(v); ++it) {
            int e = *it;
            if (edge_gone[e]) continue;
            edge_gone[e] = 1;
            edge_gone[g.iota(e)] = 1;
            int w = g.head(e);
            if (!vertex_gone[w]) {
                degree[w] -= (w == v) ? 2 : 1;
                if (degree[w] <= 1) queue.push_back(w);
            }
        }
    }

    PruneResult result;
    std::vector<int> vertex_new(n, -1), edge_new(m, -1);
    for (int v = 0; v < n; ++v)
        if (!vertex_gone[v]) {
            vertex_new[v] = static_cast<int>(result.vertex_ids.size());
            result.vertex_ids.push_back(v);
        }
    std::vector<int> tails, heads, iota_old;
    for (int e = 0; e < m; ++e)
        if (!edge_gone[e]) {
            edge_new[e] = static_cast<int>(result.dir_edge_ids.size());
            result.dir_edge_ids.push_back(e);
            tails.push_back(vertex_new[g.tail(e)]);
            heads.push_back(vertex_new[g.head(e)]);
        }
    std::vector<int> iota(result.dir_edge_ids.size());
    for (size_t i = 0; i < result.dir_edge_ids.size(); ++i) iota[i] = edge_new[g.iota(result.dir_edge_ids[i])];
    result.graph = Graph(static_cast<int>(result.vertex_ids.size()), std::move(tails), std::move(heads), std::move(iota));
    return result;
}

Graph subdivide_edge(const Graph& g, int e, int parts) {
    require(e >= 0 && e < g.dir_edge_count(), "subdivide_edge: edge out of range");
    require(!g.is_half_loop(e), "subdivide_edge: cannot subdivide a half-loop");
    require(parts >= 1, "subdivide_edge: parts must be positive");

    GraphBuilder b(g.vertex_count());
    int partner = g.iota(e);
    for (int f = 0; f < g.dir_edge_count(); ++f) {
        if (f == e || f == partner) continue;
        if (g.is_half_loop(f)) {
            b.add_half_loop(g.tail(f));
        } else if (f < g.iota(f)) {
            b.add_edge(g.tail(f), g.head(f));
        }
    }
    int prev = g.tail(e);
    for (int i = 0; i + 1 < parts; ++i) {
        int mid = b.add_vertex();
        b.add_edge(prev, mid);
        prev = mid;
    }
    b.add_edge(prev, g.head(e));
    return b.build();
}

namespace {

struct IsoState {
    const Graph* a;
    const Graph* b;
    std::vector<int> vmap;   // a vertex -> b vertex or -1
    std::vector<int> vused;  // b vertex used
    std::vector<int> emap;   // a dir edge -> b dir edge or -1
    std::vector<int> eused;  // b dir edge used
};

bool iso_backtrack(IsoState& st);

// Assign images for all out-edges of matched vertex va; edges between two
// matched vertices must map consistently.  Proceeds one unmatched a-edge at
// a time to keep the state small.
bool iso_match_edges(IsoState& st, int va) {
    const Graph& a = *st.a;
    const Graph& b = *st.b;
    int ea = -1;
    for (const int* it = a.out_begin(va); it != a.out_end(va); ++it) {
        if (st.emap[*it] == -1 && st.vmap[a.head(*it)] != -1) {
            ea = *it;
            break;
        }
    }
    if (ea == -1) return iso_backtrack(st);

    int vb = st.vmap[va];
    int target = st.vmap[a.head(ea)];
    for (const int* it = b.out_begin(vb); it != b.out_end(vb); ++it) {
        int eb = *it;
        if (st.eused[eb] || b.head(eb) != target) continue;
        if (a.is_half_loop(ea) != b.is_half_loop(eb)) continue;
        st.emap[ea] = eb;
        st.eused[eb] = 1;
        int pa = a.iota(ea), pb = b.iota(eb);
        bool partner_ok = true;
        if (pa != ea) {
            if (st.emap[pa] != -1 || st.eused[pb])
                partner_ok = false;
            else {
                st.emap[pa] = pb;
                st.eused[pb] = 1;
            }
        }
        if (partner_ok && iso_match_edges(st, va)) return true;
        if (pa != ea && partner_ok) {
            st.eused[pb] = 0;
            st.emap[pa] = -1;
        }
        st.eused[eb] = 0;
        st.emap[ea] = -1;
    }
    return false;
}

bool iso_backtrack(IsoState& st) {
    const Graph& a = *st.a;
    const Graph& b = *st.b;
    int va = -1;
    // Prefer a vertex adjacent to the matched region for connectivity pruning.
    for (int v = 0; v < a.vertex_count() && va == -1; ++v) {
        if (st.vmap[v] != -1) continue;
        for (const int* it = a.out_begin(v); it != a.out_end(v); ++it)
            if (st.vmap[a.head(*it)] != -1) {
                va = v;
                break;
            }
    }
    if (va == -1) {
        for (int v = 0; v < a.vertex_count(); ++v)
            if (st.vmap[v] == -1) {
                va = v;
                break;
            }
    }
    if (va == -1) {
        for (int e = 0; e < a.dir_edge_count(); ++e)
            if (st.emap[e] == -1) return false;  // unmatched edge between matched vertices: handled below
        return true;
    }

    for (int vb = 0; vb < b.vertex_count(); ++vb) {
        if (st.vused[vb] || b.degree(vb) != a.degree(va)) continue;
        st.vmap[va] = vb;
        st.vused[vb] = 1;
        if (iso_match_edges(st, va)) return true;
        st.vused[vb] = 0;
        st.vmap[va] = -1;
    }
    return false;
}

}  // namespace

bool is_isomorphic(const Graph& a, const Graph& b, int size_cap) {
    if (a.vertex_count() > size_cap || b.vertex_count() > size_cap)
        throw Error(ErrorKind::SizeCap, "is_isomorphic: size cap exceeded");
    if (a.vertex_count() != b.vertex_count() || a.dir_edge_count() != b.dir_edge_count()) return false;
    if (a.half_loop_count() != b.half_loop_count()) return false;
    std::vector<int> da = a.degree_sequence(), db = b.degree_sequence();
    std::sort(da.begin(), da.end());
    std::sort(db.begin(), db.end());
    if (da != db) return false;
    if (a.vertex_count() == 0) return true;

    IsoState st;
    st.a = &a;
    st.b = &b;
    st.vmap.assign(a.vertex_count(), -1);
    st.vused.assign(b.vertex_count(), 0);
    st.emap.assign(a.dir_edge_count(), -1);
    st.eused.assign(b.dir_edge_count(), 0);
    return iso_backtrack(st);
}

std::string format_graph(const Graph& g) {
    std::ostringstream out;
    out << "graph " << g.vertex_count() << " " << g.dir_edge_count() << "\n";
    for (int e = 0; e < g.dir_edge_count(); ++e)
        out << "e " << g.tail(e) << " " << g.head(e) << " " << g.iota(e) << "\n";
    return out.str();
}

Graph parse_graph(const std::string& text) {
    std::istringstream in(text);
    std::string tag;
    int nv = 0, nde = 0;
    if (!(in >> tag >> nv >> nde) || tag != "graph") fail_invalid("parse_graph: bad header (line 1)");
    std::vector<int> tails(nde), heads(nde), iota(nde);
    for (int e = 0; e < nde; ++e) {
        if (!(in >> tag >> tails[e] >> heads[e] >> iota[e]) || tag != "e")
            fail_invalid("parse_graph: bad edge record (line " + std::to_string(e + 2) + ")");
    }
    return Graph(nv, std::move(tails), std::move(heads), std::move(iota));
}

Graph random_graph(RngStream& rng, int max_vertices, int max_degree, bool allow_half_loops) {
    require(max_vertices >= 1, "random_graph: need at least one vertex");
    int n = 1 + rng.uniform_int(max_vertices);
    GraphBuilder b(n);
    std::vector<int> degree(n, 0);
    int attempts = 2 * n + rng.uniform_int(2 * n + 2);
    for (int i = 0; i < attempts; ++i) {
        int u = rng.uniform_int(n);
        int v = rng.uniform_int(n);
        if (u == v && allow_half_loops && rng.uniform_int(3) == 0) {
            if (degree[u] + 1 > max_degree) continue;
            b.add_half_loop(u);
            degree[u] += 1;
        } else {
            int du = (u == v) ? 2 : 1;
            if (degree[u] + du > max_degree || degree[v] + 1 > max_degree) continue;
            b.add_edge(u, v);
            degree[u] += du;
            if (u != v) degree[v] += 1;
        }
    }
    return b.build();
}

Graph random_connected_graph(RngStream& rng, int vertices, int extra_edges, bool allow_half_loops) {
    require(vertices >= 1, "random_connected_graph: need at least one vertex");
    GraphBuilder b(vertices);
    for (int v = 1; v < vertices; ++v) b.add_edge(rng.uniform_int(v), v);
    for (int i = 0; i < extra_edges; ++i) {
        int u = rng.uniform_int(vertices);
        int v = rng.uniform_int(vertices);
        if (u == v && allow_half_loops && rng.uniform_int(2) == 0)
            b.add_half_loop(u);
        else
            b.add_edge(u, v);
    }
    return b.build();
}

}  // namespace cspec
