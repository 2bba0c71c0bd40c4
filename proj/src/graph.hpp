#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace cspec {

class RngStream;

// Finite multigraph in involution form: a list of directed edges together
// with an involution iota satisfying tail(iota e) = head(e).  Half-loops
// are the fixed points of iota and contribute 1 to the degree of their
// vertex; a whole-loop is a 2-element orbit with equal endpoints and
// contributes 2.  Immutable after construction; the constructor validates
// the involution identities.
class Graph {
public:
    Graph() = default;
    Graph(int vertex_count, std::vector<int> tails, std::vector<int> heads, std::vector<int> iota);

    static Graph bouquet(int whole_loops, int half_loops = 0);
    static Graph cycle(int length);       // length >= 1; length 1 is a whole-loop
    static Graph path(int edges);         // edges + 1 vertices
    static Graph single_vertex();

    int vertex_count() const { return vertex_count_; }
    int dir_edge_count() const { return static_cast<int>(tails_.size()); }
    int tail(int e) const { return tails_[e]; }
    int head(int e) const { return heads_[e]; }
    int iota(int e) const { return iota_[e]; }
    bool is_half_loop(int e) const { return iota_[e] == e; }
    bool is_whole_loop(int e) const { return iota_[e] != e && tails_[e] == heads_[e]; }

    bool empty() const { return vertex_count_ == 0; }

    // Degree of v = number of directed edges with tail v.
    int degree(int v) const { return out_offset_[v + 1] - out_offset_[v]; }
    std::vector<int> degree_sequence() const;

    // Directed edges with tail v, as a contiguous span.
    const int* out_begin(int v) const { return out_edges_.data() + out_offset_[v]; }
    const int* out_end(int v) const { return out_edges_.data() + out_offset_[v + 1]; }

    // Number of iota orbits (undirected edges; half-loops count once).
    int edge_count() const { return edge_count_; }
    int half_loop_count() const { return half_loop_count_; }
    // One representative per orbit, in directed-edge id order.
    std::vector<int> orbit_reps() const;
    // Dense orbit index per directed edge (both directions share an index).
    std::vector<int> orbit_index() const;

    int order() const { return edge_count_ - vertex_count_; }
    // Euler characteristic is #V - #E_dir/2, a half-integer when half-loops
    // are present; returned as twice its value to stay integral.
    int euler_characteristic_twice() const { return 2 * vertex_count_ - dir_edge_count(); }

    bool connected() const;

private:
    int vertex_count_ = 0;
    std::vector<int> tails_;
    std::vector<int> heads_;
    std::vector<int> iota_;
    std::vector<int> out_offset_;  // CSR offsets of out_edges_ by tail
    std::vector<int> out_edges_;
    int edge_count_ = 0;
    int half_loop_count_ = 0;
};

// Incremental construction helper; produces a validated Graph.
class GraphBuilder {
public:
    explicit GraphBuilder(int vertex_count = 0) : vertex_count_(vertex_count) {}

    int add_vertex();
    // Returns the id of the first directed edge of the new orbit.
    int add_edge(int u, int v);   // whole edge (also covers whole-loops when u == v)
    int add_half_loop(int v);

    int vertex_count() const { return vertex_count_; }
    Graph build() const;

private:
    int vertex_count_ = 0;
    std::vector<int> tails_, heads_, iota_;
};

struct GraphStats {
    int order = 0;
    int euler_characteristic_twice = 0;
    int half_loop_count = 0;       // o1
    int non_half_edge_count = 0;   // o2
    std::vector<int> degree_sequence;
};

GraphStats stats(const Graph& g);

// Adjacency matrix as a dense row-major vertex_count x vertex_count array;
// entry (u, v) counts directed edges from u to v.
std::vector<double> adjacency_matrix(const Graph& g);

// Hashimoto (non-backtracking) matrix on directed edges: (e1, e2) is 1 iff
// head(e1) = tail(e2) and iota(e1) != e2.
std::vector<double> hashimoto_matrix(const Graph& g);

// Iteratively removes vertices of degree <= 1 with their incident edges.
// The result's vertices keep the relative order of the survivors; the
// returned maps give surviving vertex/dir-edge ids in the original graph.
struct PruneResult {
    Graph graph;
    std::vector<int> vertex_ids;    // new vertex -> old vertex
    std::vector<int> dir_edge_ids;  // new dir edge -> old dir edge
};
PruneResult prune(const Graph& g);

// Replaces the orbit of e (not a half-loop) by a path of `parts` edges
// through parts - 1 fresh vertices.
Graph subdivide_edge(const Graph& g, int e, int parts);

// Exact isomorphism-of-graphs-with-involution test by backtracking with
// degree partition pruning.  Only intended for small graphs; throws when
// either side exceeds size_cap vertices.
bool is_isomorphic(const Graph& a, const Graph& b, int size_cap = 24);

// Line-based serialization: "graph <nV> <nDirE>" then one line
// "e <tail> <head> <iota>" per directed edge.  Round-trips bit-exactly.
std::string format_graph(const Graph& g);
Graph parse_graph(const std::string& text);

// Random test graph with up to max_vertices vertices, degrees capped by
// max_degree; may contain half-loops, whole-loops and multi-edges.
Graph random_graph(RngStream& rng, int max_vertices, int max_degree, bool allow_half_loops = true);

// Random connected multigraph with all degrees >= 1 (used by property tests).
Graph random_connected_graph(RngStream& rng, int vertices, int extra_edges, bool allow_half_loops = true);

}  // namespace cspec
