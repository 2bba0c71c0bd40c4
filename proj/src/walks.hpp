#pragma once

#include <functional>
#include <map>
#include <vector>

#include "covers.hpp"
#include "graph.hpp"

namespace cspec {

// Alternating vertex/edge walk in a host graph.  The host pointer matters:
// the visited subgraph depends on the host's involution, not just on the
// edge id sequence.
struct Walk {
    const Graph* host = nullptr;
    int start = 0;
    std::vector<int> edges;

    int length() const { return static_cast<int>(edges.size()); }
    int vertex_at(int j) const;  // v_j
    void validate() const;
    bool closed() const;
    bool non_backtracking() const;
    bool snbc() const;
};

// All strictly non-backtracking closed walks of length k.  `budget` caps
// the number of DFS node expansions; exceeding it throws BudgetExhausted.
std::vector<Walk> enumerate_snbc(const Graph& g, int k, long long budget = 10000000);
void for_each_snbc(const Graph& g, int k, long long budget, const std::function<void(const Walk&)>& fn);

// Trace(H_g^k) as an exact integer, by counting the same DFS paths.
long long hashimoto_trace(const Graph& g, int k, long long budget = 10000000);
// Traces for k = 1..k_max in one pass.
std::vector<long long> hashimoto_traces(const Graph& g, int k_max, long long budget = 10000000);

// An ordering of a graph: vertex ids are already ranked 0..nV-1; entry r of
// oriented_edges is the directed edge chosen as the orientation of the
// rank-r orbit.
struct OrderedGraph {
    Graph graph;
    std::vector<int> oriented_edges;
};

struct VisitedSubgraph {
    OrderedGraph ordered;
    std::vector<int> host_vertex;  // new vertex -> host vertex
    std::vector<int> host_edge;    // new dir edge -> host dir edge
};

// Smallest subgraph containing the walk, with first-encountered ordering
// (vertices by first visit, orbits by first traversal, oriented along the
// first traversal).
VisitedSubgraph visited_subgraph_ordered(const Walk& w);

enum class StepClass { Forced, Coincidence, New };

struct WalkRecord {
    std::vector<int> fibre_trajectory;  // i_0..i_k
    std::vector<StepClass> classes;     // one per step
    std::vector<int> orders;            // ord(gamma_j) for j = 0..k
    int coincidences = 0;
    bool closed = false;                // i_k == i_0
};

// Classifies each step of the lift of base_walk starting at fibre index i0,
// per the evolving visited subgraph; ord(gamma_k) = #coincidences - 1.
WalkRecord classify_steps(const Walk& base_walk, int i0, const CoordCover& cover);

struct HomotopyData {
    OrderedGraph reduction;
    std::vector<int> edge_lengths;               // per reduction orbit rank
    std::vector<int> suppressed;                 // bead vertex ids in the input
    std::vector<int> vertex_ids;                 // reduction vertex -> input vertex
    std::vector<std::vector<int>> beaded_paths;  // reduction dir edge -> input dir edges
};

// Contracts beaded paths through the given bead vertices.  The set must
// contain only beads (degree 2, no incident self-loop) and be proper (no
// component consists entirely of beads).
HomotopyData suppress_beads(const OrderedGraph& s, const std::vector<int>& beads);

// All beads of an ordered graph, optionally keeping some vertices.
std::vector<int> bead_vertices(const Graph& g, const std::vector<int>& keep = {});

// Variable-length graph: glues a path of length k(e) per orbit; half-loop
// orbits only admit length 1.  Inverse of bead suppression up to ordered
// isomorphism.
OrderedGraph vlg(const OrderedGraph& t, const std::vector<int>& edge_lengths);

struct Wording {
    HomotopyData homotopy;
    std::vector<std::vector<int>> words;  // reduction dir edge -> base dir edge ids
};

// The wording induced by a non-backtracking walk in a B-graph: beads of the
// visited subgraph other than the walk endpoints are suppressed and each
// reduction edge carries the base-edge string under its beaded path.
Wording induced_wording(const Walk& w, const BGraph& host);

// SNBC census by order of the visited subgraph, for the realized cover of
// c.  Computed from coincidence counting along lifted base walks; the
// total over all orders is Trace(H_G^k).
std::map<int, long long> snbc_order_census(const CoordCover& c, int k, long long budget = 10000000);

// Same census computed the direct way: enumerate SNBC walks in the
// realized cover and take ord(ViSu).  The two paths cross-check each other.
std::map<int, long long> snbc_order_census_realized(const BGraph& cover, int k, long long budget = 10000000);

}  // namespace cspec
