#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "graph.hpp"

namespace cspec {

enum class ModelKind {
    Permutation,
    PermInvolutionEven,
    PermInvolutionOdd,
    Cyclic,
    CyclicInvolutionEven,
    CyclicInvolutionOdd,
};

bool model_is_cyclic(ModelKind kind);
bool model_is_involution(ModelKind kind);
// Required parity of the degree n, or nullopt when any n is allowed.
std::optional<int> model_parity(ModelKind kind);

const char* model_name(ModelKind kind);
ModelKind parse_model(const std::string& name);

struct ModelSpec {
    ModelKind kind = ModelKind::Permutation;
    std::uint64_t seed = 0;
};

// Throws unless the model is defined over this base at this degree
// (permutation/cyclic need a half-loop-free base; involution models need
// matching parity of n).
void check_model_compatible(const Graph& base, int n, ModelKind kind);

// Degree-n coordinatized cover of `base`: one permutation of [n] per base
// directed edge with sigma(iota e) = sigma(e)^{-1}.
struct CoordCover {
    Graph base;
    int degree = 0;
    std::vector<std::vector<int>> sigma;  // [dir edge][i]

    void validate() const;
};

// A graph over a base: structure maps on vertices and directed edges that
// intertwine heads, tails and the involutions.
struct BGraph {
    Graph total;
    Graph base;
    std::vector<int> vertex_map;
    std::vector<int> edge_map;

    void validate() const;
};

struct OrderedBGraph {
    BGraph b;
    // Orbit ranks follow the vector order; each entry is the directed edge
    // id chosen as the orbit's orientation.
    std::vector<int> oriented_edges;
};

struct FibreCounts {
    std::vector<int> a;  // per base directed edge
    std::vector<int> b;  // per base vertex
};

// Realizes the explicit cover graph: vertex (v, i) -> v * n + i and
// dir edge (e, i) -> e * n + i, with the projection as B-graph structure.
BGraph realize(const CoordCover& cover);

FibreCounts fibre_counts(const BGraph& s);

bool is_etale(const BGraph& s);

// Counts injective B-graph morphisms s -> g (the ordered-copy count
// #[S^<=] cap G; it equals #Aut(S/B) times the unordered subgraph count).
// Backtracking over edge orbits; throws when s has more than edge_cap
// orbits.
long long count_embeddings(const BGraph& s, const BGraph& g, int edge_cap = 64);

// Reusable variant for hot loops: attach one host, count many shapes (or
// many hosts against prepared shapes) without reallocating scratch state.
class EmbeddingCounter {
public:
    void attach_host(const BGraph& g);
    // Prepares the orbit search order for a shape; reusable across hosts.
    static std::vector<int> search_order(const BGraph& s);
    // stop_early: return 1 as soon as one embedding exists.
    long long count(const BGraph& s, const std::vector<int>& order, bool stop_early = false);

private:
    const BGraph* g_ = nullptr;
    std::vector<std::vector<int>> fibre_;
    std::vector<int> vertex_stamp_, edge_stamp_;
    int version_ = 0;
    std::vector<int> vmap_;
    friend struct EmbeddingCountRun;
};

// Samples sigma for one cover.  Every draw is keyed by (seed, trial, orbit
// index) through the documented substream rule, so a given (spec, trial)
// yields the same cover on any thread.
CoordCover sample_cover(const Graph& base, int n, const ModelSpec& spec, std::uint64_t trial);

// Serialization: "cover <n> <base_vertices> <base_dir_edges>" then one line
// per base dir edge with the image list of sigma.  Round-trips exactly.
std::string format_cover(const CoordCover& cover);
CoordCover parse_cover(const std::string& text, const Graph& base);

}  // namespace cspec
