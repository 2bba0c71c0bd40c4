#include <doctest.h>

#include <numeric>

#include "covers.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "rng.hpp"
#include "walks.hpp"

using namespace cspec;

namespace {

// Dense integer Hashimoto power trace, the independent oracle.
long long trace_power_oracle(const Graph& g, int k) {
    int m = g.dir_edge_count();
    std::vector<long long> h(static_cast<size_t>(m) * m, 0);
    auto hm = hashimoto_matrix(g);
    for (size_t i = 0; i < hm.size(); ++i) h[i] = static_cast<long long>(hm[i]);
    std::vector<long long> p = h;
    for (int step = 1; step < k; ++step) {
        std::vector<long long> next(static_cast<size_t>(m) * m, 0);
        for (int i = 0; i < m; ++i)
            for (int t = 0; t < m; ++t) {
                long long v = p[static_cast<size_t>(i) * m + t];
                if (!v) continue;
                for (int j = 0; j < m; ++j) next[static_cast<size_t>(i) * m + j] += v * h[static_cast<size_t>(t) * m + j];
            }
        p = std::move(next);
    }
    long long trace = 0;
    for (int i = 0; i < m; ++i) trace += p[static_cast<size_t>(i) * m + i];
    return trace;
}

}  // namespace

TEST_CASE("enumerate_snbc pinned examples") {
    // Figure-eight, k = 2: Trace H^2 = 9 + 1 + 1 + 1 = 12.
    Graph fig8 = Graph::bouquet(2);  // walks keep a pointer to their host
    auto fig8_walks = enumerate_snbc(fig8, 2);
    CHECK(fig8_walks.size() == 12);
    for (const Walk& w : fig8_walks) CHECK(w.snbc());

    // Cycle of length 3, k = 3: two orientations times three starts.
    CHECK(enumerate_snbc(Graph::cycle(3), 3).size() == 6);

    // A walk of length one about a half-loop is not SNBC.
    CHECK(enumerate_snbc(Graph::bouquet(0, 1), 1).empty());

    CHECK_THROWS_AS(enumerate_snbc(Graph::bouquet(3), 20, 1000), Error);
}

TEST_CASE("snbc count equals Trace(H^k) on random graphs") {
    RngStream rng(1212);
    for (int trial = 0; trial < 25; ++trial) {
        Graph g = random_graph(rng, 7, 5);
        if (g.dir_edge_count() == 0 || g.dir_edge_count() > 24) continue;
        for (int k = 1; k <= 5; ++k) {
            long long dfs = hashimoto_trace(g, k);
            CHECK(dfs == trace_power_oracle(g, k));
            CHECK(static_cast<long long>(enumerate_snbc(g, k).size()) == dfs);
        }
    }
}

TEST_CASE("visited subgraph with first-encountered ordering") {
    Graph c3 = Graph::cycle(3);
    Walk w{&c3, 0, {0, 2, 4}};
    w.validate();
    VisitedSubgraph visu = visited_subgraph_ordered(w);
    CHECK(visu.ordered.graph.vertex_count() == 3);
    CHECK(visu.ordered.graph.edge_count() == 3);
    CHECK(visu.host_vertex == std::vector<int>{0, 1, 2});
    CHECK(is_isomorphic(visu.ordered.graph, c3));
    // Orientation follows the traversal.
    for (int r = 0; r < 3; ++r) {
        int e = visu.ordered.oriented_edges[r];
        CHECK(visu.ordered.graph.tail(e) == r);
    }

    // Single traversed edge.
    Walk one{&c3, 0, {0}};
    VisitedSubgraph ov = visited_subgraph_ordered(one);
    CHECK(ov.ordered.graph.vertex_count() == 2);
    CHECK(ov.ordered.graph.edge_count() == 1);

    // Doubling the walk does not change the visited subgraph.
    Walk twice{&c3, 0, {0, 2, 4, 0, 2, 4}};
    VisitedSubgraph tv = visited_subgraph_ordered(twice);
    CHECK(tv.ordered.graph.vertex_count() == 3);
    CHECK(tv.ordered.graph.edge_count() == 3);
    CHECK(tv.host_vertex == visu.host_vertex);
    CHECK(tv.host_edge == visu.host_edge);
}

TEST_CASE("classify_steps pinned cases") {
    Graph fig8 = Graph::bouquet(2);

    // Degree-1 cover: the first traversal of each orbit is free, repeats are
    // forced.
    ModelSpec spec{ModelKind::Permutation, 4};
    CoordCover ident = sample_cover(fig8, 1, spec, 0);
    Walk w{&fig8, 0, {0, 2, 0, 2}};
    WalkRecord rec = classify_steps(w, 0, ident);
    CHECK(rec.classes[0] == StepClass::Coincidence);  // loop closes instantly on 1 vertex
    CHECK(rec.classes[1] == StepClass::Coincidence);
    CHECK(rec.classes[2] == StepClass::Forced);
    CHECK(rec.classes[3] == StepClass::Forced);
    VisitedSubgraph visu = visited_subgraph_ordered(w);
    CHECK(rec.orders.back() == visu.ordered.graph.order());

    // Injective lifted path: all steps new, final order -1.
    CoordCover shift;
    shift.base = fig8;
    shift.degree = 5;
    shift.sigma = {{1, 2, 3, 4, 0}, {4, 0, 1, 2, 3}, {2, 3, 4, 0, 1}, {3, 4, 0, 1, 2}};
    shift.validate();
    Walk path{&fig8, 0, {0, 2}};
    WalkRecord prec = classify_steps(path, 0, shift);
    CHECK(prec.classes == std::vector<StepClass>{StepClass::New, StepClass::New});
    CHECK(prec.coincidences == 0);
    CHECK(prec.orders.back() == -1);

    // A lift that closes into one cycle: exactly one coincidence, order 0.
    CoordCover two;
    two.base = fig8;
    two.degree = 2;
    two.sigma = {{1, 0}, {1, 0}, {0, 1}, {0, 1}};
    two.validate();
    Walk loop2{&fig8, 0, {0, 0}};
    WalkRecord lrec = classify_steps(loop2, 0, two);
    CHECK(lrec.closed);
    CHECK(lrec.coincidences == 1);
    CHECK(lrec.orders.back() == 0);
}

TEST_CASE("coincidence law: ord(ViSu) = coincidences - 1 against the realized cover") {
    RngStream rng(320);
    std::vector<ModelSpec> specs = {
        {ModelKind::Permutation, 11}, {ModelKind::Cyclic, 12},         {ModelKind::PermInvolutionEven, 13},
        {ModelKind::PermInvolutionOdd, 14}, {ModelKind::CyclicInvolutionEven, 15}, {ModelKind::CyclicInvolutionOdd, 16}};
    Graph base_plain = Graph::bouquet(2);
    Graph base_half = Graph::bouquet(1, 2);
    for (const ModelSpec& spec : specs) {
        const Graph& base = model_is_involution(spec.kind) ? base_half : base_plain;
        int n = model_parity(spec.kind).value_or(6 % 2) == 1 ? 5 : 6;
        for (int trial = 0; trial < 40; ++trial) {
            CoordCover cover = sample_cover(base, n, spec, trial);
            BGraph realized = realize(cover);
            // Random non-backtracking base walk.
            int len = 2 + rng.uniform_int(6);
            Walk w{&base, rng.uniform_int(base.vertex_count()), {}};
            int v = w.start, prev = -1;
            for (int step = 0; step < len; ++step) {
                std::vector<int> options;
                for (const int* it = base.out_begin(v); it != base.out_end(v); ++it)
                    if (prev == -1 || *it != base.iota(prev)) options.push_back(*it);
                if (options.empty()) break;
                int e = options[rng.uniform_int(static_cast<int>(options.size()))];
                w.edges.push_back(e);
                prev = e;
                v = base.head(e);
            }
            if (w.edges.empty()) continue;
            int i0 = rng.uniform_int(n);
            WalkRecord rec = classify_steps(w, i0, cover);
            CHECK(rec.orders.back() == rec.coincidences - 1);

            // Dual route: lift the walk explicitly and take the ViSu order.
            Walk lifted{&realized.total, w.start * n + i0, {}};
            int fi = i0;
            for (int e : w.edges) {
                lifted.edges.push_back(e * n + fi);
                fi = cover.sigma[e][fi];
            }
            lifted.validate();
            VisitedSubgraph visu = visited_subgraph_ordered(lifted);
            CHECK(visu.ordered.graph.order() == rec.orders.back());
            CHECK(rec.closed == (fi == i0));
        }
    }
}

TEST_CASE("suppress_beads pinned cases") {
    // Cycle-4 with three beads suppressed: one vertex with a whole-loop of
    // length 4.
    Graph c4 = Graph::cycle(4);
    Walk around{&c4, 0, {0, 2, 4, 6}};
    VisitedSubgraph visu = visited_subgraph_ordered(around);
    HomotopyData hd = suppress_beads(visu.ordered, {1, 2, 3});
    CHECK(hd.reduction.graph.vertex_count() == 1);
    CHECK(hd.reduction.graph.edge_count() == 1);
    CHECK(hd.reduction.graph.is_whole_loop(0));
    CHECK(hd.edge_lengths == std::vector<int>{4});

    // Improper subset: a full cycle of beads.
    CHECK_THROWS_AS(suppress_beads(visu.ordered, {0, 1, 2, 3}), Error);
    // Not a bead: vertex of the figure-eight has degree 4.
    OrderedGraph f8{Graph::bouquet(2), {0, 2}};
    CHECK_THROWS_AS(suppress_beads(f8, {0}), Error);

    // No beads suppressed: identity.
    HomotopyData none = suppress_beads(visu.ordered, {});
    CHECK(none.reduction.graph.vertex_count() == 4);
    CHECK(none.reduction.graph.edge_count() == 4);
    CHECK(none.edge_lengths == std::vector<int>{1, 1, 1, 1});

    // Barbell: two loops joined by a path of length 3; suppressing the
    // interior beads leaves a dumbbell with lengths (1, 3, 1).
    GraphBuilder barbell(4);
    barbell.add_edge(0, 0);
    barbell.add_edge(0, 1);
    barbell.add_edge(1, 2);
    barbell.add_edge(2, 3);
    barbell.add_edge(3, 3);
    Graph bg = barbell.build();
    OrderedGraph obg{bg, {0, 2, 4, 6, 8}};
    HomotopyData bh = suppress_beads(obg, {1, 2});
    CHECK(bh.reduction.graph.vertex_count() == 2);
    CHECK(bh.reduction.graph.edge_count() == 3);
    std::vector<int> lengths = bh.edge_lengths;
    std::sort(lengths.begin(), lengths.end());
    CHECK(lengths == std::vector<int>{1, 1, 3});
}

TEST_CASE("vlg pinned cases") {
    OrderedGraph fig8{Graph::bouquet(2), {0, 2}};
    OrderedGraph doubled = vlg(fig8, {2, 2});
    CHECK(doubled.graph.vertex_count() == 3);
    CHECK(doubled.graph.edge_count() == 4);
    GraphBuilder expect(3);
    expect.add_edge(0, 1);
    expect.add_edge(1, 0);
    expect.add_edge(0, 2);
    expect.add_edge(2, 0);
    CHECK(is_isomorphic(doubled.graph, expect.build()));

    OrderedGraph same = vlg(fig8, {1, 1});
    CHECK(is_isomorphic(same.graph, fig8.graph));

    // Theta graph with lengths (1, 2, 3).
    GraphBuilder theta(2);
    theta.add_edge(0, 1);
    theta.add_edge(0, 1);
    theta.add_edge(0, 1);
    OrderedGraph ot{theta.build(), {0, 2, 4}};
    OrderedGraph vt = vlg(ot, {1, 2, 3});
    CHECK(vt.graph.vertex_count() == 2 + 1 + 2);
    CHECK(vt.graph.edge_count() == 6);
    auto degseq = vt.graph.degree_sequence();
    std::sort(degseq.begin(), degseq.end());
    CHECK(degseq == std::vector<int>{2, 2, 2, 3, 3});

    // Half-loop orbits only admit length 1.
    OrderedGraph hl{Graph::bouquet(0, 1), {0}};
    CHECK(is_isomorphic(vlg(hl, {1}).graph, hl.graph));
    CHECK_THROWS_AS(vlg(hl, {2}), Error);
}

TEST_CASE("suppress then vlg round-trips on random pruned graphs") {
    RngStream rng(808);
    int tested = 0;
    for (int trial = 0; trial < 200 && tested < 100; ++trial) {
        Graph g = prune(random_graph(rng, 12, 5)).graph;
        if (g.empty()) continue;
        std::vector<int> beads = bead_vertices(g);
        // Keep one vertex per all-bead component so the subset stays proper.
        std::vector<char> bead_flag(g.vertex_count(), 0);
        for (int v : beads) bead_flag[v] = 1;
        std::vector<char> seen(g.vertex_count(), 0);
        std::vector<int> kept_out;
        for (int v0 = 0; v0 < g.vertex_count(); ++v0) {
            if (seen[v0]) continue;
            std::vector<int> stack = {v0}, comp;
            seen[v0] = 1;
            while (!stack.empty()) {
                int v = stack.back();
                stack.pop_back();
                comp.push_back(v);
                for (const int* it = g.out_begin(v); it != g.out_end(v); ++it)
                    if (!seen[g.head(*it)]) {
                        seen[g.head(*it)] = 1;
                        stack.push_back(g.head(*it));
                    }
            }
            bool all_beads = true;
            for (int v : comp) all_beads = all_beads && bead_flag[v];
            if (all_beads) bead_flag[comp.front()] = 0;
        }
        std::vector<int> proper;
        for (int v = 0; v < g.vertex_count(); ++v)
            if (bead_flag[v]) proper.push_back(v);

        std::vector<int> oriented;
        for (int rep : g.orbit_reps()) oriented.push_back(rep);
        OrderedGraph og{g, oriented};
        HomotopyData hd = suppress_beads(og, proper);
        OrderedGraph rebuilt = vlg(hd.reduction, hd.edge_lengths);
        CHECK(rebuilt.graph.order() == g.order());
        CHECK(is_isomorphic(rebuilt.graph, g));
        ++tested;
    }
    CHECK(tested == 100);
}

TEST_CASE("visited subgraphs of SNBC walks are pruned") {
    RngStream rng(606);
    for (int trial = 0; trial < 20; ++trial) {
        Graph g = random_graph(rng, 6, 4);
        if (g.dir_edge_count() == 0 || g.dir_edge_count() > 18) continue;
        for (int k = 2; k <= 4; ++k)
            for_each_snbc(g, k, 1000000, [&](const Walk& w) {
                VisitedSubgraph visu = visited_subgraph_ordered(w);
                for (int v = 0; v < visu.ordered.graph.vertex_count(); ++v)
                    CHECK(visu.ordered.graph.degree(v) >= 2);
            });
    }
}

TEST_CASE("induced wording") {
    Graph fig8 = Graph::bouquet(2);
    ModelSpec spec{ModelKind::Permutation, 3};
    BGraph cover = realize(sample_cover(fig8, 3, spec, 2));

    // Walk over a single lifted base edge: the wording is that edge.
    Walk w{&cover.total, cover.total.tail(0), {0}};
    Wording wd = induced_wording(w, cover);
    REQUIRE(wd.words.size() >= 1);
    CHECK(wd.homotopy.edge_lengths == std::vector<int>{1});
    CHECK(wd.words[0] == std::vector<int>{0});

    // Reverse edges carry the reversed iota-image word.
    RngStream rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        CoordCover cc = sample_cover(fig8, 4, spec, 100 + trial);
        BGraph g = realize(cc);
        // Random NB walk of length 4 in the cover.
        Walk walk{&g.total, rng.uniform_int(g.total.vertex_count()), {}};
        int v = walk.start, prev = -1;
        for (int step = 0; step < 4; ++step) {
            std::vector<int> options;
            for (const int* it = g.total.out_begin(v); it != g.total.out_end(v); ++it)
                if (prev == -1 || *it != g.total.iota(prev)) options.push_back(*it);
            if (options.empty()) break;
            int e = options[rng.uniform_int(static_cast<int>(options.size()))];
            walk.edges.push_back(e);
            prev = e;
            v = g.total.head(e);
        }
        if (walk.edges.empty()) continue;
        Wording word = induced_wording(walk, g);
        const Graph& red = word.homotopy.reduction.graph;
        for (int e = 0; e < red.dir_edge_count(); ++e) {
            int rev = red.iota(e);
            const auto& we = word.words[e];
            const auto& wrev = word.words[rev];
            REQUIRE(we.size() == wrev.size());
            for (size_t t = 0; t < we.size(); ++t) CHECK(wrev[t] == fig8.iota(we[we.size() - 1 - t]));
        }
        // Edge lengths of the wording equal the homotopy edge lengths.
        for (size_t r = 0; r < word.homotopy.edge_lengths.size(); ++r) {
            int d = word.homotopy.reduction.oriented_edges[r];
            CHECK(static_cast<int>(word.words[d].size()) == word.homotopy.edge_lengths[r]);
        }
    }
}

TEST_CASE("snbc order census") {
    Graph fig8 = Graph::bouquet(2);
    // n = 1: the census of base walks by ViSu order.
    ModelSpec spec{ModelKind::Permutation, 6};
    CoordCover ident = sample_cover(fig8, 1, spec, 0);
    auto census1 = snbc_order_census(ident, 3);
    auto base_census = snbc_order_census_realized(realize(ident), 3);
    CHECK(census1 == base_census);

    // Explicit degree-2 cover: census total = Trace(H_G^k) and both census
    // routes agree.
    CoordCover two;
    two.base = fig8;
    two.degree = 2;
    two.sigma = {{1, 0}, {1, 0}, {0, 1}, {0, 1}};
    two.validate();
    BGraph realized = realize(two);
    for (int k = 1; k <= 5; ++k) {
        auto census = snbc_order_census(two, k);
        long long total = 0;
        for (const auto& [order, count] : census) total += count;
        CHECK(total == trace_power_oracle(realized.total, k));
        CHECK(census == snbc_order_census_realized(realized, k));
    }

    // Random covers across models.
    std::vector<ModelSpec> specs = {{ModelKind::Permutation, 21}, {ModelKind::Cyclic, 22},
                                    {ModelKind::PermInvolutionOdd, 23}};
    for (const ModelSpec& ms : specs) {
        Graph base = model_is_involution(ms.kind) ? Graph::bouquet(1, 1) : fig8;
        int n = model_parity(ms.kind).value_or(0) == 1 ? 3 : 4;
        for (std::uint64_t t = 0; t < 5; ++t) {
            CoordCover cover = sample_cover(base, n, ms, t);
            BGraph g = realize(cover);
            for (int k = 2; k <= 4; ++k) CHECK(snbc_order_census(cover, k) == snbc_order_census_realized(g, k));
        }
    }
}

TEST_CASE("broder-shamir first-order bound holds empirically") {
    // E[#SNBC walks of order >= r] <= Tr(H_B^k) n C(k, r+1) (k/(n-2k+1))^(r+1).
    Graph fig8 = Graph::bouquet(2);
    ModelSpec spec{ModelKind::Permutation, 40'000};
    const int k = 4;
    std::vector<long long> base_traces = hashimoto_traces(fig8, k);
    for (int n : {16, 32}) {
        const int trials = 400;
        for (int r : {1, 2}) {
            double sum = 0, sumsq = 0;
            for (int t = 0; t < trials; ++t) {
                auto census = snbc_order_census(sample_cover(fig8, n, spec, t), k);
                long long count = 0;
                for (const auto& [order, c] : census)
                    if (order >= r) count += c;
                sum += count;
                sumsq += static_cast<double>(count) * count;
            }
            double mean = sum / trials;
            double stderr_ = std::sqrt(std::max(0.0, sumsq / trials - mean * mean) / trials);
            double choose = (r == 1) ? k * (k - 1) / 2.0 : k * (k - 1) * (k - 2) / 6.0;
            double bound = static_cast<double>(base_traces[k - 1]) * n * choose *
                           std::pow(static_cast<double>(k) / (n - 2 * k + 1), r + 1);
            CHECK(mean <= bound + 3 * stderr_ + 1e-12);
        }
    }
}
