#include <doctest.h>

#include <cmath>

#include "covers.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "linalg.hpp"
#include "rng.hpp"
#include "tangles.hpp"
#include "walks.hpp"

using namespace cspec;

TEST_CASE("mu1") {
    for (int len : {3, 4, 7}) CHECK(mu1(Graph::cycle(len)) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(mu1(Graph::bouquet(2)) == doctest::Approx(3.0).epsilon(1e-9));
    // Subdividing a loop lowers mu1 but keeps it above 1.
    Graph sub = subdivide_edge(Graph::bouquet(2), 0, 10);
    double m = mu1(sub);
    CHECK(m > 1.0 + 1e-6);
    CHECK(m < 3.0 - 1e-6);
}

TEST_CASE("subdivision strictly decreases mu1") {
    Graph fig8 = Graph::bouquet(2);
    double prev = mu1(fig8);
    for (int s : {2, 4, 8}) {
        double cur = mu1(subdivide_edge(fig8, 0, s));
        CHECK(cur < prev - 1e-10);
        CHECK(cur > 1.0);
        prev = cur;
    }
}

TEST_CASE("mu1 via the ihara root cross-check") {
    RngStream rng(2468);
    int tested = 0;
    for (int trial = 0; trial < 40 && tested < 12; ++trial) {
        Graph g = prune(random_graph(rng, 7, 5)).graph;
        if (g.empty() || !g.connected() || g.order() < 1) continue;
        CHECK(mu1(g) == doctest::Approx(mu1_via_ihara_root(g)).epsilon(1e-8));
        ++tested;
    }
    CHECK(tested == 12);
}

TEST_CASE("m_lower pinned values") {
    CHECK(m_lower(4) == 1);
    CHECK(m_lower(10) == 2);
    CHECK(m_lower(26) == 3);
    CHECK_THROWS_AS(m_lower(2), Error);
}

TEST_CASE("epsilon0") {
    Graph fig8 = Graph::bouquet(2);
    CHECK(epsilon0(fig8, 5) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(epsilon0(fig8, 4) == doctest::Approx(3.0 + 1.0 - 2.0 * std::sqrt(3.0)).epsilon(1e-10));
    // Boundary: mu1 = sqrt(d-1) exactly is rejected (cycle has mu1 = 1 = sqrt(2-1)... use d where it fails).
    CHECK_THROWS_AS(epsilon0(Graph::cycle(4), 5), Error);
}

TEST_CASE("tree_radius") {
    Graph fig8 = Graph::bouquet(2);
    CHECK(tree_radius(fig8, 4) == doctest::Approx(4.0));
    CHECK(tree_radius(fig8, 5) == doctest::Approx(3.0 + 4.0 / 3.0));
    CHECK_THROWS_AS(tree_radius(fig8, 3), Error);  // degree 4 > 3
}

TEST_CASE("build_relative_tree") {
    // Single vertex, d = 3, two rounds: root of degree 3, middle layer
    // degree 3, leaves.
    Graph root = Graph::single_vertex();
    Graph t2 = build_relative_tree(root, 3, 2);
    CHECK(t2.vertex_count() == 1 + 3 + 6);
    CHECK(t2.degree(0) == 3);
    int leaves = 0, interior = 0;
    for (int v = 1; v < t2.vertex_count(); ++v) {
        if (t2.degree(v) == 1) ++leaves;
        if (t2.degree(v) == 3) ++interior;
    }
    CHECK(leaves == 6);
    CHECK(interior == 3 + 1 - 1);

    // Zero rounds: unchanged.
    Graph fig8 = Graph::bouquet(2);
    CHECK(is_isomorphic(build_relative_tree(fig8, 5, 0), fig8));

    // One round at d = 5: one pendant edge appears.
    Graph r1 = build_relative_tree(fig8, 5, 1);
    CHECK(r1.vertex_count() == 2);
    CHECK(r1.degree(0) == 5);
    CHECK(r1.degree(1) == 1);
}

TEST_CASE("build_relative_tree over a base") {
    Graph base = Graph::bouquet(2);
    ModelSpec spec{ModelKind::Permutation, 3};
    BGraph psi = realize(sample_cover(base, 1, spec, 0));
    BGraph grown = build_relative_tree(psi, 2);
    grown.validate();
    CHECK(is_etale(grown));
    // The start vertex is already complete, so nothing grows.
    CHECK(grown.total.vertex_count() == 1);

    // A single lifted edge grows towards the 4-regular covering tree.
    GraphBuilder sb(2);
    sb.add_edge(0, 1);
    BGraph s;
    s.total = sb.build();
    s.base = base;
    s.vertex_map = {0, 0};
    s.edge_map = {0, 1};
    s.validate();
    BGraph g1 = build_relative_tree(s, 1);
    CHECK(is_etale(g1));
    for (int v = 0; v < 2; ++v) CHECK(g1.total.degree(v) == 4);
}

TEST_CASE("truncated_tree_radius") {
    Graph fig8 = Graph::bouquet(2);
    CHECK(truncated_tree_radius(fig8, 5, 0) == doctest::Approx(4.0).epsilon(1e-8));

    double prev = 0.0;
    for (int rounds = 0; rounds <= 6; ++rounds) {
        double val = truncated_tree_radius(fig8, 5, rounds);
        CHECK(val >= prev - 1e-9);
        CHECK(val <= tree_radius(fig8, 5) + 1e-8);
        prev = val;
    }
    // Convergence from below towards 13/3 (the full R = 12 run lives in the
    // acceptance suite).
    CHECK(truncated_tree_radius(fig8, 5, 8) > 4.2);
}

TEST_CASE("shannon valence equals lambda1 for unit lengths") {
    auto lambda1 = [](const Graph& g) {
        Matrix a = Matrix::from_row_major(g.vertex_count(), g.vertex_count(), adjacency_matrix(g));
        return symmetric_eigenvalues(a).front();
    };

    // Whole-loop vertex: lambda1 = 2.
    Graph loop = Graph::bouquet(1);
    ShannonResult r = shannon_valence(loop, {1});
    CHECK(r.valence == doctest::Approx(2.0).epsilon(1e-8));

    // Figure-eight with unit lengths: valence 4.
    Graph fig8 = Graph::bouquet(2);
    CHECK(shannon_valence(fig8, {1, 1}).valence == doctest::Approx(4.0).epsilon(1e-8));

    // Doubled lengths match the subdivided graph's lambda1.
    Graph sub = subdivide_edge(subdivide_edge(fig8, 0, 2), 0, 2);
    CHECK(shannon_valence(fig8, {2, 2}).valence == doctest::Approx(lambda1(sub)).epsilon(1e-8));

    // Random connected graphs, unit lengths.
    RngStream rng(5678);
    for (int trial = 0; trial < 25; ++trial) {
        Graph g = random_connected_graph(rng, 2 + rng.uniform_int(7), rng.uniform_int(5));
        std::vector<int> ones(g.edge_count(), 1);
        ShannonResult sr = shannon_valence(g, ones);
        CHECK(sr.valence == doctest::Approx(lambda1(g)).epsilon(1e-8));
        CHECK(sr.bisection_residual < 1e-9);
        CHECK(sr.valence == doctest::Approx(1.0 / sr.z0));
    }

    // General lengths against the explicit VLG.
    for (int trial = 0; trial < 10; ++trial) {
        Graph g = prune(random_connected_graph(rng, 2 + rng.uniform_int(4), 2 + rng.uniform_int(3), false)).graph;
        if (g.empty() || !g.connected()) continue;
        std::vector<int> oriented;
        for (int rep : g.orbit_reps()) oriented.push_back(rep);
        OrderedGraph og{g, oriented};
        std::vector<int> lengths(g.edge_count());
        for (int& k : lengths) k = 1 + rng.uniform_int(3);
        OrderedGraph built = vlg(og, lengths);
        CHECK(shannon_valence(g, lengths).valence == doctest::Approx(lambda1(built.graph)).epsilon(1e-8));
    }
}

TEST_CASE("s_d_series") {
    auto coeffs = s_d_series(3, 10);  // a_2 .. a_10
    CHECK(coeffs[0] == Rational(2));  // a_2 = d - 1
    CHECK(coeffs[1] == Rational(0));  // odd
    CHECK(coeffs[2] == Rational(4));  // a_4 = (d-1)^2
    CHECK(coeffs[3] == Rational(0));
    CHECK(coeffs[4] == Rational(16));  // a_6 = 2 (d-1)^3

    // DP oracle: walks on the rooted (d-1)-ary tree returning to the root
    // only at the end.
    for (int d : {3, 4, 5}) {
        auto series = s_d_series(d, 8);
        // depth-indexed counts of walks that avoid the root until the end
        const int kmax = 8;
        std::vector<std::vector<long long>> at(kmax + 1, std::vector<long long>(kmax + 2, 0));
        at[0][1] = d - 1;  // first step descends to one of d-1 children
        std::vector<long long> first_return(kmax + 1, 0);
        for (int step = 0; step + 1 <= kmax; ++step)
            for (int depth = 1; depth <= kmax; ++depth) {
                long long ways = at[step][depth];
                if (!ways) continue;
                // descend
                if (depth + 1 <= kmax + 1) at[step + 1][depth + 1] += ways * (d - 1);
                // ascend
                if (depth == 1)
                    first_return[step + 2] += ways;  // step+1 moves, arriving at root
                else
                    at[step + 1][depth - 1] += ways;
            }
        for (int k = 2; k <= kmax; ++k) CHECK(series[k - 2] == Rational(first_return[k]));
    }
}

TEST_CASE("curious identity") {
    Graph fig8 = Graph::bouquet(2);
    // Degenerate case: a d-regular psi reduces the identity to a scalar
    // relation.
    Graph c4 = Graph::cycle(4);  // 2-regular; embed in d = 5 anyway as a subgraph shape
    CHECK(curious_identity_check(fig8, 4, {0.05, 0.1, 0.2}) < 1e-12);
    CHECK(curious_identity_check(fig8, 5, {0.1}) < 1e-9);
    CHECK(curious_identity_check(c4, 5, {0.03, 0.1, 0.18}) < 1e-9);
    // z -> 0 limit: both sides approach the identity matrix.
    CHECK(curious_identity_check(fig8, 5, {1e-8}) < 1e-7);
    CHECK_THROWS_AS(curious_identity_check(fig8, 5, {0.3}), Error);

    RngStream rng(13579);
    for (int trial = 0; trial < 10; ++trial) {
        Graph g = prune(random_graph(rng, 6, 4, false)).graph;
        if (g.empty()) continue;
        int maxdeg = 0;
        for (int v = 0; v < g.vertex_count(); ++v) maxdeg = std::max(maxdeg, g.degree(v));
        int d = std::max(3, maxdeg);
        CHECK(curious_identity_check(g, d, {0.02, 0.07, 1.0 / (2.1 * std::sqrt(d - 1.0))}) < 1e-9);
    }
}

TEST_CASE("has_tangles") {
    // Trees and single cycles are tangle-free for nu > 1.
    CHECK_FALSE(has_tangles(Graph::path(4), 1.5, 3, 50).found);
    CHECK_FALSE(has_tangles(Graph::cycle(5), 1.1, 3, 50).found);

    // A graph containing the figure-eight.
    GraphBuilder gb(3);
    gb.add_edge(0, 0);
    gb.add_edge(0, 0);
    gb.add_edge(0, 1);
    gb.add_edge(1, 2);
    Graph g = gb.build();
    TangleReport report = has_tangles(g, 2.9, 2, 50);
    CHECK(report.found);
    REQUIRE(report.witness.has_value());
    CHECK(report.witness_order < 2);
    CHECK(report.witness_mu1 >= 2.9);
    CHECK(mu1(*report.witness) == doctest::Approx(report.witness_mu1));
    CHECK(report.witness->connected());
    for (int v = 0; v < report.witness->vertex_count(); ++v) CHECK(report.witness->degree(v) >= 2);

    // nu above mu1(g): no tangles by monotonicity.
    CHECK_FALSE(has_tangles(g, 3.5, 5, 50).found);

    // Theta graph: mu1 = 2^(1/?) ... just verify the witness search sees it
    // when nu is modest and r allows order 1.
    GraphBuilder theta(2);
    theta.add_edge(0, 1);
    theta.add_edge(0, 1);
    theta.add_edge(0, 1);
    TangleReport tr = has_tangles(theta.build(), 1.5, 2, 50);
    CHECK(tr.found);
    CHECK(tr.witness_order == 1);

    // Budget disclosure: a core whose order is not below r forces the
    // subgraph search, and a 1-edge budget cannot be complete there.
    Graph b3 = Graph::bouquet(3);
    TangleReport budget = has_tangles(b3, 2.9, 2, 1);
    CHECK_FALSE(budget.found);
    CHECK(budget.search_budget_exhausted);
    TangleReport full = has_tangles(b3, 2.9, 2, 50);
    CHECK(full.found);
    CHECK(full.witness_order == 1);
    CHECK(full.witness_mu1 == doctest::Approx(3.0).epsilon(1e-8));
}

TEST_CASE("rayleigh perturbation bound") {
    RngStream rng(36912);
    for (int trial = 0; trial < 300; ++trial) {
        int n = 2 + rng.uniform_int(6);
        Matrix m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                double v = (rng.uniform_real() - 0.5) * 4;
                m(i, j) = v;
                m(j, i) = v;
            }
        double norm = 0.0;
        for (double v : symmetric_eigenvalues(m)) norm = std::max(norm, std::fabs(v));
        std::vector<double> f1(n), delta(n);
        double f1norm = 0.0;
        for (int i = 0; i < n; ++i) {
            f1[i] = rng.uniform_real() - 0.5;
            f1norm += f1[i] * f1[i];
        }
        f1norm = std::sqrt(f1norm);
        double eps = rng.uniform_real() * 0.9;
        double dnorm = 0.0;
        for (int i = 0; i < n; ++i) {
            delta[i] = rng.uniform_real() - 0.5;
            dnorm += delta[i] * delta[i];
        }
        dnorm = std::sqrt(dnorm);
        std::vector<double> f2(n);
        for (int i = 0; i < n; ++i) f2[i] = f1[i] + delta[i] / dnorm * eps * f1norm;
        CHECK(std::fabs(rayleigh(m, f2) - rayleigh(m, f1)) <= 2 * norm * eps + 1e-9);
    }
}

TEST_CASE("push_forward") {
    Graph base = Graph::cycle(3);
    ModelSpec spec{ModelKind::Permutation, 44};

    // Degree-1 cover: identity.
    BGraph ident = realize(sample_cover(base, 1, spec, 0));
    std::vector<double> f = {1.0, 2.0, 3.0};
    CHECK(push_forward(ident, f) == f);

    // Indicator of one fibre point pushes to a unit vector.
    BGraph two = realize(sample_cover(base, 2, spec, 1));
    std::vector<double> ind(two.total.vertex_count(), 0.0);
    ind[0] = 1.0;
    std::vector<double> pushed = push_forward(two, ind);
    double total = 0;
    for (double v : pushed) total += v;
    CHECK(total == 1.0);
    CHECK(pushed[two.vertex_map[0]] == 1.0);

    // Intertwining: pi_* A_T = A_G pi_* exactly.
    RngStream rng(8);
    BGraph three = realize(sample_cover(base, 3, spec, 2));
    Matrix at = Matrix::from_row_major(three.total.vertex_count(), three.total.vertex_count(),
                                       adjacency_matrix(three.total));
    Matrix ag = Matrix::from_row_major(3, 3, adjacency_matrix(base));
    std::vector<double> rf(three.total.vertex_count());
    for (double& v : rf) v = rng.uniform_real() - 0.5;
    std::vector<double> lhs = push_forward(three, at.apply(rf));
    std::vector<double> rhs = ag.apply(push_forward(three, rf));
    for (int i = 0; i < 3; ++i) CHECK(lhs[i] == doctest::Approx(rhs[i]).epsilon(1e-12));

    // Non-covering morphisms are rejected.
    GraphBuilder sb(2);
    sb.add_edge(0, 1);
    BGraph notcov;
    notcov.total = sb.build();
    notcov.base = base;
    notcov.vertex_map = {0, 1};
    notcov.edge_map = {0, base.iota(0)};
    notcov.validate();
    CHECK_THROWS_AS(push_forward(notcov, {1.0, 1.0}), Error);
}

TEST_CASE("fundamental subgraph experiment smoke") {
    Graph fig8 = Graph::bouquet(2);
    // psi: both loops at one fibre vertex.
    BGraph psi;
    psi.total = fig8;
    psi.base = fig8;
    psi.vertex_map = {0};
    psi.edge_map = {0, 1, 2, 3};
    psi.validate();

    ModelSpec spec{ModelKind::Permutation, 4242};
    auto rows = fundamental_subgraph_experiment(fig8, psi, {40}, spec, 20, 4000, 0.3, true, 2);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].accepted == 20);
    CHECK(rows[0].lambda == doctest::Approx(4.0));
    CHECK(rows[0].attempts >= 20);
    // Conditioned samples contain psi, so the max new eigenvalue is large.
    CHECK(rows[0].mean_max_new > 3.0);

    auto contrast = fundamental_subgraph_experiment(fig8, psi, {40}, spec, 20, 10, 0.3, false, 2);
    CHECK(contrast[0].accepted == 20);
    CHECK(contrast[0].attempts == 20);
}
