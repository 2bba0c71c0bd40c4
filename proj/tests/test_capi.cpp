#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "cover_spectra.h"

namespace {

struct GraphHandle {
    cs_graph* g = nullptr;
    ~GraphHandle() { cs_graph_destroy(g); }
};

struct StringHandle {
    char* s = nullptr;
    ~StringHandle() { cs_string_free(s); }
};

}  // namespace

TEST_CASE("c api: graph construction, stats and io") {
    GraphHandle fig8;
    REQUIRE(cs_graph_bouquet(2, 0, &fig8.g) == CS_OK);
    CHECK(cs_graph_vertex_count(fig8.g) == 1);
    CHECK(cs_graph_dir_edge_count(fig8.g) == 4);
    CHECK(cs_graph_edge_count(fig8.g) == 2);

    cs_graph_stats_t stats{};
    REQUIRE(cs_graph_stats(fig8.g, &stats) == CS_OK);
    CHECK(stats.order == 1);
    CHECK(stats.euler_characteristic_twice == -2);
    CHECK(stats.half_loop_count == 0);
    CHECK(stats.non_half_edge_count == 2);

    int degree = 0;
    REQUIRE(cs_graph_degrees(fig8.g, &degree) == CS_OK);
    CHECK(degree == 4);

    double adjacency = 0;
    REQUIRE(cs_graph_adjacency(fig8.g, &adjacency) == CS_OK);
    CHECK(adjacency == 4.0);

    StringHandle text;
    REQUIRE(cs_graph_format(fig8.g, &text.s) == CS_OK);
    GraphHandle back;
    REQUIRE(cs_graph_parse(text.s, &back.g) == CS_OK);
    StringHandle text2;
    REQUIRE(cs_graph_format(back.g, &text2.s) == CS_OK);
    CHECK(std::string(text.s) == text2.s);

    int iso = 0;
    REQUIRE(cs_graph_is_isomorphic(fig8.g, back.g, 24, &iso) == CS_OK);
    CHECK(iso == 1);

    // Error propagation: half-loops cannot be subdivided.
    GraphHandle half;
    REQUIRE(cs_graph_bouquet(0, 1, &half.g) == CS_OK);
    cs_graph* bad = nullptr;
    CHECK(cs_graph_subdivide(half.g, 0, 2, &bad) == CS_ERROR_INVALID_ARGUMENT);
    CHECK(std::strlen(cs_last_error()) > 0);

    cs_graph* invalid = nullptr;
    int tails[1] = {0}, heads[1] = {0}, iota[1] = {5};
    CHECK(cs_graph_create(1, 1, tails, heads, iota, &invalid) == CS_ERROR_INVALID_ARGUMENT);
}

TEST_CASE("c api: spectra and ihara") {
    GraphHandle fig8;
    REQUIRE(cs_graph_bouquet(2, 0, &fig8.g) == CS_OK);
    double spectrum[1] = {0};
    REQUIRE(cs_graph_adjacency_spectrum(fig8.g, spectrum) == CS_OK);
    CHECK(spectrum[0] == doctest::Approx(4.0));

    double m1 = 0;
    REQUIRE(cs_graph_mu1(fig8.g, &m1) == CS_OK);
    CHECK(m1 == doctest::Approx(3.0));

    double residual = 1;
    REQUIRE(cs_ihara_check(fig8.g, 0, &residual) == CS_OK);
    CHECK(residual < 1e-9);

    double worst = 1;
    StringHandle tsv;
    REQUIRE(cs_ihara_check_random(25, 9, 7, &worst, &tsv.s) == CS_OK);
    CHECK(worst < 1e-9);
    CHECK(std::string(tsv.s).find("#index\tvertices") == 0);
}

TEST_CASE("c api: covers and spectral report") {
    GraphHandle fig8;
    REQUIRE(cs_graph_bouquet(2, 0, &fig8.g) == CS_OK);

    cs_cover* cover = nullptr;
    REQUIRE(cs_cover_sample(fig8.g, 8, "permutation", 42, 0, &cover) == CS_OK);
    StringHandle serialized;
    REQUIRE(cs_cover_format(cover, &serialized.s) == CS_OK);
    cs_cover* parsed = nullptr;
    REQUIRE(cs_cover_parse(serialized.s, fig8.g, &parsed) == CS_OK);
    StringHandle serialized2;
    REQUIRE(cs_cover_format(parsed, &serialized2.s) == CS_OK);
    CHECK(std::string(serialized.s) == serialized2.s);

    GraphHandle realized;
    REQUIRE(cs_cover_realize(cover, &realized.g) == CS_OK);
    CHECK(cs_graph_vertex_count(realized.g) == 8);
    CHECK(cs_graph_dir_edge_count(realized.g) == 32);

    StringHandle report;
    REQUIRE(cs_spectral_report(realized.g, fig8.g, 4, 0.05, &report.s) == CS_OK);
    CHECK(std::string(report.s).find("\"new_spectrum\"") != std::string::npos);

    cs_cover_destroy(cover);
    cs_cover_destroy(parsed);

    // Model validation flows through.
    cs_cover* bad = nullptr;
    CHECK(cs_cover_sample(fig8.g, 8, "bogus", 1, 0, &bad) == CS_ERROR_INVALID_ARGUMENT);
    GraphHandle half;
    REQUIRE(cs_graph_bouquet(0, 1, &half.g) == CS_OK);
    CHECK(cs_cover_sample(half.g, 8, "permutation", 1, 0, &bad) == CS_ERROR_INVALID_ARGUMENT);
}

TEST_CASE("c api: experiment tables") {
    GraphHandle fig8;
    REQUIRE(cs_graph_bouquet(2, 0, &fig8.g) == CS_OK);

    StringHandle tsv, meta;
    REQUIRE(cs_expect_table(fig8.g, "permutation", "8", 2, 500, 11, 2, &tsv.s, &meta.s) == CS_OK);
    std::string table(tsv.s);
    CHECK(table.find("#model\tn\tshape") == 0);
    CHECK(std::string(meta.s).find("\"table\": \"expect\"") != std::string::npos);

    StringHandle scan_tsv, scan_meta;
    REQUIRE(cs_trace_scan(fig8.g, "permutation", "2,4", "8,16", 200, 3, 0, 0, 0, 0, 2, &scan_tsv.s, &scan_meta.s) ==
            CS_OK);
    CHECK(std::string(scan_tsv.s).find("#k\tn\tmean") == 0);

    StringHandle na_tsv, na_meta;
    REQUIRE(cs_nonalon_scan(fig8.g, "permutation", 0.05, "8,16", 200, 5, 2, &na_tsv.s, &na_meta.s) == CS_OK);
    CHECK(std::string(na_tsv.s).find("#n\tp_hat") == 0);

    // Reproducibility: identical parameters give identical bytes.
    StringHandle again;
    REQUIRE(cs_nonalon_scan(fig8.g, "permutation", 0.05, "8,16", 200, 5, 1, &again.s, nullptr) == CS_OK);
    CHECK(std::string(na_tsv.s) == again.s);
}

TEST_CASE("c api: tangles, shannon, bounds") {
    GraphHandle b3;
    REQUIRE(cs_graph_bouquet(3, 0, &b3.g) == CS_OK);
    cs_tangle_report_t report{};
    StringHandle witness;
    REQUIRE(cs_tangle_search(b3.g, 2.9, 2, 50, &report, &witness.s) == CS_OK);
    CHECK(report.found == 1);
    CHECK(report.witness_order == 1);
    CHECK(witness.s != nullptr);
    GraphHandle w;
    REQUIRE(cs_graph_parse(witness.s, &w.g) == CS_OK);
    CHECK(cs_graph_edge_count(w.g) == 2);

    GraphHandle fig8;
    REQUIRE(cs_graph_bouquet(2, 0, &fig8.g) == CS_OK);
    int lengths[2] = {1, 1};
    cs_shannon_result_t shannon{};
    REQUIRE(cs_shannon_valence(fig8.g, lengths, &shannon) == CS_OK);
    CHECK(shannon.valence == doctest::Approx(4.0).epsilon(1e-8));

    cs_markov_bounds_t bounds{};
    REQUIRE(cs_markov_bounds(101, 20, &bounds) == CS_OK);
    CHECK(bounds.hashimoto == doctest::Approx(20.13).epsilon(1e-3));
    CHECK(bounds.hashimoto < bounds.adjacency_balanced);

    cs_puder_comparison_t puder{};
    REQUIRE(cs_puder_comparison(4, &puder) == CS_OK);
    CHECK(puder.offset_bound == doctest::Approx(2 * std::sqrt(3.0) + 0.86));
}
