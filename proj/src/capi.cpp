#include "cover_spectra.h"

#include <cstring>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "covers.hpp"
#include "errors.hpp"
#include "expectations.hpp"
#include "graph.hpp"
#include "linalg.hpp"
#include "rng.hpp"
#include "spectra.hpp"
#include "tangles.hpp"
#include "tracelab.hpp"
#include "tsv.hpp"
#include "walks.hpp"

using nlohmann::json;

struct cs_graph {
    cspec::Graph graph;
};

struct cs_cover {
    cspec::CoordCover cover;
};

namespace {

thread_local std::string g_last_error;

cs_status status_of(const cspec::Error& e) {
    switch (e.kind()) {
        case cspec::ErrorKind::InvalidArgument: return CS_ERROR_INVALID_ARGUMENT;
        case cspec::ErrorKind::BudgetExhausted: return CS_ERROR_BUDGET_EXHAUSTED;
        case cspec::ErrorKind::SizeCap: return CS_ERROR_SIZE_CAP;
        case cspec::ErrorKind::NoConvergence: return CS_ERROR_NO_CONVERGENCE;
        case cspec::ErrorKind::Io: return CS_ERROR_IO;
    }
    return CS_ERROR_INTERNAL;
}

template <typename Fn>
cs_status guarded(Fn&& fn) {
    try {
        fn();
        return CS_OK;
    } catch (const cspec::Error& e) {
        g_last_error = e.what();
        return status_of(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return CS_ERROR_INTERNAL;
    }
}

char* copy_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

std::vector<int> parse_int_csv(const char* csv, const char* what) {
    cspec::require(csv != nullptr && *csv != '\0', std::string(what) + ": empty list");
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            size_t pos = 0;
            int v = std::stoi(item, &pos);
            cspec::require(pos == item.size(), std::string(what) + ": bad integer '" + item + "'");
            out.push_back(v);
        } catch (const cspec::Error&) {
            throw;
        } catch (const std::exception&) {
            cspec::fail_invalid(std::string(what) + ": bad integer '" + item + "'");
        }
    }
    cspec::require(!out.empty(), std::string(what) + ": empty list");
    return out;
}

void require_out(const void* p, const char* what) { cspec::require(p != nullptr, std::string(what) + ": null output"); }

}  // namespace

extern "C" {

const char* cs_status_name(cs_status status) {
    switch (status) {
        case CS_OK: return "ok";
        case CS_ERROR_INVALID_ARGUMENT: return "invalid argument";
        case CS_ERROR_BUDGET_EXHAUSTED: return "budget exhausted";
        case CS_ERROR_SIZE_CAP: return "size cap exceeded";
        case CS_ERROR_NO_CONVERGENCE: return "no convergence";
        case CS_ERROR_IO: return "io error";
        case CS_ERROR_INTERNAL: return "internal error";
    }
    return "unknown";
}

const char* cs_last_error(void) { return g_last_error.c_str(); }

void cs_string_free(char* text) { std::free(text); }

cs_status cs_graph_create(int vertex_count, int dir_edge_count, const int* tails, const int* heads, const int* iota,
                          cs_graph** out) {
    return guarded([&] {
        require_out(out, "cs_graph_create");
        cspec::require(dir_edge_count == 0 || (tails && heads && iota), "cs_graph_create: null edge arrays");
        std::vector<int> t(tails, tails + dir_edge_count), h(heads, heads + dir_edge_count),
            i(iota, iota + dir_edge_count);
        *out = new cs_graph{cspec::Graph(vertex_count, std::move(t), std::move(h), std::move(i))};
    });
}

void cs_graph_destroy(cs_graph* graph) { delete graph; }

cs_status cs_graph_parse(const char* text, cs_graph** out) {
    return guarded([&] {
        require_out(out, "cs_graph_parse");
        cspec::require(text != nullptr, "cs_graph_parse: null text");
        *out = new cs_graph{cspec::parse_graph(text)};
    });
}

cs_status cs_graph_format(const cs_graph* graph, char** out) {
    return guarded([&] {
        require_out(out, "cs_graph_format");
        cspec::require(graph != nullptr, "cs_graph_format: null graph");
        *out = copy_string(cspec::format_graph(graph->graph));
    });
}

cs_status cs_graph_read_file(const char* path, cs_graph** out) {
    return guarded([&] {
        require_out(out, "cs_graph_read_file");
        cspec::require(path != nullptr, "cs_graph_read_file: null path");
        std::ifstream in(path);
        if (!in) throw cspec::Error(cspec::ErrorKind::Io, std::string("cannot open '") + path + "'");
        std::stringstream buffer;
        buffer << in.rdbuf();
        *out = new cs_graph{cspec::parse_graph(buffer.str())};
    });
}

cs_status cs_graph_write_file(const cs_graph* graph, const char* path) {
    return guarded([&] {
        cspec::require(graph != nullptr && path != nullptr, "cs_graph_write_file: null argument");
        std::ofstream outf(path);
        if (!outf) throw cspec::Error(cspec::ErrorKind::Io, std::string("cannot open '") + path + "'");
        outf << cspec::format_graph(graph->graph);
        if (!outf) throw cspec::Error(cspec::ErrorKind::Io, std::string("cannot write '") + path + "'");
    });
}

cs_status cs_graph_bouquet(int whole_loops, int half_loops, cs_graph** out) {
    return guarded([&] {
        require_out(out, "cs_graph_bouquet");
        cspec::require(whole_loops >= 0 && half_loops >= 0, "cs_graph_bouquet: negative count");
        *out = new cs_graph{cspec::Graph::bouquet(whole_loops, half_loops)};
    });
}

cs_status cs_graph_cycle(int length, cs_graph** out) {
    return guarded([&] {
        require_out(out, "cs_graph_cycle");
        *out = new cs_graph{cspec::Graph::cycle(length)};
    });
}

cs_status cs_graph_random(unsigned long long seed, int max_vertices, int max_degree, cs_graph** out) {
    return guarded([&] {
        require_out(out, "cs_graph_random");
        cspec::RngStream rng(seed);
        *out = new cs_graph{cspec::random_graph(rng, max_vertices, max_degree)};
    });
}

int cs_graph_vertex_count(const cs_graph* graph) { return graph ? graph->graph.vertex_count() : -1; }
int cs_graph_dir_edge_count(const cs_graph* graph) { return graph ? graph->graph.dir_edge_count() : -1; }
int cs_graph_edge_count(const cs_graph* graph) { return graph ? graph->graph.edge_count() : -1; }

cs_status cs_graph_stats(const cs_graph* graph, cs_graph_stats_t* out) {
    return guarded([&] {
        require_out(out, "cs_graph_stats");
        cspec::require(graph != nullptr, "cs_graph_stats: null graph");
        cspec::GraphStats s = cspec::stats(graph->graph);
        out->order = s.order;
        out->euler_characteristic_twice = s.euler_characteristic_twice;
        out->half_loop_count = s.half_loop_count;
        out->non_half_edge_count = s.non_half_edge_count;
    });
}

cs_status cs_graph_degrees(const cs_graph* graph, int* degrees) {
    return guarded([&] {
        cspec::require(graph != nullptr && degrees != nullptr, "cs_graph_degrees: null argument");
        std::vector<int> d = graph->graph.degree_sequence();
        std::copy(d.begin(), d.end(), degrees);
    });
}

cs_status cs_graph_adjacency(const cs_graph* graph, double* out) {
    return guarded([&] {
        cspec::require(graph != nullptr && out != nullptr, "cs_graph_adjacency: null argument");
        std::vector<double> a = cspec::adjacency_matrix(graph->graph);
        std::copy(a.begin(), a.end(), out);
    });
}

cs_status cs_graph_hashimoto(const cs_graph* graph, double* out) {
    return guarded([&] {
        cspec::require(graph != nullptr && out != nullptr, "cs_graph_hashimoto: null argument");
        std::vector<double> h = cspec::hashimoto_matrix(graph->graph);
        std::copy(h.begin(), h.end(), out);
    });
}

cs_status cs_graph_prune(const cs_graph* graph, cs_graph** out) {
    return guarded([&] {
        require_out(out, "cs_graph_prune");
        cspec::require(graph != nullptr, "cs_graph_prune: null graph");
        *out = new cs_graph{cspec::prune(graph->graph).graph};
    });
}

cs_status cs_graph_subdivide(const cs_graph* graph, int dir_edge, int parts, cs_graph** out) {
    return guarded([&] {
        require_out(out, "cs_graph_subdivide");
        cspec::require(graph != nullptr, "cs_graph_subdivide: null graph");
        *out = new cs_graph{cspec::subdivide_edge(graph->graph, dir_edge, parts)};
    });
}

cs_status cs_graph_is_isomorphic(const cs_graph* a, const cs_graph* b, int size_cap, int* out) {
    return guarded([&] {
        cspec::require(a != nullptr && b != nullptr && out != nullptr, "cs_graph_is_isomorphic: null argument");
        *out = cspec::is_isomorphic(a->graph, b->graph, size_cap > 0 ? size_cap : 24) ? 1 : 0;
    });
}

cs_status cs_graph_adjacency_spectrum(const cs_graph* graph, double* out) {
    return guarded([&] {
        cspec::require(graph != nullptr && out != nullptr, "cs_graph_adjacency_spectrum: null argument");
        int n = graph->graph.vertex_count();
        cspec::Matrix a = cspec::Matrix::from_row_major(n, n, cspec::adjacency_matrix(graph->graph));
        std::vector<double> vals = cspec::symmetric_eigenvalues(a);
        std::copy(vals.begin(), vals.end(), out);
    });
}

cs_status cs_graph_mu1(const cs_graph* graph, double* out) {
    return guarded([&] {
        cspec::require(graph != nullptr && out != nullptr, "cs_graph_mu1: null argument");
        *out = cspec::mu1(graph->graph);
    });
}

cs_status cs_ihara_check(const cs_graph* graph, int sample_points, double* max_residual) {
    return guarded([&] {
        cspec::require(graph != nullptr && max_residual != nullptr, "cs_ihara_check: null argument");
        std::vector<double> points;
        if (sample_points > 0) {
            points.resize(sample_points);
            for (int i = 0; i < sample_points; ++i)
                points[i] = 2.1 + (sample_points == 1 ? 0.0 : i * (1.0 / (sample_points - 1)));
        }
        *max_residual = cspec::ihara_check(graph->graph, points).max_abs_residual;
    });
}

cs_status cs_ihara_check_random(int count, int max_vertices, unsigned long long seed, double* worst_residual,
                                char** tsv) {
    return guarded([&] {
        cspec::require(count >= 1, "cs_ihara_check_random: need at least one graph");
        cspec::require(worst_residual != nullptr, "cs_ihara_check_random: null output");
        cspec::RngStream rng(seed);
        cspec::TsvTable table({"index", "vertices", "dir_edges", "half_loops", "residual"});
        double worst = 0.0;
        for (int i = 0; i < count; ++i) {
            cspec::Graph g = cspec::random_graph(rng, max_vertices, 6);
            double residual = cspec::ihara_check(g).max_abs_residual;
            worst = std::max(worst, residual);
            table.begin_row().cell(i).cell(g.vertex_count()).cell(g.dir_edge_count()).cell(g.half_loop_count()).cell(
                residual);
        }
        *worst_residual = worst;
        if (tsv) *tsv = copy_string(table.render());
    });
}

cs_status cs_spectral_report(const cs_graph* cover, const cs_graph* base, int d, double epsilon, char** json_out) {
    return guarded([&] {
        cspec::require(cover != nullptr && base != nullptr && json_out != nullptr,
                       "cs_spectral_report: null argument");
        cspec::SpectralReport report = cspec::spectral_report(cover->graph, base->graph, d, epsilon);
        *json_out = copy_string(cspec::spectral_report_to_json(report));
    });
}

cs_status cs_cover_sample(const cs_graph* base, int n, const char* model, unsigned long long seed,
                          unsigned long long trial, cs_cover** out) {
    return guarded([&] {
        require_out(out, "cs_cover_sample");
        cspec::require(base != nullptr && model != nullptr, "cs_cover_sample: null argument");
        cspec::ModelSpec spec{cspec::parse_model(model), seed};
        *out = new cs_cover{cspec::sample_cover(base->graph, n, spec, trial)};
    });
}

void cs_cover_destroy(cs_cover* cover) { delete cover; }

cs_status cs_cover_realize(const cs_cover* cover, cs_graph** out) {
    return guarded([&] {
        require_out(out, "cs_cover_realize");
        cspec::require(cover != nullptr, "cs_cover_realize: null cover");
        *out = new cs_graph{cspec::realize(cover->cover).total};
    });
}

cs_status cs_cover_format(const cs_cover* cover, char** out) {
    return guarded([&] {
        require_out(out, "cs_cover_format");
        cspec::require(cover != nullptr, "cs_cover_format: null cover");
        *out = copy_string(cspec::format_cover(cover->cover));
    });
}

cs_status cs_cover_parse(const char* text, const cs_graph* base, cs_cover** out) {
    return guarded([&] {
        require_out(out, "cs_cover_parse");
        cspec::require(text != nullptr && base != nullptr, "cs_cover_parse: null argument");
        *out = new cs_cover{cspec::parse_cover(text, base->graph)};
    });
}

cs_status cs_expect_table(const cs_graph* base, const char* model, const char* n_csv, int max_edges, long trials,
                          unsigned long long seed, int threads, char** tsv, char** meta_json) {
    return guarded([&] {
        cspec::require(base != nullptr && model != nullptr && tsv != nullptr, "cs_expect_table: null argument");
        cspec::ModelSpec spec{cspec::parse_model(model), seed};
        std::vector<int> ns = parse_int_csv(n_csv, "cs_expect_table n list");
        auto shapes = cspec::enumerate_etale_shapes(base->graph, max_edges, spec.kind);

        cspec::TsvTable table({"model", "n", "shape", "edges", "order", "closed_form", "mc_mean", "mc_stderr",
                               "z_score"});
        for (int n : ns) {
            for (const auto& shape : shapes) {
                if (shape.graph.total.vertex_count() > n || shape.graph.total.edge_count() > n) continue;
                cspec::Rational closed = cspec::expected_count(shape.graph, n, spec);
                cspec::MonteCarloEstimate mc =
                    cspec::monte_carlo_expected_count(shape.graph, n, spec, trials, threads);
                double cf = cspec::to_double(closed);
                double z = mc.stderr_of_mean > 0 ? (mc.mean - cf) / mc.stderr_of_mean : 0.0;
                table.begin_row()
                    .cell(std::string(model))
                    .cell(n)
                    .cell(shape.id)
                    .cell(shape.graph.total.edge_count())
                    .cell(shape.graph.total.order())
                    .cell(cf)
                    .cell(mc.mean)
                    .cell(mc.stderr_of_mean)
                    .cell(z);
            }
        }
        *tsv = copy_string(table.render());
        if (meta_json) {
            json meta = {{"tool", "coverspectra"},
                         {"table", "expect"},
                         {"model", model},
                         {"n", ns},
                         {"max_edges", max_edges},
                         {"trials", trials},
                         {"seed", seed},
                         {"shapes", shapes.size()},
                         {"base", cspec::format_graph(base->graph)}};
            *meta_json = copy_string(meta.dump(2));
        }
    });
}

cs_status cs_trace_scan(const cs_graph* base, const char* model, const char* k_csv, const char* n_csv, long trials,
                        unsigned long long seed, int use_filter, double nu, int r, long tangle_budget, int threads,
                        char** tsv, char** meta_json) {
    return guarded([&] {
        cspec::require(base != nullptr && model != nullptr && tsv != nullptr, "cs_trace_scan: null argument");
        cspec::ModelSpec spec{cspec::parse_model(model), seed};
        std::vector<int> ks = parse_int_csv(k_csv, "cs_trace_scan k list");
        std::vector<int> ns = parse_int_csv(n_csv, "cs_trace_scan n list");
        std::optional<cspec::TangleFilter> filter;
        if (use_filter) filter = cspec::TangleFilter{nu, r, tangle_budget};
        cspec::TraceScanResult scan = cspec::trace_scan(base->graph, spec, ks, ns, trials, filter, threads);

        cspec::TsvTable table({"k", "n", "mean", "stderr", "trials", "filter_flagged"});
        for (const cspec::TraceScanCell& cell : scan.cells)
            table.begin_row()
                .cell(cell.k)
                .cell(cell.n)
                .cell(cell.mean)
                .cell(cell.stderr_of_mean)
                .cell(static_cast<long long>(cell.trials))
                .cell(cell.filter_budget_flagged ? 1 : 0);
        *tsv = copy_string(table.render());
        if (meta_json) {
            json meta = {{"tool", "coverspectra"}, {"table", "trace-scan"}, {"model", model},
                         {"k", ks},               {"n", ns},               {"trials", trials},
                         {"seed", seed},          {"filtered", use_filter != 0},
                         {"base", cspec::format_graph(base->graph)}};
            if (use_filter) {
                meta["nu"] = nu;
                meta["r"] = r;
                meta["tangle_budget"] = tangle_budget;
            }
            *meta_json = copy_string(meta.dump(2));
        }
    });
}

cs_status cs_nonalon_scan(const cs_graph* base, const char* model, double eps, const char* n_csv, long trials,
                          unsigned long long seed, int threads, char** tsv, char** meta_json) {
    return guarded([&] {
        cspec::require(base != nullptr && model != nullptr && tsv != nullptr, "cs_nonalon_scan: null argument");
        cspec::ModelSpec spec{cspec::parse_model(model), seed};
        std::vector<int> ns = parse_int_csv(n_csv, "cs_nonalon_scan n list");
        cspec::NonAlonScan scan = cspec::nonalon_probability_scan(base->graph, spec, eps, ns, trials, threads);

        cspec::TsvTable table({"n", "p_hat", "stderr", "trials"});
        for (const cspec::NonAlonRow& row : scan.rows)
            table.begin_row().cell(row.n).cell(row.p_hat).cell(row.stderr_of_p).cell(
                static_cast<long long>(row.trials));
        *tsv = copy_string(table.render());
        if (meta_json) {
            json meta = {{"tool", "coverspectra"},
                         {"table", "nonalon"},
                         {"model", model},
                         {"epsilon", eps},
                         {"threshold", scan.threshold},
                         {"n", ns},
                         {"trials", trials},
                         {"seed", seed},
                         {"slope", scan.slope},
                         {"slope_ci_half_width", scan.slope_ci_half_width},
                         {"slope_valid", scan.slope_valid},
                         {"base", cspec::format_graph(base->graph)}};
            *meta_json = copy_string(meta.dump(2));
        }
    });
}

cs_status cs_tangle_search(const cs_graph* graph, double nu, int r, long edge_budget, cs_tangle_report_t* out,
                           char** witness_text) {
    return guarded([&] {
        cspec::require(graph != nullptr && out != nullptr, "cs_tangle_search: null argument");
        cspec::TangleReport report = cspec::has_tangles(graph->graph, nu, r, edge_budget);
        out->found = report.found ? 1 : 0;
        out->budget_exhausted = report.search_budget_exhausted ? 1 : 0;
        out->witness_mu1 = report.witness_mu1;
        out->witness_order = report.witness_order;
        if (witness_text) *witness_text = report.witness ? copy_string(cspec::format_graph(*report.witness)) : nullptr;
    });
}

cs_status cs_shannon_valence(const cs_graph* graph, const int* lengths, cs_shannon_result_t* out) {
    return guarded([&] {
        cspec::require(graph != nullptr && lengths != nullptr && out != nullptr, "cs_shannon_valence: null argument");
        std::vector<int> k(lengths, lengths + graph->graph.edge_count());
        cspec::ShannonResult result = cspec::shannon_valence(graph->graph, k);
        out->valence = result.valence;
        out->z0 = result.z0;
        out->bisection_residual = result.bisection_residual;
    });
}

cs_status cs_markov_bounds(int d, int r, cs_markov_bounds_t* out) {
    return guarded([&] {
        require_out(out, "cs_markov_bounds");
        cspec::MarkovBounds b = cspec::markov_bounds(d, r);
        out->adjacency_as_written = b.adjacency_as_written;
        out->adjacency_balanced = b.adjacency_balanced;
        out->hashimoto = b.hashimoto;
        out->r_default = b.r_default;
    });
}

cs_status cs_puder_comparison(int d, cs_puder_comparison_t* out) {
    return guarded([&] {
        require_out(out, "cs_puder_comparison");
        cspec::PuderComparison p = cspec::puder_comparison(d);
        out->alon = p.alon;
        out->offset_bound = p.offset_bound;
        out->hashimoto_at_d = p.hashimoto_at_d;
    });
}

}  // extern "C"
