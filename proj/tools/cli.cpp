// coverspectra: random covers of a base graph, their spectra, and the
// experiment drivers behind them, exposed as one subcommand-style binary.
// Links only the public C API.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "cover_spectra.h"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitBudget = 3;

int exit_code_for(cs_status status) {
    if (status == CS_OK) return kExitOk;
    if (status == CS_ERROR_BUDGET_EXHAUSTED) return kExitBudget;
    return kExitValidation;
}

int fail(cs_status status, const std::string& what) {
    std::cerr << "error: " << what << ": " << cs_status_name(status);
    const char* detail = cs_last_error();
    if (detail && *detail) std::cerr << " (" << detail << ")";
    std::cerr << "\n";
    return exit_code_for(status);
}

struct GraphHandle {
    cs_graph* g = nullptr;
    ~GraphHandle() { cs_graph_destroy(g); }
};

struct StringHandle {
    char* s = nullptr;
    ~StringHandle() { cs_string_free(s); }
    std::string str() const { return s ? s : ""; }
};

int load_graph(const std::string& path, GraphHandle& out, const char* what) {
    cs_status status = cs_graph_read_file(path.c_str(), &out.g);
    if (status != CS_OK) return fail(status, std::string(what) + " '" + path + "'");
    return kExitOk;
}

// Writes `body` to --out (or stdout) and the sidecar config next to it.
int emit(const std::string& out_path, const std::string& body, const json& config) {
    if (out_path.empty()) {
        std::cout << body;
        return kExitOk;
    }
    std::ofstream file(out_path);
    if (!file) {
        std::cerr << "error: cannot open '" << out_path << "'\n";
        return kExitValidation;
    }
    file << body;
    std::ofstream side(out_path + ".meta.json");
    if (!side) {
        std::cerr << "error: cannot open '" << out_path << ".meta.json'\n";
        return kExitValidation;
    }
    side << config.dump(2) << "\n";
    return kExitOk;
}

json merge_config(const StringHandle& meta, const std::vector<std::string>& argv_tail) {
    json config = json::object();
    if (meta.s) config = json::parse(meta.str());
    config["argv"] = argv_tail;
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> argv_copy(argv, argv + argc);

    CLI::App app{"random covering graphs of a base graph: spectra, tangles, and trace experiments"};
    app.require_subcommand(1);

    // ---- generate --------------------------------------------------------
    auto* generate = app.add_subcommand("generate", "sample a coordinatized cover");
    std::string gen_base, gen_model = "permutation", gen_out;
    int gen_n = 2;
    unsigned long long gen_seed = 0, gen_trial = 0;
    bool gen_realize = false;
    generate->add_option("--base", gen_base, "base graph file")->required();
    generate->add_option("--model", gen_model, "model kind");
    generate->add_option("--n", gen_n, "cover degree")->required();
    generate->add_option("--seed", gen_seed, "rng seed");
    generate->add_option("--trial", gen_trial, "trial index within the seed's stream");
    generate->add_flag("--realize", gen_realize, "emit the realized cover graph instead of sigma");
    generate->add_option("--out", gen_out, "output file (stdout otherwise)");

    // ---- spectrum --------------------------------------------------------
    auto* spectrum = app.add_subcommand("spectrum", "spectral report of a sampled cover");
    std::string spec_base, spec_model = "permutation", spec_out;
    int spec_n = 2, spec_d = 0;
    double spec_eps = 0.05;
    unsigned long long spec_seed = 0, spec_trial = 0;
    spectrum->add_option("--base", spec_base, "base graph file")->required();
    spectrum->add_option("--model", spec_model, "model kind");
    spectrum->add_option("--n", spec_n, "cover degree")->required();
    spectrum->add_option("--d", spec_d, "base regularity (default: degree of vertex 0)");
    spectrum->add_option("--eps", spec_eps, "non-Alon epsilon");
    spectrum->add_option("--seed", spec_seed, "rng seed");
    spectrum->add_option("--trial", spec_trial, "trial index");
    spectrum->add_option("--out", spec_out, "output file");

    // ---- nonalon ---------------------------------------------------------
    auto* nonalon = app.add_subcommand("nonalon", "P[NonAlon > 0] scan over n");
    std::string na_base, na_model = "permutation", na_n, na_out;
    double na_eps = 0.05;
    long na_trials = 1000;
    unsigned long long na_seed = 0;
    int na_threads = 0;
    nonalon->add_option("--base", na_base, "base graph file")->required();
    nonalon->add_option("--model", na_model, "model kind");
    nonalon->add_option("--eps", na_eps, "epsilon above the Alon bound");
    nonalon->add_option("--n", na_n, "comma-separated degree list")->required();
    nonalon->add_option("--trials", na_trials, "trials per degree");
    nonalon->add_option("--seed", na_seed, "rng seed");
    nonalon->add_option("--threads", na_threads, "worker threads (0 = auto)");
    nonalon->add_option("--out", na_out, "output file");

    // ---- tangles ---------------------------------------------------------
    auto* tangles = app.add_subcommand("tangles", "search a graph for (>=nu, <r)-tangles");
    std::string tg_graph, tg_out;
    double tg_nu = 1.5;
    int tg_r = 2;
    long tg_budget = 16;
    tangles->add_option("--graph", tg_graph, "graph file")->required();
    tangles->add_option("--nu", tg_nu, "mu1 threshold")->required();
    tangles->add_option("--r", tg_r, "order bound (witness order < r)")->required();
    tangles->add_option("--edge-budget", tg_budget, "max candidate subgraph edges");
    tangles->add_option("--out", tg_out, "output file");

    // ---- trace-scan ------------------------------------------------------
    auto* trace = app.add_subcommand("trace-scan", "E[Tr H_G^k - Tr H_B^k] over (k, n)");
    std::string tr_base, tr_model = "permutation", tr_k, tr_n, tr_out;
    long tr_trials = 1000, tr_tangle_budget = 16;
    unsigned long long tr_seed = 0;
    int tr_threads = 0, tr_r = 0;
    double tr_nu = 0.0;
    bool tr_filter = false;
    trace->add_option("--base", tr_base, "base graph file")->required();
    trace->add_option("--model", tr_model, "model kind");
    trace->add_option("--k", tr_k, "comma-separated power list")->required();
    trace->add_option("--n", tr_n, "comma-separated degree list")->required();
    trace->add_option("--trials", tr_trials, "trials per degree");
    trace->add_option("--seed", tr_seed, "rng seed");
    trace->add_flag("--tangle-filter", tr_filter, "restrict to TangleFree(>=nu, <r) covers");
    trace->add_option("--nu", tr_nu, "tangle filter mu1 threshold");
    trace->add_option("--r", tr_r, "tangle filter order bound");
    trace->add_option("--tangle-budget", tr_tangle_budget, "tangle search edge budget");
    trace->add_option("--threads", tr_threads, "worker threads (0 = auto)");
    trace->add_option("--out", tr_out, "output file");

    // ---- expect ----------------------------------------------------------
    auto* expect = app.add_subcommand("expect", "closed-form vs Monte Carlo expected subgraph counts");
    std::string ex_base, ex_model = "permutation", ex_n, ex_out;
    int ex_max_edges = 3, ex_threads = 0;
    long ex_trials = 10000;
    unsigned long long ex_seed = 0;
    expect->add_option("--base", ex_base, "base graph file")->required();
    expect->add_option("--model", ex_model, "model kind");
    expect->add_option("--n", ex_n, "comma-separated degree list")->required();
    expect->add_option("--max-edges", ex_max_edges, "max edges of enumerated shapes");
    expect->add_option("--trials", ex_trials, "Monte Carlo trials per (shape, n)");
    expect->add_option("--seed", ex_seed, "rng seed");
    expect->add_option("--threads", ex_threads, "worker threads (0 = auto)");
    expect->add_option("--out", ex_out, "output file");

    // ---- shannon ---------------------------------------------------------
    auto* shannon = app.add_subcommand("shannon", "valence of a variable-length graph");
    std::string sh_graph, sh_lengths, sh_out;
    shannon->add_option("--graph", sh_graph, "graph file")->required();
    shannon->add_option("--lengths", sh_lengths, "TSV of edge lengths: orbit index, length (default all 1)");
    shannon->add_option("--out", sh_out, "output file");

    // ---- bounds ----------------------------------------------------------
    auto* bounds = app.add_subcommand("bounds", "Markov trace bounds (Markdown table)");
    int bd_d = 0, bd_r = 0;
    std::string bd_out;
    bounds->add_option("--d", bd_d, "regularity")->required();
    bounds->add_option("--r", bd_r, "expansion order (default 2 floor(sqrt(d-1) + 1))");
    bounds->add_option("--out", bd_out, "output file");

    // ---- ihara-check -----------------------------------------------------
    auto* ihara = app.add_subcommand("ihara-check", "Ihara identity residuals on random graphs");
    int ih_random = 50, ih_max_v = 10;
    unsigned long long ih_seed = 0;
    std::string ih_graph, ih_out;
    ihara->add_option("--random", ih_random, "number of random graphs");
    ihara->add_option("--max-v", ih_max_v, "max vertices of each random graph");
    ihara->add_option("--seed", ih_seed, "rng seed");
    ihara->add_option("--graph", ih_graph, "check one graph file instead of random ones");
    ihara->add_option("--out", ih_out, "output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int cli_exit = app.exit(e);
        return cli_exit == 0 ? kExitOk : kExitValidation;
    }

    if (generate->parsed()) {
        GraphHandle base;
        if (int rc = load_graph(gen_base, base, "reading base"); rc != kExitOk) return rc;
        cs_cover* cover = nullptr;
        cs_status status = cs_cover_sample(base.g, gen_n, gen_model.c_str(), gen_seed, gen_trial, &cover);
        if (status != CS_OK) return fail(status, "sampling cover");
        StringHandle body;
        if (gen_realize) {
            cs_graph* realized = nullptr;
            status = cs_cover_realize(cover, &realized);
            if (status == CS_OK) status = cs_graph_format(realized, &body.s);
            cs_graph_destroy(realized);
        } else {
            status = cs_cover_format(cover, &body.s);
        }
        cs_cover_destroy(cover);
        if (status != CS_OK) return fail(status, "formatting cover");
        json config = {{"tool", "coverspectra"}, {"table", "generate"}, {"base", gen_base},  {"model", gen_model},
                       {"n", gen_n},            {"seed", gen_seed},    {"trial", gen_trial}, {"realize", gen_realize},
                       {"argv", argv_copy}};
        return emit(gen_out, body.str(), config);
    }

    if (spectrum->parsed()) {
        GraphHandle base;
        if (int rc = load_graph(spec_base, base, "reading base"); rc != kExitOk) return rc;
        if (spec_d == 0) {
            std::vector<int> degrees(cs_graph_vertex_count(base.g));
            if (cs_graph_degrees(base.g, degrees.data()) == CS_OK && !degrees.empty()) spec_d = degrees[0];
        }
        cs_cover* cover = nullptr;
        cs_status status = cs_cover_sample(base.g, spec_n, spec_model.c_str(), spec_seed, spec_trial, &cover);
        if (status != CS_OK) return fail(status, "sampling cover");
        cs_graph* realized = nullptr;
        status = cs_cover_realize(cover, &realized);
        cs_cover_destroy(cover);
        if (status != CS_OK) return fail(status, "realizing cover");
        StringHandle report;
        status = cs_spectral_report(realized, base.g, spec_d, spec_eps, &report.s);
        cs_graph_destroy(realized);
        if (status != CS_OK) return fail(status, "computing spectral report");
        json config = {{"tool", "coverspectra"}, {"table", "spectrum"}, {"base", spec_base}, {"model", spec_model},
                       {"n", spec_n},            {"d", spec_d},        {"eps", spec_eps},   {"seed", spec_seed},
                       {"trial", spec_trial},    {"argv", argv_copy}};
        return emit(spec_out, report.str() + "\n", config);
    }

    if (nonalon->parsed()) {
        GraphHandle base;
        if (int rc = load_graph(na_base, base, "reading base"); rc != kExitOk) return rc;
        StringHandle tsv, meta;
        cs_status status = cs_nonalon_scan(base.g, na_model.c_str(), na_eps, na_n.c_str(), na_trials, na_seed,
                                           na_threads, &tsv.s, &meta.s);
        if (status != CS_OK) return fail(status, "nonalon scan");
        return emit(na_out, tsv.str(), merge_config(meta, argv_copy));
    }

    if (tangles->parsed()) {
        GraphHandle graph;
        if (int rc = load_graph(tg_graph, graph, "reading graph"); rc != kExitOk) return rc;
        cs_tangle_report_t report{};
        StringHandle witness;
        cs_status status = cs_tangle_search(graph.g, tg_nu, tg_r, tg_budget, &report, &witness.s);
        if (status != CS_OK) return fail(status, "tangle search");
        std::ostringstream body;
        body << "#found\tbudget_exhausted\twitness_mu1\twitness_order\n";
        body << report.found << "\t" << report.budget_exhausted << "\t" << report.witness_mu1 << "\t"
             << report.witness_order << "\n";
        if (report.found && witness.s) body << witness.str();
        json config = {{"tool", "coverspectra"}, {"table", "tangles"},      {"graph", tg_graph},
                       {"nu", tg_nu},            {"r", tg_r},               {"edge_budget", tg_budget},
                       {"found", report.found != 0},                        {"argv", argv_copy}};
        return emit(tg_out, body.str(), config);
    }

    if (trace->parsed()) {
        GraphHandle base;
        if (int rc = load_graph(tr_base, base, "reading base"); rc != kExitOk) return rc;
        StringHandle tsv, meta;
        cs_status status = cs_trace_scan(base.g, tr_model.c_str(), tr_k.c_str(), tr_n.c_str(), tr_trials, tr_seed,
                                         tr_filter ? 1 : 0, tr_nu, tr_r, tr_tangle_budget, tr_threads, &tsv.s,
                                         &meta.s);
        if (status != CS_OK) return fail(status, "trace scan");
        return emit(tr_out, tsv.str(), merge_config(meta, argv_copy));
    }

    if (expect->parsed()) {
        GraphHandle base;
        if (int rc = load_graph(ex_base, base, "reading base"); rc != kExitOk) return rc;
        StringHandle tsv, meta;
        cs_status status = cs_expect_table(base.g, ex_model.c_str(), ex_n.c_str(), ex_max_edges, ex_trials, ex_seed,
                                           ex_threads, &tsv.s, &meta.s);
        if (status != CS_OK) return fail(status, "expect table");
        return emit(ex_out, tsv.str(), merge_config(meta, argv_copy));
    }

    if (shannon->parsed()) {
        GraphHandle graph;
        if (int rc = load_graph(sh_graph, graph, "reading graph"); rc != kExitOk) return rc;
        int orbit_count = cs_graph_edge_count(graph.g);
        std::vector<int> lengths(orbit_count, 1);
        if (!sh_lengths.empty()) {
            std::ifstream in(sh_lengths);
            if (!in) {
                std::cerr << "error: cannot open '" << sh_lengths << "'\n";
                return kExitValidation;
            }
            std::string line;
            int lineno = 0;
            while (std::getline(in, line)) {
                ++lineno;
                if (line.empty() || line[0] == '#') continue;
                std::istringstream ls(line);
                int index = 0, value = 0;
                if (!(ls >> index >> value) || index < 0 || index >= orbit_count) {
                    std::cerr << "error: bad lengths record at " << sh_lengths << ":" << lineno << "\n";
                    return kExitValidation;
                }
                lengths[index] = value;
            }
        }
        cs_shannon_result_t result{};
        cs_status status = cs_shannon_valence(graph.g, lengths.data(), &result);
        if (status != CS_OK) return fail(status, "shannon valence");
        std::ostringstream body;
        char buf[128];
        std::snprintf(buf, sizeof buf, "%.12g\t%.12g\t%.3g\n", result.valence, result.z0, result.bisection_residual);
        body << "#valence\tz0\tbisection_residual\n" << buf;
        json config = {{"tool", "coverspectra"}, {"table", "shannon"}, {"graph", sh_graph},
                       {"lengths", sh_lengths},  {"argv", argv_copy}};
        return emit(sh_out, body.str(), config);
    }

    if (bounds->parsed()) {
        cs_markov_bounds_t probe{};
        cs_status status = cs_markov_bounds(bd_d, 1, &probe);
        if (status != CS_OK) return fail(status, "markov bounds");
        int r = bd_r > 0 ? bd_r : probe.r_default;
        cs_markov_bounds_t b{};
        status = cs_markov_bounds(bd_d, r, &b);
        if (status != CS_OK) return fail(status, "markov bounds");
        cs_puder_comparison_t p{};
        status = cs_puder_comparison(bd_d, &p);
        if (status != CS_OK) return fail(status, "puder comparison");

        std::ostringstream body;
        char line[256];
        body << "| bound | value |\n|---|---|\n";
        std::snprintf(line, sizeof line, "| adjacency Markov, as-written exponents (r=%d) | %.6g |\n", r,
                      b.adjacency_as_written);
        body << line;
        std::snprintf(line, sizeof line, "| adjacency Markov, balanced (r=%d) | %.6g |\n", r, b.adjacency_balanced);
        body << line;
        std::snprintf(line, sizeof line, "| Hashimoto route (r=%d) | %.6g |\n", r, b.hashimoto);
        body << line;
        std::snprintf(line, sizeof line, "| Alon bound 2 sqrt(d-1) | %.6g |\n", p.alon);
        body << line;
        std::snprintf(line, sizeof line, "| constant-offset comparison (+0.86) | %.6g |\n", p.offset_bound);
        body << line;
        std::snprintf(line, sizeof line, "| Hashimoto route at r = d | %.6g |\n", p.hashimoto_at_d);
        body << line;
        json config = {{"tool", "coverspectra"}, {"table", "bounds"}, {"d", bd_d}, {"r", r}, {"argv", argv_copy}};
        return emit(bd_out, body.str(), config);
    }

    if (ihara->parsed()) {
        StringHandle tsv;
        double worst = 0.0;
        cs_status status;
        json config = {{"tool", "coverspectra"}, {"table", "ihara-check"}, {"argv", argv_copy}};
        if (!ih_graph.empty()) {
            GraphHandle graph;
            if (int rc = load_graph(ih_graph, graph, "reading graph"); rc != kExitOk) return rc;
            status = cs_ihara_check(graph.g, 0, &worst);
            if (status != CS_OK) return fail(status, "ihara check");
            std::ostringstream body;
            body << "#graph\tresidual\n" << ih_graph << "\t" << worst << "\n";
            config["graph"] = ih_graph;
            return emit(ih_out, body.str(), config);
        }
        status = cs_ihara_check_random(ih_random, ih_max_v, ih_seed, &worst, &tsv.s);
        if (status != CS_OK) return fail(status, "ihara check");
        config["random"] = ih_random;
        config["max_v"] = ih_max_v;
        config["seed"] = ih_seed;
        config["worst_residual"] = worst;
        return emit(ih_out, tsv.str(), config);
    }

    return kExitValidation;
}
