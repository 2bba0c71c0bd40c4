#include "spectra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "errors.hpp"

namespace cspec {

IharaCheckResult ihara_check(const Graph& g, std::vector<double> sample_points) {
    const int n = g.vertex_count();
    const int m = g.dir_edge_count();
    const int o1 = g.half_loop_count();
    const int o2 = g.edge_count() - o1;

    if (sample_points.empty()) {
        int count = 2 * m + 1;
        sample_points.resize(count);
        for (int i = 0; i < count; ++i) sample_points[i] = 2.1 + (count == 1 ? 0.0 : i * (1.0 / (count - 1)));
    }
    for (double mu : sample_points)
        require(std::fabs(mu - 1.0) > 1e-6 && std::fabs(mu + 1.0) > 1e-6, "ihara_check: sample point at +-1");

    Matrix h = Matrix::from_row_major(m, m, hashimoto_matrix(g));
    Matrix a = Matrix::from_row_major(n, n, adjacency_matrix(g));
    std::vector<int> deg = g.degree_sequence();

    IharaCheckResult result;
    result.sample_points = sample_points;
    for (double mu : sample_points) {
        Matrix lhs_m(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) lhs_m(i, j) = (i == j ? mu : 0.0) - h(i, j);
        double lhs = det_lu(std::move(lhs_m));

        Matrix rhs_m(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) rhs_m(i, j) = -mu * a(i, j);
            rhs_m(i, i) += mu * mu + (deg[i] - 1);
        }
        double rhs = det_lu(std::move(rhs_m));
        rhs *= std::pow(mu + 1.0, o1);
        rhs *= std::pow(mu * mu - 1.0, o2 - n);

        double residual = std::fabs(lhs - rhs) / (1.0 + std::fabs(rhs));
        result.max_abs_residual = std::max(result.max_abs_residual, residual);
    }
    return result;
}

std::vector<std::complex<double>> hashimoto_spectrum_regular(const std::vector<double>& adjacency_spectrum, int d,
                                                             int o1, int o2, int n) {
    require(d >= 3, "hashimoto_spectrum_regular: d must be at least 3");
    require(static_cast<int>(adjacency_spectrum.size()) == n, "hashimoto_spectrum_regular: spectrum size != n");
    std::vector<std::complex<double>> out;
    out.reserve(2 * n + o1 + 2 * (o2 - n));
    for (double lambda : adjacency_spectrum) {
        std::complex<double> disc(lambda * lambda - 4.0 * (d - 1), 0.0);
        std::complex<double> root = std::sqrt(disc);
        out.push_back((lambda + root) / 2.0);
        out.push_back((lambda - root) / 2.0);
    }
    for (int i = 0; i < o1 + (o2 - n); ++i) out.emplace_back(-1.0, 0.0);
    for (int i = 0; i < o2 - n; ++i) out.emplace_back(1.0, 0.0);
    return out;
}

std::vector<double> new_spectrum(std::vector<double> cover_spectrum, std::vector<double> base_spectrum, double tol) {
    require(cover_spectrum.size() >= base_spectrum.size(), "new_spectrum: cover smaller than base");
    std::sort(cover_spectrum.begin(), cover_spectrum.end());
    std::sort(base_spectrum.begin(), base_spectrum.end());
    const long size = static_cast<long>(cover_spectrum.size());
    std::vector<char> used(cover_spectrum.size(), 0);
    for (double b : base_spectrum) {
        // Nearest unused cover eigenvalue: both lists are sorted, so scan
        // outward from the insertion point, skipping matched entries.
        long idx = std::lower_bound(cover_spectrum.begin(), cover_spectrum.end(), b) - cover_spectrum.begin();
        long lo = idx - 1, hi = idx;
        while (lo >= 0 && used[lo]) --lo;
        while (hi < size && used[hi]) ++hi;
        double dlo = lo >= 0 ? std::fabs(cover_spectrum[lo] - b) : 1e300;
        double dhi = hi < size ? std::fabs(cover_spectrum[hi] - b) : 1e300;
        long best = (dlo <= dhi) ? lo : hi;
        require(best >= 0 && best < size, "new_spectrum: no cover eigenvalue available");
        require(std::min(dlo, dhi) <= tol, "new_spectrum: nearest match exceeds tolerance");
        used[best] = 1;
    }
    std::vector<double> rest;
    for (size_t i = 0; i < cover_spectrum.size(); ++i)
        if (!used[i]) rest.push_back(cover_spectrum[i]);
    std::sort(rest.begin(), rest.end(), std::greater<>());
    return rest;
}

int non_alon_count(const std::vector<double>& new_spectrum, int d, double epsilon) {
    double bound = alon_bound(d) + epsilon;
    int count = 0;
    for (double v : new_spectrum)
        if (std::fabs(v) > bound) ++count;
    return count;
}

SpectralReport spectral_report(const Graph& cover, const Graph& base, int d, double epsilon) {
    SpectralReport report;
    report.epsilon = epsilon;
    report.alon_bound = alon_bound(d);
    Matrix ac = Matrix::from_row_major(cover.vertex_count(), cover.vertex_count(), adjacency_matrix(cover));
    Matrix ab = Matrix::from_row_major(base.vertex_count(), base.vertex_count(), adjacency_matrix(base));
    report.full_adjacency_spectrum = symmetric_eigenvalues(ac);
    std::vector<double> base_spec = symmetric_eigenvalues(ab);
    report.new_spectrum = new_spectrum(report.full_adjacency_spectrum, base_spec);
    report.non_alon_count = non_alon_count(report.new_spectrum, d, epsilon);
    return report;
}

std::string spectral_report_to_json(const SpectralReport& report) {
    std::ostringstream out;
    out.precision(17);
    auto list = [&](const std::vector<double>& values) {
        out << "[";
        for (size_t i = 0; i < values.size(); ++i) out << (i ? "," : "") << values[i];
        out << "]";
    };
    out << "{\"full_adjacency_spectrum\":";
    list(report.full_adjacency_spectrum);
    out << ",\"new_spectrum\":";
    list(report.new_spectrum);
    out << ",\"non_alon_count\":" << report.non_alon_count;
    out << ",\"epsilon\":" << report.epsilon;
    out << ",\"alon_bound\":" << report.alon_bound << "}";
    return out.str();
}

std::vector<std::vector<double>> lifted_base_eigenbasis(const EigenDecomposition& base_eigen,
                                                        const std::vector<int>& vertex_to_base, int cover_vertices) {
    const int nb = static_cast<int>(base_eigen.values.size());
    require(static_cast<int>(vertex_to_base.size()) == cover_vertices, "lifted_base_eigenbasis: fibre map size");
    require(nb >= 1 && cover_vertices % nb == 0, "lifted_base_eigenbasis: not a cover");
    const double scale = 1.0 / std::sqrt(static_cast<double>(cover_vertices / nb));
    std::vector<std::vector<double>> basis(nb, std::vector<double>(cover_vertices));
    for (int j = 0; j < nb; ++j)
        for (int v = 0; v < cover_vertices; ++v) basis[j][v] = base_eigen.vectors(vertex_to_base[v], j) * scale;
    return basis;
}

ExtremeEigenvalues extreme_new_adjacency(const Graph& cover, const std::vector<int>& vertex_to_base,
                                         const EigenDecomposition& base_eigen, int max_degree,
                                         unsigned long long seed, int max_steps) {
    const int n = cover.vertex_count();
    auto basis = lifted_base_eigenbasis(base_eigen, vertex_to_base, n);
    const double shift = static_cast<double>(max_degree);
    auto matvec = [&](const std::vector<double>& x, std::vector<double>& y) {
        // y = (A + shift I) x; the shift keeps the operator PSD so Lanczos
        // extremes map back to signed adjacency extremes.
        for (int v = 0; v < n; ++v) y[v] = shift * x[v];
        for (int e = 0; e < cover.dir_edge_count(); ++e) y[cover.tail(e)] += x[cover.head(e)];
    };
    ExtremeEigenvalues shifted = lanczos_extremes(matvec, n, basis, max_steps, seed);
    return {shifted.max - shift, shifted.min - shift};
}

}  // namespace cspec
