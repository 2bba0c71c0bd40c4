#pragma once

#include <complex>
#include <string>
#include <vector>

#include "graph.hpp"
#include "linalg.hpp"

namespace cspec {

struct IharaCheckResult {
    double max_abs_residual = 0.0;
    std::vector<double> sample_points;
};

// Pointwise verification of the Ihara determinantal identity
//   det(mu I - H) = det(mu^2 I - mu A + (D - I)) (mu+1)^o1 (mu^2-1)^(o2-n)
// at sample points away from +-1; the residual is scaled by 1 + |RHS|.
// Default sample points: 2 #Edir + 1 points spread over [2.1, 3.1].
IharaCheckResult ihara_check(const Graph& g, std::vector<double> sample_points = {});

// Hashimoto spectrum of a d-regular graph from its adjacency spectrum via
// mu^2 - lambda mu + (d-1) = 0, padded with o1 + (o2 - n) copies of -1 and
// (o2 - n) copies of +1.
std::vector<std::complex<double>> hashimoto_spectrum_regular(const std::vector<double>& adjacency_spectrum, int d,
                                                             int o1, int o2, int n);

// Multiset difference cover_spectrum minus base_spectrum by greedy nearest
// matching; throws if some base eigenvalue has no cover eigenvalue within
// tol (that signals an eigensolver failure or a non-cover input).
std::vector<double> new_spectrum(std::vector<double> cover_spectrum, std::vector<double> base_spectrum,
                                 double tol = 1e-7);

int non_alon_count(const std::vector<double>& new_spectrum, int d, double epsilon);

inline double alon_bound(int d) { return 2.0 * std::sqrt(static_cast<double>(d - 1)); }

struct SpectralReport {
    std::vector<double> full_adjacency_spectrum;  // descending
    std::vector<double> new_spectrum;             // descending
    int non_alon_count = 0;
    double epsilon = 0.0;
    double alon_bound = 0.0;
};

// Full dense report for a cover of a d-regular base.
SpectralReport spectral_report(const Graph& cover, const Graph& base, int d, double epsilon);

std::string spectral_report_to_json(const SpectralReport& report);

// Orthonormal basis of the lifted base eigenspace: one vector per base
// eigenvector f, lifted to f(pi(v)) / sqrt(n) along the fibre map.
std::vector<std::vector<double>> lifted_base_eigenbasis(const EigenDecomposition& base_eigen,
                                                        const std::vector<int>& vertex_to_base, int cover_vertices);

// Extreme new adjacency eigenvalues of a cover, computed by Lanczos on the
// orthogonal complement of the lifted base eigenspace.  max_degree bounds
// ||A|| and shifts the operator to keep it positive.
ExtremeEigenvalues extreme_new_adjacency(const Graph& cover, const std::vector<int>& vertex_to_base,
                                         const EigenDecomposition& base_eigen, int max_degree,
                                         unsigned long long seed, int max_steps = 80);

}  // namespace cspec
