#pragma once

#include <map>
#include <string>
#include <vector>

namespace qnet {

struct FitResult {
    std::string form;
    std::map<std::string, double> parameters;
    double residual = 0.0;  // sum of squared errors in the fit space
    double domain_min = 0.0;
    double domain_max = 0.0;
    bool converged = true;
    bool identifiable = true;
};

// P(k) = a exp(-b k^c), fitted in log space: for each candidate c the model
// is linear in (k^c, ln P), so a coarse grid over c followed by golden
// section refinement around the best cell nails the exponent. Bins with zero
// probability are skipped; k < k_min is excluded from the fit domain.
// Constant data leaves c unconstrained and is flagged non-identifiable.
// Needs at least four usable bins.
FitResult fit_gen_exponential(const std::map<int, double>& histogram, int k_min = 0);

// P(k) = a k^(-b) on k >= k_min via linear regression of ln P on ln k.
// Needs at least three usable bins.
FitResult fit_power_law_tail(const std::map<int, double>& histogram, int k_min);

struct PathSample {
    std::size_t n = 0;
    double rho = 0.0;
    double mean_path = 0.0;
};

// Fits l = a N^delta / rho in log space (parameters delta, amplitude), plus
// the logarithmic alternative l = alpha ln N + beta in linear space. Both
// models' linear-space sums of squares are reported (rss_linear_power,
// rss_linear_log) so the two forms can be compared on equal footing. All
// samples must share one density; mixed densities are rejected.
FitResult fit_path_scaling(const std::vector<PathSample>& points);

// C(k) = a k^s via linear regression of ln C on ln k over degrees >= k_min
// with nonzero C(k). Parameter "slope" is s (negative for hierarchical
// networks). Needs at least three usable bins.
FitResult fit_clustering_power(const std::map<int, double>& ck, int k_min = 3);

std::string fit_to_json(const FitResult& r);

}  // namespace qnet
