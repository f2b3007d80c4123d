#pragma once

#include <cstddef>
#include <vector>

#include "qnet/graph.hpp"
#include "qnet/rng.hpp"

namespace qnet {

// ---------------------------------------------------------------------------
// Waxman random geometric graph ("Brito" model).
// ---------------------------------------------------------------------------

struct WaxmanParams {
    double beta = 1.0;         // in (0, 1]
    double alpha_l_km = 226.0;  // decay length, > 0
};

// Gamma_ij = beta * exp(-d / alpha_l). In (0, beta] for finite distances.
double waxman_probability(double distance_km, const WaxmanParams& p);

// Tries every unordered pair exactly once, keeping it with probability
// Gamma_ij. Draw order is pair order (0,1), (0,2), ..., so a fixed stream
// reproduces the same edge set.
SpatialGraph generate_waxman(std::vector<PlanarPoint> positions, const WaxmanParams& p,
                             RngStream& rng);

// ---------------------------------------------------------------------------
// Growth with distance-penalized preferential attachment ("Brito-Soares").
// ---------------------------------------------------------------------------

struct SoaresParams {
    std::size_t m = 3;     // edges per arriving node, >= 1
    double alpha_a = 5.0;  // distance exponent, >= 0
};

// Attachment weights k_i * d_i^(-alpha_a), normalized to sum to one.
// Distances are clamped below at 1e-6 km so coincident points keep a finite
// weight. Empty input is rejected.
std::vector<double> soares_attachment_weights(
    const std::vector<std::pair<std::size_t, double>>& degree_distance, double alpha_a);

inline constexpr double kMinAttachmentDistanceKm = 1e-6;

// Seeds a clique on the first m+1 positions, then attaches each later node to
// m distinct existing nodes drawn by the weights above (without replacement,
// weights renormalized after each pick). Total edges: m(m+1)/2 + m(N-m-1).
SpatialGraph generate_soares(std::vector<PlanarPoint> positions, const SoaresParams& p,
                             RngStream& rng);

// ---------------------------------------------------------------------------
// Spatial scale-free model with degree quotas ("Brito-Rozenfeld").
// ---------------------------------------------------------------------------

struct RozenfeldParams {
    double lambda = 3.0;              // > 2
    std::size_t min_degree = 3;       // m, >= 1
    std::size_t max_degree = 1000000;  // K, > m
    double radius_scale_km = 100.0;   // A in r(k) = A*sqrt(k), > 0
    bool inclusive_support = true;    // quotas on [m, K]; false gives (m, K)
};

// r(k) = A * sqrt(k).
double connection_radius(std::size_t k, double radius_scale_km);

// Discrete power law P(k) proportional to k^(-lambda) on the configured
// support, sampled by inverse CDF over the exact normalized masses. Build
// once per parameter set; the table has one entry per support value.
class PowerLawDegreeSampler {
public:
    explicit PowerLawDegreeSampler(const RozenfeldParams& p);
    std::size_t operator()(RngStream& rng) const;
    std::size_t support_min() const { return support_min_; }
    std::size_t support_max() const { return support_min_ + cdf_.size() - 1; }

private:
    std::size_t support_min_;
    std::vector<double> cdf_;
};

// Single draw; builds the sampler internally, so loops should reuse a
// PowerLawDegreeSampler instead.
std::size_t sample_target_degree(const RozenfeldParams& p, RngStream& rng);

// Optional generator introspection for invariant checks.
struct RozenfeldDiagnostics {
    std::vector<std::size_t> quotas;       // per node
    std::vector<NodeIndex> order;          // processing permutation
    std::vector<NodeIndex> initiators;     // aligned with the returned edges
};

// Assigns each node a quota from the degree sampler, then processes nodes in
// a uniform random permutation. The node under processing connects to its
// nearest not-yet-linked neighbors inside r(quota), nearest first (ties by
// lower index), skipping neighbors whose own quota is full, until its quota
// fills or the radius is exhausted. No node ever exceeds its quota.
SpatialGraph generate_rozenfeld(std::vector<PlanarPoint> positions, const RozenfeldParams& p,
                                RngStream& rng, const PowerLawDegreeSampler* sampler = nullptr,
                                RozenfeldDiagnostics* diag = nullptr);

}  // namespace qnet
