#include "qnet/photonic.hpp"

#include <cmath>
#include <stdexcept>

namespace qnet {

double transmissivity(double distance_km, double gamma_db_per_km) {
    if (!(gamma_db_per_km > 0.0))
        throw std::invalid_argument("transmissivity: gamma must be positive");
    if (!(distance_km >= 0.0))
        throw std::invalid_argument("transmissivity: distance must be non-negative");
    // Attenuation of gamma dB per km: q = 10^(-gamma d / 10).
    return std::pow(10.0, -gamma_db_per_km * distance_km / 10.0);
}

double entanglement_probability(double transmissivity, std::size_t photons_per_attempt) {
    if (!(transmissivity >= 0.0 && transmissivity <= 1.0))
        throw std::invalid_argument("entanglement_probability: transmissivity outside [0, 1]");
    if (photons_per_attempt < 1)
        throw std::invalid_argument("entanglement_probability: need at least one photon");
    return -std::expm1(static_cast<double>(photons_per_attempt) * std::log1p(-transmissivity));
}

DistanceFn planar_distance_fn(const SpatialGraph& g) {
    if (g.coords != SpatialGraph::Coords::planar)
        throw std::invalid_argument("planar_distance_fn: graph has no planar coordinates");
    const SpatialGraph* gp = &g;
    return [gp](NodeIndex u, NodeIndex v) {
        return euclidean_distance(gp->planar[u], gp->planar[v]);
    };
}

DistanceFn geodesic_distance_fn(const SpatialGraph& g) {
    if (g.coords != SpatialGraph::Coords::geographic)
        throw std::invalid_argument("geodesic_distance_fn: graph has no geographic coordinates");
    const SpatialGraph* gp = &g;
    return [gp](NodeIndex u, NodeIndex v) {
        return geodesic_distance(gp->geo[u], gp->geo[v]);
    };
}

DistanceFn default_distance_fn(const SpatialGraph& g) {
    switch (g.coords) {
        case SpatialGraph::Coords::planar: return planar_distance_fn(g);
        case SpatialGraph::Coords::geographic: return geodesic_distance_fn(g);
        default:
            throw std::invalid_argument("default_distance_fn: graph has no coordinates");
    }
}

SpatialGraph sample_overlay(const SpatialGraph& fiber, const PhotonicParams& p,
                            const DistanceFn& distance, RngStream& rng) {
    SpatialGraph photonic = fiber;
    canonicalize_edges(photonic);
    photonic.layer = "photonic";
    std::vector<Edge> kept;
    kept.reserve(photonic.edges.size());
    for (const auto& [u, v] : photonic.edges) {
        const double q = transmissivity(distance(u, v), p.gamma_db_per_km);
        const double prob = entanglement_probability(q, p.photons_per_attempt);
        if (rng.uniform01() < prob) kept.emplace_back(u, v);
    }
    photonic.edges = std::move(kept);
    return photonic;
}

}  // namespace qnet
