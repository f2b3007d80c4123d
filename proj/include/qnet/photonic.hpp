#pragma once

#include <functional>

#include "qnet/graph.hpp"
#include "qnet/rng.hpp"

namespace qnet {

struct PhotonicParams {
    double gamma_db_per_km = 0.2;          // fiber loss coefficient, > 0
    std::size_t photons_per_attempt = 1000;  // n_p, >= 1
};

// Single-photon transmissivity q = 10^(-gamma * d / 10). In (0, 1] for
// finite distances.
double transmissivity(double distance_km, double gamma_db_per_km);

// Probability that at least one of n_p photons survives:
// p = 1 - (1 - q)^n_p, evaluated as -expm1(n_p * log1p(-q)) so small q never
// underflows the subtraction.
double entanglement_probability(double transmissivity, std::size_t photons_per_attempt);

// Pairwise distance accessor; lets the overlay run on planar or geographic
// coordinates (or anything else, e.g. measured span lengths).
using DistanceFn = std::function<double(NodeIndex, NodeIndex)>;

// Euclidean distances from planar coordinates. The graph must outlive the
// returned callable.
DistanceFn planar_distance_fn(const SpatialGraph& g);

// Haversine distances from geographic coordinates.
DistanceFn geodesic_distance_fn(const SpatialGraph& g);

// Picks the accessor matching the graph's coordinate kind.
DistanceFn default_distance_fn(const SpatialGraph& g);

// Keeps each fiber edge independently with its entanglement probability;
// the result shares the fiber graph's nodes and coordinates and is always an
// edge subset of it. Draws are consumed in canonical edge order.
SpatialGraph sample_overlay(const SpatialGraph& fiber, const PhotonicParams& p,
                            const DistanceFn& distance, RngStream& rng);

}  // namespace qnet
