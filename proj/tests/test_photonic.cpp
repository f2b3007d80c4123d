#include <doctest.h>

#include <cmath>
#include <set>

#include <stdexcept>
#include "qnet/fiber_models.hpp"
#include "qnet/photonic.hpp"
#include "qnet/rng.hpp"

using namespace qnet;

TEST_CASE("transmissivity is 10^(-gamma d / 10)") {
    CHECK(transmissivity(0.0, 0.2) == doctest::Approx(1.0));
    CHECK(transmissivity(50.0, 0.2) == doctest::Approx(std::pow(10.0, -1.0)));
    CHECK(transmissivity(100.0, 0.2) == doctest::Approx(std::pow(10.0, -2.0)));
    CHECK(transmissivity(226.0, 0.2) == doctest::Approx(std::pow(10.0, -4.52)));
    CHECK_THROWS_AS(transmissivity(-1.0, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(transmissivity(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(transmissivity(1.0, -0.2), std::invalid_argument);
}

TEST_CASE("entanglement probability matches the direct form") {
    CHECK(entanglement_probability(1.0, 1000) == doctest::Approx(1.0));
    CHECK(entanglement_probability(0.5, 1) == doctest::Approx(0.5));
    for (const double q : {0.9, 0.5, 0.1, 0.01, 1e-3}) {
        const double direct = 1.0 - std::pow(1.0 - q, 1000.0);
        CHECK(entanglement_probability(q, 1000) == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("entanglement probability stays accurate for tiny transmissivity") {
    // Long-double reference keeps enough bits for 1 - (1-q)^n at q ~ 1e-9.
    for (const double q : {1e-7, 1e-9, 1e-12}) {
        const long double ref = 1.0L - std::pow(1.0L - static_cast<long double>(q), 1000.0L);
        const double got = entanglement_probability(q, 1000);
        CHECK(got == doctest::Approx(static_cast<double>(ref)).epsilon(1e-6));
        CHECK(got > 0.0);
    }
    // Near n q for small q.
    CHECK(entanglement_probability(1e-12, 1000) == doctest::Approx(1e-9).epsilon(1e-6));
}

TEST_CASE("entanglement probability validates inputs") {
    // Fully attenuated links are legal and simply never entangle.
    CHECK(entanglement_probability(0.0, 1000) == 0.0);
    CHECK_THROWS_AS(entanglement_probability(1.1, 1000), std::invalid_argument);
    CHECK_THROWS_AS(entanglement_probability(-0.1, 1000), std::invalid_argument);
    CHECK_THROWS_AS(entanglement_probability(0.5, 0), std::invalid_argument);
}

TEST_CASE("overlay keeps a subset of fiber edges with the photonic tag") {
    RngStream prng(90, 0);
    std::vector<PlanarPoint> pts;
    for (int i = 0; i < 120; ++i)
        pts.push_back({prng.uniform01() * 400.0, prng.uniform01() * 400.0});
    RngStream grng(91, 0);
    const SpatialGraph fiber = generate_waxman(std::move(pts), WaxmanParams{}, grng);

    PhotonicParams p;
    RngStream orng(92, 0);
    const SpatialGraph photonic = sample_overlay(fiber, p, planar_distance_fn(fiber), orng);
    CHECK(photonic.layer == "photonic");
    CHECK(photonic.node_count == fiber.node_count);
    const std::set<Edge> fiber_edges(fiber.edges.begin(), fiber.edges.end());
    for (const auto& e : photonic.edges) CHECK(fiber_edges.count(e) == 1);
    CHECK(photonic.edges.size() <= fiber.edges.size());

    RngStream orng2(92, 0);
    const SpatialGraph again = sample_overlay(fiber, p, planar_distance_fn(fiber), orng2);
    CHECK(again.edges == photonic.edges);
}

TEST_CASE("overlay keep rate matches the entanglement probability") {
    // One fiber edge of fixed length; count survivals over many streams.
    const double d = 158.0;  // p close to one half for the default parameters
    SpatialGraph fiber = SpatialGraph::from_planar({{0.0, 0.0}, {d, 0.0}});
    fiber.edges = {{0, 1}};
    PhotonicParams params;
    const double expect =
        entanglement_probability(transmissivity(d, params.gamma_db_per_km),
                                 params.photons_per_attempt);
    std::size_t kept = 0;
    const std::size_t trials = 10000;
    for (std::size_t t = 0; t < trials; ++t) {
        RngStream rng(93, t);
        kept += sample_overlay(fiber, params, planar_distance_fn(fiber), rng).edges.size();
    }
    const double frac = static_cast<double>(kept) / static_cast<double>(trials);
    const double sigma = std::sqrt(expect * (1.0 - expect) / static_cast<double>(trials));
    CHECK(std::abs(frac - expect) < 5.0 * sigma);
}

TEST_CASE("distance functions dispatch on the coordinate kind") {
    SpatialGraph planar = SpatialGraph::from_planar({{0.0, 0.0}, {3.0, 4.0}});
    CHECK(planar_distance_fn(planar)(0, 1) == doctest::Approx(5.0));
    CHECK(default_distance_fn(planar)(0, 1) == doctest::Approx(5.0));

    SpatialGraph geo = SpatialGraph::from_geo({{0.0, 0.0}, {0.0, 90.0}});
    CHECK(geodesic_distance_fn(geo)(0, 1) == doctest::Approx(0.5 * kPi * kEarthRadiusKm));
    CHECK(default_distance_fn(geo)(0, 1) == doctest::Approx(0.5 * kPi * kEarthRadiusKm));

    SpatialGraph bare = SpatialGraph::with_node_count(2);
    CHECK_THROWS_AS(default_distance_fn(bare), std::invalid_argument);
}

TEST_CASE("very long links essentially never survive") {
    SpatialGraph fiber = SpatialGraph::from_planar({{0.0, 0.0}, {2000.0, 0.0}});
    fiber.edges = {{0, 1}};
    PhotonicParams params;
    for (std::uint64_t t = 0; t < 200; ++t) {
        RngStream rng(94, t);
        CHECK(sample_overlay(fiber, params, planar_distance_fn(fiber), rng).edges.empty());
    }
}
