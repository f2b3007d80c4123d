#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include <stdexcept>
#include "qnet/fiber_models.hpp"
#include "qnet/graph.hpp"
#include "qnet/rng.hpp"

using namespace qnet;

namespace {

std::vector<int> degrees_of(const SpatialGraph& g) {
    std::vector<int> deg(g.node_count, 0);
    for (const auto& [u, v] : g.edges) {
        ++deg[u];
        ++deg[v];
    }
    return deg;
}

}  // namespace

// ---------------------------------------------------------------------------
// Waxman
// ---------------------------------------------------------------------------

TEST_CASE("waxman probability follows beta exp(-d/alpha_l)") {
    WaxmanParams p;
    CHECK(waxman_probability(0.0, p) == doctest::Approx(1.0));
    CHECK(waxman_probability(226.0, p) == doctest::Approx(std::exp(-1.0)));
    CHECK(waxman_probability(452.0, p) == doctest::Approx(std::exp(-2.0)));
    WaxmanParams half{0.5, 100.0};
    CHECK(waxman_probability(100.0, half) == doctest::Approx(0.5 * std::exp(-1.0)));
    CHECK_THROWS_AS(waxman_probability(-1.0, p), std::invalid_argument);
}

TEST_CASE("waxman with coincident points and beta one is complete") {
    std::vector<PlanarPoint> pts(20, PlanarPoint{0.0, 0.0});
    RngStream rng(3, 0);
    const SpatialGraph g = generate_waxman(std::move(pts), WaxmanParams{}, rng);
    CHECK(g.edges.size() == 20u * 19u / 2u);
}

TEST_CASE("waxman edge probability matches the formula statistically") {
    // Two nodes at d = alpha_l ln 2 connect with probability one half.
    WaxmanParams p;
    const double d = p.alpha_l_km * std::log(2.0);
    std::size_t connected = 0;
    const std::size_t trials = 10000;
    for (std::size_t t = 0; t < trials; ++t) {
        RngStream rng(11, t);
        const SpatialGraph g =
            generate_waxman({{0.0, 0.0}, {d, 0.0}}, p, rng);
        connected += g.edges.size();
    }
    const double frac = static_cast<double>(connected) / static_cast<double>(trials);
    CHECK(frac == doctest::Approx(0.5).epsilon(0.05));  // five sigma is 0.025
}

TEST_CASE("waxman generation is reproducible and canonical") {
    RngStream rng(5, 9);
    std::vector<PlanarPoint> pts;
    RngStream prng(6, 0);
    for (int i = 0; i < 100; ++i)
        pts.push_back({prng.uniform01() * 500.0, prng.uniform01() * 500.0});
    const SpatialGraph a = generate_waxman(pts, WaxmanParams{}, rng);
    RngStream rng2(5, 9);
    const SpatialGraph b = generate_waxman(pts, WaxmanParams{}, rng2);
    CHECK(a.edges == b.edges);
    CHECK(std::is_sorted(a.edges.begin(), a.edges.end()));
    for (const auto& [u, v] : a.edges) CHECK(u < v);
}

// ---------------------------------------------------------------------------
// Growth model
// ---------------------------------------------------------------------------

TEST_CASE("attachment weights are normalized k d^-alpha") {
    const auto w = soares_attachment_weights({{2, 2.0}, {1, 1.0}}, 1.0);
    REQUIRE(w.size() == 2);
    CHECK(w[0] == doctest::Approx(0.5));
    CHECK(w[1] == doctest::Approx(0.5));

    const auto w0 = soares_attachment_weights({{3, 10.0}, {1, 20.0}}, 0.0);
    CHECK(w0[0] == doctest::Approx(0.75));
    CHECK(w0[1] == doctest::Approx(0.25));

    // Coincident points are clamped to the minimum distance, not infinity.
    const auto wc = soares_attachment_weights({{1, 0.0}, {1, kMinAttachmentDistanceKm}}, 2.0);
    CHECK(wc[0] == doctest::Approx(0.5));
    CHECK(wc[1] == doctest::Approx(0.5));

    CHECK_THROWS_AS(soares_attachment_weights({}, 1.0), std::invalid_argument);
}

TEST_CASE("growth model edge count is m(m+1)/2 + m(N-m-1)") {
    for (const std::size_t n : {4u, 10u, 57u, 200u}) {
        RngStream prng(8, n);
        std::vector<PlanarPoint> pts;
        for (std::size_t i = 0; i < n; ++i)
            pts.push_back({prng.uniform01() * 1000.0, prng.uniform01() * 1000.0});
        RngStream rng(21, n);
        SoaresParams p;
        const SpatialGraph g = generate_soares(std::move(pts), p, rng);
        const std::size_t expected = p.m * (p.m + 1) / 2 + p.m * (n - p.m - 1);
        CHECK(g.edges.size() == expected);

        // The first m+1 nodes form the seed clique and every degree is >= m.
        std::set<Edge> edge_set(g.edges.begin(), g.edges.end());
        for (NodeIndex u = 0; u < p.m + 1; ++u)
            for (NodeIndex v = u + 1; v < p.m + 1; ++v)
                CHECK(edge_set.count({u, v}) == 1);
        for (const int d : degrees_of(g)) CHECK(d >= static_cast<int>(p.m));
    }
}

TEST_CASE("growth model rejects too few nodes") {
    RngStream rng(1, 0);
    SoaresParams p;  // m = 3 needs at least 4 nodes
    std::vector<PlanarPoint> pts(3, PlanarPoint{0.0, 0.0});
    CHECK_THROWS_AS(generate_soares(std::move(pts), p, rng), std::invalid_argument);
}

TEST_CASE("first attachment follows the weight distribution") {
    // Seed pair {0, 1} at unit spacing; node 2 sits 1 km from node 0 and
    // 2 km from node 1. With equal degrees the odds are 1 : 2^-alpha.
    SoaresParams p;
    p.m = 1;
    p.alpha_a = 5.0;
    const std::vector<PlanarPoint> pts = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
    // d(2,0) = 1, d(2,1) = sqrt(2).
    const double w0 = 1.0;
    const double w1 = std::pow(std::sqrt(2.0), -5.0);
    const double expect = w0 / (w0 + w1);
    std::size_t to_zero = 0;
    const std::size_t trials = 4000;
    for (std::size_t t = 0; t < trials; ++t) {
        RngStream rng(33, t);
        const SpatialGraph g = generate_soares(pts, p, rng);
        REQUIRE(g.edges.size() == 2);
        std::set<Edge> edge_set(g.edges.begin(), g.edges.end());
        if (edge_set.count({0, 2}) == 1) ++to_zero;
    }
    const double frac = static_cast<double>(to_zero) / static_cast<double>(trials);
    const double sigma = std::sqrt(expect * (1.0 - expect) / static_cast<double>(trials));
    CHECK(std::abs(frac - expect) < 5.0 * sigma);
}

TEST_CASE("multiple picks come without replacement from fixed weights") {
    // Clique {0,1,2}, all degree 2, then node 3 picks m=2 targets.
    // Weights at its arrival: proportional to d^-5 with d = 1, 2, 4.
    SoaresParams p;
    p.m = 2;
    p.alpha_a = 5.0;
    const std::vector<PlanarPoint> pts = {{0.0, 0.0}, {2.0, 0.0}, {4.0, 0.0}, {1.0, 0.0}};
    // d(3,i) = 1, 1, 3: make them distinct instead.
    const std::vector<PlanarPoint> pts2 = {{1.0, 0.0}, {2.0, 0.0}, {4.0, 0.0}, {0.0, 0.0}};
    // d(3,0) = 1, d(3,1) = 2, d(3,2) = 4.
    const double w[3] = {1.0, std::pow(2.0, -5.0), std::pow(4.0, -5.0)};
    // Probability that node 3 ends up linked to {0,1}: either order.
    const double p01 = w[0] / (w[0] + w[1] + w[2]) * (w[1] / (w[1] + w[2])) +
                       w[1] / (w[0] + w[1] + w[2]) * (w[0] / (w[0] + w[2]));
    std::size_t hit = 0;
    const std::size_t trials = 4000;
    for (std::size_t t = 0; t < trials; ++t) {
        RngStream rng(44, t);
        const SpatialGraph g = generate_soares(pts2, p, rng);
        std::set<Edge> edge_set(g.edges.begin(), g.edges.end());
        REQUIRE(edge_set.size() == 5);  // clique 3 + two attachments
        // No duplicate edges and the arrival got exactly m new links.
        CHECK(degrees_of(g)[3] == 2);
        if (edge_set.count({0, 3}) == 1 && edge_set.count({1, 3}) == 1) ++hit;
    }
    const double frac = static_cast<double>(hit) / static_cast<double>(trials);
    const double sigma = std::sqrt(p01 * (1.0 - p01) / static_cast<double>(trials));
    CHECK(std::abs(frac - p01) < 5.0 * sigma);
    (void)pts;
}

// ---------------------------------------------------------------------------
// Quota model
// ---------------------------------------------------------------------------

TEST_CASE("power law sampler matches the exact masses") {
    RozenfeldParams p;
    p.lambda = 3.0;
    p.min_degree = 3;
    p.max_degree = 5;
    const PowerLawDegreeSampler sampler(p);
    CHECK(sampler.support_min() == 3);
    CHECK(sampler.support_max() == 5);

    const double mass[3] = {std::pow(3.0, -3.0), std::pow(4.0, -3.0), std::pow(5.0, -3.0)};
    const double total = mass[0] + mass[1] + mass[2];
    std::map<std::size_t, std::size_t> counts;
    RngStream rng(17, 0);
    const std::size_t draws = 200000;
    for (std::size_t i = 0; i < draws; ++i) ++counts[sampler(rng)];
    for (std::size_t k = 3; k <= 5; ++k) {
        const double expect = mass[k - 3] / total;
        const double got = static_cast<double>(counts[k]) / static_cast<double>(draws);
        const double sigma = std::sqrt(expect * (1.0 - expect) / static_cast<double>(draws));
        CHECK(std::abs(got - expect) < 5.0 * sigma);
    }
}

TEST_CASE("exclusive support drops both endpoints") {
    RozenfeldParams p;
    p.min_degree = 3;
    p.max_degree = 6;
    p.inclusive_support = false;
    const PowerLawDegreeSampler sampler(p);
    CHECK(sampler.support_min() == 4);
    CHECK(sampler.support_max() == 5);
    RngStream rng(2, 0);
    for (int i = 0; i < 1000; ++i) {
        const std::size_t k = sampler(rng);
        CHECK(k >= 4);
        CHECK(k <= 5);
    }
}

TEST_CASE("connection radius is A sqrt(k)") {
    CHECK(connection_radius(4, 100.0) == doctest::Approx(200.0));
    CHECK(connection_radius(1, 50.0) == doctest::Approx(50.0));
    CHECK(connection_radius(9, 100.0) == doctest::Approx(300.0));
}

TEST_CASE("quota model on a line is order independent") {
    // Quotas all but surely 2 (lambda = 50 on {2, 3}); the radius r(2) = A
    // sqrt(2) reaches only adjacent nodes 100 km apart, so every processing
    // order produces the path 0 - 1 - 2.
    RozenfeldParams p;
    p.lambda = 50.0;
    p.min_degree = 2;
    p.max_degree = 3;
    p.radius_scale_km = 100.0;
    const std::vector<PlanarPoint> pts = {{0.0, 0.0}, {100.0, 0.0}, {200.0, 0.0}};
    for (std::uint64_t s = 0; s < 30; ++s) {
        RngStream rng(60, s);
        const SpatialGraph g = generate_rozenfeld(pts, p, rng);
        REQUIRE(g.edges.size() == 2);
        CHECK(g.edges[0] == Edge{0, 1});
        CHECK(g.edges[1] == Edge{1, 2});
    }
}

TEST_CASE("quota model invariants hold on a random instance") {
    RozenfeldParams p;  // defaults: lambda 3, quotas from 3 up
    RngStream prng(71, 0);
    std::vector<PlanarPoint> pts;
    for (int i = 0; i < 300; ++i)
        pts.push_back({prng.uniform01() * 2000.0 - 1000.0, prng.uniform01() * 2000.0 - 1000.0});

    RngStream rng(72, 0);
    RozenfeldDiagnostics diag;
    const SpatialGraph g = generate_rozenfeld(pts, p, rng, nullptr, &diag);

    REQUIRE(diag.quotas.size() == 300);
    REQUIRE(diag.order.size() == 300);
    REQUIRE(diag.initiators.size() == g.edges.size());

    // The processing order is a permutation of the nodes.
    std::vector<NodeIndex> sorted = diag.order;
    std::sort(sorted.begin(), sorted.end());
    for (NodeIndex i = 0; i < 300; ++i) CHECK(sorted[i] == i);

    // No node exceeds its quota, on either side of an edge.
    const auto deg = degrees_of(g);
    for (std::size_t i = 0; i < 300; ++i)
        CHECK(deg[i] <= static_cast<int>(diag.quotas[i]));

    // Every edge stays inside the initiator's connection radius.
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        const auto [u, v] = g.edges[e];
        const NodeIndex init = diag.initiators[e];
        REQUIRE((init == u || init == v));
        const NodeIndex other = init == u ? v : u;
        const double dx = pts[init].x - pts[other].x;
        const double dy = pts[init].y - pts[other].y;
        const double r = connection_radius(diag.quotas[init], p.radius_scale_km);
        CHECK(std::sqrt(dx * dx + dy * dy) <= r * (1.0 + 1e-12));
    }

    // Reproducible.
    RngStream rng2(72, 0);
    const SpatialGraph h = generate_rozenfeld(pts, p, rng2);
    CHECK(g.edges == h.edges);
}

TEST_CASE("quota model accepts a shared sampler") {
    RozenfeldParams p;
    const PowerLawDegreeSampler sampler(p);
    RngStream prng(81, 0);
    std::vector<PlanarPoint> pts;
    for (int i = 0; i < 100; ++i)
        pts.push_back({prng.uniform01() * 1000.0, prng.uniform01() * 1000.0});
    RngStream a(82, 0), b(82, 0);
    const SpatialGraph with_shared = generate_rozenfeld(pts, p, a, &sampler);
    const SpatialGraph without = generate_rozenfeld(pts, p, b);
    CHECK(with_shared.edges == without.edges);
}
