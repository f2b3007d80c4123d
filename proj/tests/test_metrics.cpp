#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "qnet/fiber_models.hpp"
#include "qnet/metrics.hpp"
#include "qnet/rng.hpp"

using namespace qnet;

namespace {

void compare_against_oracle(const SpatialGraph& g) {
    CHECK(giant_component(g).fraction ==
          doctest::Approx(oracle::giant_fraction(g)).epsilon(1e-12).scale(1.0));

    const auto lib_path = avg_shortest_path(g);
    const auto ora_path = oracle::mean_path(g);
    REQUIRE(lib_path.has_value() == ora_path.has_value());
    if (lib_path)
        CHECK(lib_path->mean == doctest::Approx(*ora_path).epsilon(1e-10).scale(1.0));

    CHECK(avg_clustering(g) ==
          doctest::Approx(oracle::avg_clustering(g)).epsilon(1e-10).scale(1.0));

    const auto lib_ck = clustering_by_degree(g);
    const auto ora_ck = oracle::clustering_by_degree(g);
    REQUIRE(lib_ck.size() == ora_ck.size());
    for (const auto& [k, c] : ora_ck) {
        REQUIRE(lib_ck.count(k) == 1);
        CHECK(lib_ck.at(k) == doctest::Approx(c).epsilon(1e-10).scale(1.0));
    }

    const auto lib_r = assortativity(g);
    const auto ora_r = oracle::assortativity(g);
    REQUIRE(lib_r.has_value() == ora_r.has_value());
    if (lib_r) CHECK(*lib_r == doctest::Approx(*ora_r).epsilon(1e-9).scale(1.0));

    const auto lib_knn = knn_by_degree(g);
    const auto ora_knn = oracle::knn_by_degree(g);
    REQUIRE(lib_knn.size() == ora_knn.size());
    for (const auto& [k, v] : ora_knn)
        CHECK(lib_knn.at(k) == doctest::Approx(v).epsilon(1e-10).scale(1.0));

    const auto lib_hist = degree_histogram(g);
    const auto ora_hist = oracle::degree_histogram(g);
    REQUIRE(lib_hist.size() == ora_hist.size());
    for (const auto& [k, v] : ora_hist)
        CHECK(lib_hist.at(k) == doctest::Approx(v).epsilon(1e-12).scale(1.0));
}

}  // namespace

TEST_CASE("metrics agree with brute force on every graph up to five nodes") {
    for (std::size_t n = 0; n <= 5; ++n) {
        const std::size_t pairs = n < 2 ? 0 : n * (n - 1) / 2;
        for (std::uint64_t mask = 0; mask < (1ull << pairs); ++mask)
            compare_against_oracle(oracle::graph_from_mask(n, mask));
    }
}

TEST_CASE("metrics agree with brute force on random eight-node graphs") {
    RngStream rng(120, 0);
    for (int trial = 0; trial < 3000; ++trial) {
        const std::uint64_t mask = rng.bits() & ((1ull << 28) - 1);
        compare_against_oracle(oracle::graph_from_mask(8, mask));
    }
}

TEST_CASE("hand checked values on small graphs") {
    // Triangle: everything is known exactly.
    SpatialGraph tri = SpatialGraph::with_node_count(3);
    tri.edges = {{0, 1}, {0, 2}, {1, 2}};
    CHECK(giant_component(tri).fraction == 1.0);
    CHECK(avg_shortest_path(tri)->mean == doctest::Approx(1.0));
    CHECK(avg_clustering(tri) == doctest::Approx(1.0));
    CHECK_FALSE(assortativity(tri).has_value());  // all degrees equal

    // Path on three nodes: <l> = (1+1+2)*2 / 6 = 4/3.
    SpatialGraph path = SpatialGraph::with_node_count(3);
    path.edges = {{0, 1}, {1, 2}};
    CHECK(avg_shortest_path(path)->mean == doctest::Approx(4.0 / 3.0));
    CHECK(avg_clustering(path) == doctest::Approx(0.0));

    // Star with three leaves is perfectly disassortative.
    SpatialGraph star = SpatialGraph::with_node_count(4);
    star.edges = {{0, 1}, {0, 2}, {0, 3}};
    CHECK(*assortativity(star) == doctest::Approx(-1.0));
    CHECK(knn_by_degree(star).at(1) == doctest::Approx(3.0));
    CHECK(knn_by_degree(star).at(3) == doctest::Approx(1.0));

    // Complete graph of four minus one edge, by C_i = 2 L_i / (k_i (k_i - 1)):
    // the two degree-2 nodes close their single pair (C = 1), the two
    // degree-3 nodes close two of three pairs (C = 2/3), so <C> = 5/6.
    SpatialGraph k4m = SpatialGraph::with_node_count(4);
    k4m.edges = {{0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    CHECK(avg_clustering(k4m) == doctest::Approx(5.0 / 6.0));
    const auto ck = clustering_by_degree(k4m);
    CHECK(ck.at(2) == doctest::Approx(1.0));
    CHECK(ck.at(3) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("giant component ties go to the smallest index") {
    SpatialGraph g = SpatialGraph::with_node_count(6);
    g.edges = {{2, 3}, {4, 5}};  // two components of two, plus isolated 0, 1
    const GiantComponent giant = giant_component(g);
    REQUIRE(giant.nodes.size() == 2);
    CHECK(giant.nodes[0] == 2);
    CHECK(giant.nodes[1] == 3);
    CHECK(giant.fraction == doctest::Approx(2.0 / 6.0));
}

TEST_CASE("isolated nodes count in P(k) but not in knn") {
    SpatialGraph g = SpatialGraph::with_node_count(4);
    g.edges = {{0, 1}};
    const auto hist = degree_histogram(g);
    CHECK(hist.at(0) == doctest::Approx(0.5));
    CHECK(hist.at(1) == doctest::Approx(0.5));
    double total = 0.0;
    for (const auto& [k, p] : hist) total += p;
    CHECK(total == doctest::Approx(1.0));
    CHECK(knn_by_degree(g).count(0) == 0);
}

TEST_CASE("sampled path lengths estimate the exact mean") {
    // A graph large enough to be interesting, forced into sampling mode.
    RngStream prng(130, 0);
    std::vector<PlanarPoint> pts;
    for (int i = 0; i < 400; ++i)
        pts.push_back({prng.uniform01() * 900.0, prng.uniform01() * 900.0});
    RngStream grng(131, 0);
    const SpatialGraph g = generate_waxman(std::move(pts), WaxmanParams{}, grng);

    const auto exact = avg_shortest_path(g);
    REQUIRE(exact.has_value());
    CHECK_FALSE(exact->sampled);

    PathLengthOptions opt;
    opt.exact_threshold = 10;  // force sampling
    opt.sources = 128;
    opt.sample_seed = 7;
    const auto sampled = avg_shortest_path(g, opt);
    REQUIRE(sampled.has_value());
    CHECK(sampled->sampled);
    REQUIRE(sampled->standard_error.has_value());
    CHECK(*sampled->standard_error > 0.0);
    CHECK(std::abs(sampled->mean - exact->mean) < 6.0 * *sampled->standard_error +
                                                      1e-9);

    // Same seed, same estimate; enough sources collapses back to exact.
    const auto again = avg_shortest_path(g, opt);
    CHECK(again->mean == sampled->mean);
    PathLengthOptions all;
    all.exact_threshold = 10;
    all.sources = 100000;  // more sources than giant nodes
    const auto full = avg_shortest_path(g, all);
    CHECK_FALSE(full->sampled);
    CHECK(full->mean == doctest::Approx(exact->mean));
}

TEST_CASE("degenerate graphs") {
    SpatialGraph empty = SpatialGraph::with_node_count(0);
    CHECK(giant_component(empty).fraction == 0.0);
    CHECK_FALSE(avg_shortest_path(empty).has_value());
    CHECK(avg_clustering(empty) == 0.0);
    CHECK_FALSE(assortativity(empty).has_value());

    SpatialGraph one = SpatialGraph::with_node_count(1);
    CHECK(giant_component(one).fraction == 1.0);
    CHECK_FALSE(avg_shortest_path(one).has_value());
}

TEST_CASE("full report is consistent with the individual metrics") {
    RngStream prng(140, 0);
    std::vector<PlanarPoint> pts;
    for (int i = 0; i < 150; ++i)
        pts.push_back({prng.uniform01() * 600.0, prng.uniform01() * 600.0});
    RngStream grng(141, 0);
    const SpatialGraph g = generate_waxman(std::move(pts), WaxmanParams{}, grng);

    const MetricsReport r = full_report(g);
    CHECK(r.node_count == g.node_count);
    CHECK(r.edge_count == g.edges.size());
    CHECK(r.giant_fraction == doctest::Approx(giant_component(g).fraction));
    CHECK(r.avg_clustering == doctest::Approx(avg_clustering(g)));
    CHECK(r.edges_per_node ==
          doctest::Approx(static_cast<double>(g.edges.size()) / g.node_count));
    REQUIRE(r.avg_shortest_path.has_value());
    CHECK(*r.avg_shortest_path == doctest::Approx(avg_shortest_path(g)->mean));
    REQUIRE(r.assortativity.has_value() == assortativity(g).has_value());
    const auto hist = degree_histogram(g);
    CHECK(r.degree_histogram.size() == hist.size());
    std::size_t total_count = 0;
    for (const auto& [k, c] : r.degree_counts) total_count += c;
    CHECK(total_count == g.node_count);

    // Without the path option the report leaves the field empty.
    ReportOptions no_path;
    no_path.path_length = false;
    const MetricsReport r2 = full_report(g, no_path);
    CHECK_FALSE(r2.avg_shortest_path.has_value());
}

TEST_CASE("report serialization carries undefined markers") {
    SpatialGraph g = SpatialGraph::with_node_count(2);  // no edges at all
    const MetricsReport r = full_report(g);
    const std::string json_text = report_to_json(r);
    CHECK(json_text.find("\"assortativity\": \"undefined\"") != std::string::npos);
    CHECK(json_text.find("\"avg_shortest_path\": \"undefined\"") != std::string::npos);

    const std::string row = report_csv_row(r);
    CHECK(row.find("undefined") != std::string::npos);
    std::size_t commas = 0;
    for (const char c : row)
        if (c == ',') ++commas;
    CHECK(commas == 8);

    std::size_t header_commas = 0;
    for (const char* p = kReportCsvHeader; *p; ++p)
        if (*p == ',') ++header_commas;
    CHECK(header_commas == commas);
}
