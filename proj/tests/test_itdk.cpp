#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "qnet/itdk.hpp"
#include "qnet/metrics.hpp"

using namespace qnet;

namespace {

const std::string kFixtures = QNET_FIXTURE_DIR;

ItdkDataset sample_dataset() {
    return ingest_files(kFixtures + "/sample.nodes.geo", kFixtures + "/sample.links");
}

}  // namespace

TEST_CASE("fnv1a64 known vectors") {
    CHECK(fnv1a64(kFnvOffset, "", 0) == kFnvOffset);
    CHECK(fnv1a64(kFnvOffset, "a", 1) == 0xaf63dc4c8601ec8cull);
    CHECK(fnv1a64(kFnvOffset, "foobar", 6) == 0x85944171f73967e8ull);
}

TEST_CASE("fnv1a64_file hashes raw bytes") {
    const std::string path = "itdk_digest_probe.bin";
    {
        std::ofstream out(path, std::ios::binary);
        out << "foobar";
    }
    CHECK(fnv1a64_file(path) == 0x85944171f73967e8ull);
    std::remove(path.c_str());
}

TEST_CASE("hyperlink expansion") {
    HyperLink link;
    link.link_id = "L9";
    link.members = {"H3", "H1", "H2", "H1"};
    const auto pairs = expand_hyperlink(link);
    REQUIRE(pairs.size() == 3);  // duplicates collapse before pairing
    CHECK(pairs[0] == std::pair<std::string, std::string>{"H1", "H2"});
    CHECK(pairs[1] == std::pair<std::string, std::string>{"H1", "H3"});
    CHECK(pairs[2] == std::pair<std::string, std::string>{"H2", "H3"});

    HyperLink five;
    five.members = {"A", "B", "C", "D", "E"};
    CHECK(expand_hyperlink(five).size() == 10);
}

TEST_CASE("geo parsing handles both record shapes") {
    ItdkDataset d;
    std::istringstream in(
        "# header\n"
        "node.geo N1:\tEU\tDE\tBE\tBerlin\t52.52\t13.405\tmaxmind\n"
        "X9\tNA\tUS\tBoston\t42.36\t-71.06\n"
        "\n"
        "node.geo broken\n"
        "node.geo N2:\tEU\tFR\n"
        "B1\tSA\tBR\tManaus\t95.0\t-60.0\n");
    const ItdkParseStats stats = parse_geo_nodes(in, d);
    CHECK(stats.lines == 7);
    CHECK(stats.comments == 1);
    CHECK(stats.records == 2);
    CHECK(stats.malformed == 3);  // no colon, short record, latitude out of range

    REQUIRE(d.node_count() == 2);
    const auto n1 = d.find("N1");
    REQUIRE(n1.has_value());
    CHECK(d.has_geo[*n1] == 1);
    CHECK(d.geo[*n1].latitude == doctest::Approx(52.52));
    CHECK(d.geo[*n1].longitude == doctest::Approx(13.405));
    CHECK(d.continent[*n1] == "EU");
    CHECK(d.country[*n1] == "DE");
    CHECK(d.city[*n1] == "Berlin");
    const auto x9 = d.find("X9");
    REQUIRE(x9.has_value());
    CHECK(d.continent[*x9] == "NA");
    CHECK(d.city[*x9] == "Boston");
}

TEST_CASE("link parsing strips addresses and dedupes members") {
    ItdkDataset d;
    std::istringstream in(
        "link L1:  N1:10.0.0.1 N2:10.0.0.2 N1\n"
        "link L2:  N3\n"
        "link broken N1 N2\n"
        "L3\tN2\tN3\n"
        "link L4:  A B C D E\n");
    const ItdkParseStats stats = parse_links(in, d);
    CHECK(stats.records == 4);
    CHECK(stats.malformed == 1);
    // L1 collapses to one pair, L2 has a single member and no pairs,
    // L3 adds one, the 5-member L4 adds C(5,2) = 10.
    CHECK(d.pairs.size() == 12);
    d.finalize();
    CHECK(d.pairs.size() == 12);
}

TEST_CASE("sample fixtures ingest to the hand trace") {
    ItdkDataset d = sample_dataset();
    CHECK(d.geo_stats.lines == 8);
    CHECK(d.geo_stats.comments == 1);
    CHECK(d.geo_stats.records == 5);
    CHECK(d.geo_stats.malformed == 1);
    CHECK(d.link_stats.records == 4);
    CHECK(d.link_stats.malformed == 1);
    CHECK(d.geo_file_digest == fnv1a64_file(kFixtures + "/sample.nodes.geo"));
    CHECK(d.geo_file_digest != 0);

    CHECK(d.node_count() == 6);  // N6 appears only in the link file
    CHECK(d.pairs.size() == 4);
    const auto n6 = d.find("N6");
    REQUIRE(n6.has_value());
    CHECK(d.has_geo[*n6] == 0);

    const auto counts = continent_counts(d);
    CHECK(counts.at("EU") == 4);
    CHECK(counts.at("NA") == 1);
    CHECK(counts.size() == 2);
}

TEST_CASE("cross filter drops ungeolocated endpoints and is idempotent") {
    ItdkDataset d = sample_dataset();
    const FilterReport r = cross_filter(d);
    CHECK(r.nodes_in == 6);
    CHECK(r.pairs_in == 4);
    CHECK(r.nodes_active == 6);
    CHECK(r.nodes_geolocated == 5);
    CHECK(r.pairs_kept == 3);
    CHECK(r.nodes_out == 4);
    CHECK(r.pairs_out == 3);
    CHECK(d.node_count() == 4);
    CHECK_FALSE(d.find("N5").has_value());  // geolocated but all pairs dropped
    CHECK_FALSE(d.find("N6").has_value());

    const std::uint64_t digest = dataset_digest(d);
    const FilterReport again = cross_filter(d);
    CHECK(again.nodes_in == 4);
    CHECK(again.pairs_in == 3);
    CHECK(again.nodes_out == 4);
    CHECK(again.pairs_out == 3);
    CHECK(dataset_digest(d) == digest);
}

TEST_CASE("both fixture encodings describe the same dataset") {
    ItdkDataset itdk = sample_dataset();
    ItdkDataset tsv =
        ingest_files(kFixtures + "/sample_nodes.tsv", kFixtures + "/sample_links.tsv");
    CHECK(tsv.geo_stats.records == 5);
    CHECK(tsv.geo_stats.malformed == 0);
    CHECK(tsv.link_stats.records == 4);
    // The region column is ITDK-only and deliberately unstored, so the two
    // encodings intern byte-identical datasets.
    CHECK(dataset_digest(itdk) == dataset_digest(tsv));
    cross_filter(itdk);
    cross_filter(tsv);
    CHECK(dataset_digest(itdk) == dataset_digest(tsv));
}

TEST_CASE("continent segmentation") {
    ItdkDataset d = sample_dataset();
    cross_filter(d);

    const ContinentSegment eu = segment_continent(d, "EU");
    CHECK(eu.graph.node_count == 4);
    CHECK(eu.graph.edges.size() == 3);
    CHECK(eu.graph.coords == SpatialGraph::Coords::geographic);
    CHECK(eu.graph.layer == "fiber");
    CHECK(validate_graph(eu.graph).empty());
    REQUIRE(eu.node_map.size() == 4);
    for (std::size_t i = 0; i < eu.node_map.size(); ++i)
        CHECK(d.continent[eu.node_map[i]] == "EU");

    const ContinentSegment na = segment_continent(d, "NA");
    CHECK(na.graph.node_count == 0);
    CHECK(na.graph.edges.empty());
}

TEST_CASE("real network report covers both layers") {
    ItdkDataset d = sample_dataset();
    cross_filter(d);
    const ContinentSegment eu = segment_continent(d, "EU");

    ReportOptions options;
    options.histograms = false;
    const RealNetworkReport report =
        real_network_report(eu.graph, PhotonicParams{}, 11, 0, options);
    CHECK(report.fiber.node_count == 4);
    CHECK(report.fiber.edge_count == 3);
    CHECK(report.fiber.giant_fraction == doctest::Approx(1.0));
    REQUIRE(report.fiber.avg_shortest_path.has_value());
    CHECK(*report.fiber.avg_shortest_path == doctest::Approx(5.0 / 3.0));
    // Continental hops (about 878 to 1365 km) are far beyond the attenuation
    // scale, so the photonic layer is empty for any seed.
    CHECK(report.photonic.node_count == 4);
    CHECK(report.photonic.edge_count == 0);

    const RealNetworkReport again =
        real_network_report(eu.graph, PhotonicParams{}, 11, 0, options);
    CHECK(again.fiber.avg_clustering == report.fiber.avg_clustering);
}

TEST_CASE("dataset digest tracks content") {
    ItdkDataset a;
    a.intern("N1");
    a.intern("N2");
    a.pairs.emplace_back(0, 1);
    a.finalize();
    const std::uint64_t base = dataset_digest(a);

    ItdkDataset b = a;
    CHECK(dataset_digest(b) == base);
    b.continent[0] = "EU";
    CHECK(dataset_digest(b) != base);

    ItdkDataset c = a;
    c.has_geo[0] = 1;
    c.geo[0] = GeoPoint{1.0, 2.0};
    CHECK(dataset_digest(c) != base);
}
