#pragma once

// CAIDA ITDK ingestion: geolocated router nodes plus hyperlink records,
// cross-filtered into per-continent fiber graphs with geodesic distances.

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qnet/geometry.hpp"
#include "qnet/graph.hpp"
#include "qnet/metrics.hpp"
#include "qnet/photonic.hpp"

namespace qnet {

inline constexpr std::string_view kContinentCodes[] = {"AF", "AS", "EU", "NA", "OC", "SA"};

struct ItdkParseStats {
    std::size_t lines = 0;      // every line read
    std::size_t comments = 0;   // lines starting with '#'
    std::size_t records = 0;    // successfully parsed records
    std::size_t malformed = 0;  // counted and skipped, never fatal
};

// A link record before expansion: L<id> joining two or more router nodes.
struct HyperLink {
    std::string link_id;
    std::vector<std::string> members;
};

// All unordered member pairs, lexicographically canonical and deduplicated.
std::vector<std::pair<std::string, std::string>> expand_hyperlink(const HyperLink& link);

class ItdkDataset {
public:
    // Interned node table; parallel arrays indexed by the interned id.
    std::vector<std::string> labels;
    std::vector<std::uint8_t> has_geo;
    std::vector<GeoPoint> geo;  // valid only where has_geo is set
    std::vector<std::string> continent;
    std::vector<std::string> country;
    std::vector<std::string> city;
    std::vector<Edge> pairs;  // canonical and unique after finalize()

    ItdkParseStats geo_stats;
    ItdkParseStats link_stats;
    std::uint64_t geo_file_digest = 0;
    std::uint64_t link_file_digest = 0;

    std::uint32_t intern(std::string_view label);
    std::optional<std::uint32_t> find(std::string_view label) const;
    std::size_t node_count() const { return labels.size(); }

    // Canonicalizes, sorts, and deduplicates the pair list.
    void finalize();

private:
    struct StringHash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const noexcept {
            return std::hash<std::string_view>{}(s);
        }
    };
    std::unordered_map<std::string, std::uint32_t, StringHash, std::equal_to<>> index_;
};

// Geolocation records.  Accepts the ITDK form
//   node.geo N39:\t<continent>\t<country>\t<region>\t<city>\t<lat>\t<lon>\t<source...>
// and the simplified tab-separated fixture form
//   <id>\t<continent>\t<country>\t<city>\t<lat>\t<lon>[\t<source>]
ItdkParseStats parse_geo_nodes(std::istream& in, ItdkDataset& dataset);

// Link records.  Accepts the ITDK form
//   link L7:  N1:1.2.3.4 N2 N3:5.6.7.8 ...
// and the simplified tab-separated fixture form
//   <linkid>\t<member>\t<member>[...]
// Every hyperlink contributes all unordered pairs of its distinct members.
ItdkParseStats parse_links(std::istream& in, ItdkDataset& dataset);

// Streams both files, records their digests, and finalizes the pair list.
ItdkDataset ingest_files(const std::string& nodes_path, const std::string& links_path);

struct FilterReport {
    std::size_t nodes_in = 0;
    std::size_t pairs_in = 0;
    std::size_t nodes_active = 0;      // appear in at least one pair
    std::size_t nodes_geolocated = 0;  // active and carrying coordinates
    std::size_t pairs_kept = 0;        // both endpoints geolocated and active
    std::size_t nodes_out = 0;         // appear in at least one kept pair
    std::size_t pairs_out = 0;
};

// Keeps only geolocated nodes joined by surviving pairs; compacts in place.
// Applying it twice is a no-op.
FilterReport cross_filter(ItdkDataset& dataset);

// Node tally per continent code for the dataset as it currently stands.
std::map<std::string, std::size_t> continent_counts(const ItdkDataset& dataset);

struct ContinentSegment {
    SpatialGraph graph;                  // geographic coordinates, fiber layer
    std::vector<std::uint32_t> node_map;  // graph index -> dataset index
};

ContinentSegment segment_continent(const ItdkDataset& dataset, std::string_view code);

struct RealNetworkReport {
    MetricsReport fiber;
    MetricsReport photonic;
};

// Samples the photonic overlay over geodesic link lengths and reports both layers.
RealNetworkReport real_network_report(const SpatialGraph& fiber, const PhotonicParams& params,
                                      std::uint64_t seed, std::uint64_t stream,
                                      const ReportOptions& options);

std::uint64_t fnv1a64(std::uint64_t state, const void* data, std::size_t size);
std::uint64_t fnv1a64_file(const std::string& path);

// Content digest of the in-memory dataset (labels, coordinates, pairs).
std::uint64_t dataset_digest(const ItdkDataset& dataset);

inline constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;

}  // namespace qnet
