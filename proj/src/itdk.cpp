#include "qnet/itdk.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace qnet {

namespace {

constexpr std::uint64_t kFnvPrime = 1099511628211ull;

std::string_view trim_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

std::vector<std::string_view> split_spaces(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
        if (j > i) tokens.push_back(line.substr(i, j - i));
        i = j;
    }
    return tokens;
}

bool parse_double(std::string_view field, double& out) {
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto res = std::from_chars(begin, end, out);
    return res.ec == std::errc{} && res.ptr == end;
}

}  // namespace

std::uint32_t ItdkDataset::intern(std::string_view label) {
    const auto it = index_.find(label);
    if (it != index_.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(labels.size());
    index_.emplace(std::string(label), id);
    labels.emplace_back(label);
    has_geo.push_back(0);
    geo.push_back(GeoPoint{0.0, 0.0});
    continent.emplace_back();
    country.emplace_back();
    city.emplace_back();
    return id;
}

std::optional<std::uint32_t> ItdkDataset::find(std::string_view label) const {
    const auto it = index_.find(label);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

void ItdkDataset::finalize() {
    for (auto& [u, v] : pairs)
        if (u > v) std::swap(u, v);
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
}

std::vector<std::pair<std::string, std::string>> expand_hyperlink(const HyperLink& link) {
    std::vector<std::string> members = link.members;
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(members.size() * (members.size() - 1) / 2);
    for (std::size_t i = 0; i < members.size(); ++i)
        for (std::size_t j = i + 1; j < members.size(); ++j)
            out.emplace_back(members[i], members[j]);
    return out;
}

ItdkParseStats parse_geo_nodes(std::istream& in, ItdkDataset& dataset) {
    ItdkParseStats stats;
    std::string raw;
    while (std::getline(in, raw)) {
        ++stats.lines;
        const std::string_view line = trim_cr(raw);
        if (line.empty()) continue;
        if (line.front() == '#') {
            ++stats.comments;
            continue;
        }

        std::string_view id;
        std::vector<std::string_view> fields;
        std::size_t lat_at = 0;
        constexpr std::string_view kPrefix = "node.geo ";
        if (line.substr(0, kPrefix.size()) == kPrefix) {
            const std::size_t colon = line.find(':', kPrefix.size());
            if (colon == std::string_view::npos) {
                ++stats.malformed;
                continue;
            }
            id = line.substr(kPrefix.size(), colon - kPrefix.size());
            std::string_view rest = line.substr(colon + 1);
            while (!rest.empty() && (rest.front() == ' ' || rest.front() == '\t'))
                rest.remove_prefix(1);
            fields = split_tabs(rest);
            // continent, country, region, city, lat, lon, source...
            if (fields.size() < 6) {
                ++stats.malformed;
                continue;
            }
            lat_at = 4;
        } else {
            fields = split_tabs(line);
            // id, continent, country, city, lat, lon[, source]
            if (fields.size() < 6) {
                ++stats.malformed;
                continue;
            }
            id = fields[0];
            fields.erase(fields.begin());
            // Align with the ITDK shape by faking an empty region slot.
            fields.insert(fields.begin() + 2, std::string_view{});
            lat_at = 4;
        }

        double lat = 0.0, lon = 0.0;
        if (id.empty() || !parse_double(fields[lat_at], lat) ||
            !parse_double(fields[lat_at + 1], lon) || !geo_in_bounds(GeoPoint{lat, lon})) {
            ++stats.malformed;
            continue;
        }
        const std::uint32_t node = dataset.intern(id);
        dataset.has_geo[node] = 1;
        dataset.geo[node] = GeoPoint{lat, lon};
        dataset.continent[node] = std::string(fields[0]);
        dataset.country[node] = std::string(fields[1]);
        dataset.city[node] = std::string(fields[3]);
        ++stats.records;
    }
    return stats;
}

ItdkParseStats parse_links(std::istream& in, ItdkDataset& dataset) {
    ItdkParseStats stats;
    std::string raw;
    std::vector<std::uint32_t> members;
    while (std::getline(in, raw)) {
        ++stats.lines;
        const std::string_view line = trim_cr(raw);
        if (line.empty()) continue;
        if (line.front() == '#') {
            ++stats.comments;
            continue;
        }

        members.clear();
        constexpr std::string_view kPrefix = "link ";
        if (line.substr(0, kPrefix.size()) == kPrefix) {
            const auto tokens = split_spaces(line.substr(kPrefix.size()));
            if (tokens.empty() || tokens[0].back() != ':') {
                ++stats.malformed;
                continue;
            }
            for (std::size_t t = 1; t < tokens.size(); ++t) {
                std::string_view member = tokens[t];
                const std::size_t colon = member.find(':');
                if (colon != std::string_view::npos) member = member.substr(0, colon);
                if (!member.empty()) members.push_back(dataset.intern(member));
            }
        } else {
            const auto fields = split_tabs(line);
            if (fields.size() < 2 || fields[0].empty()) {
                ++stats.malformed;
                continue;
            }
            for (std::size_t t = 1; t < fields.size(); ++t)
                if (!fields[t].empty()) members.push_back(dataset.intern(fields[t]));
        }
        if (members.empty()) {
            ++stats.malformed;
            continue;
        }
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());
        for (std::size_t i = 0; i < members.size(); ++i)
            for (std::size_t j = i + 1; j < members.size(); ++j)
                dataset.pairs.emplace_back(members[i], members[j]);
        ++stats.records;
    }
    return stats;
}

ItdkDataset ingest_files(const std::string& nodes_path, const std::string& links_path) {
    ItdkDataset dataset;
    dataset.geo_file_digest = fnv1a64_file(nodes_path);
    dataset.link_file_digest = fnv1a64_file(links_path);
    {
        std::ifstream in(nodes_path);
        if (!in) throw GraphIoError(nodes_path + ": cannot open");
        dataset.geo_stats = parse_geo_nodes(in, dataset);
    }
    {
        std::ifstream in(links_path);
        if (!in) throw GraphIoError(links_path + ": cannot open");
        dataset.link_stats = parse_links(in, dataset);
    }
    dataset.finalize();
    return dataset;
}

FilterReport cross_filter(ItdkDataset& dataset) {
    FilterReport report;
    report.nodes_in = dataset.node_count();
    report.pairs_in = dataset.pairs.size();

    std::vector<std::uint8_t> active(dataset.node_count(), 0);
    for (const auto& [u, v] : dataset.pairs) {
        active[u] = 1;
        active[v] = 1;
    }
    std::vector<std::uint8_t> keep(dataset.node_count(), 0);
    for (std::size_t i = 0; i < dataset.node_count(); ++i) {
        if (active[i]) ++report.nodes_active;
        if (active[i] && dataset.has_geo[i]) {
            keep[i] = 1;
            ++report.nodes_geolocated;
        }
    }

    std::vector<Edge> kept_pairs;
    kept_pairs.reserve(dataset.pairs.size());
    std::vector<std::uint8_t> in_pair(dataset.node_count(), 0);
    for (const auto& [u, v] : dataset.pairs) {
        if (!keep[u] || !keep[v]) continue;
        kept_pairs.emplace_back(u, v);
        in_pair[u] = 1;
        in_pair[v] = 1;
    }
    report.pairs_kept = kept_pairs.size();

    ItdkDataset compact;
    compact.geo_stats = dataset.geo_stats;
    compact.link_stats = dataset.link_stats;
    compact.geo_file_digest = dataset.geo_file_digest;
    compact.link_file_digest = dataset.link_file_digest;
    std::vector<std::uint32_t> remap(dataset.node_count());
    for (std::size_t i = 0; i < dataset.node_count(); ++i) {
        if (!in_pair[i]) continue;
        const std::uint32_t id = compact.intern(dataset.labels[i]);
        remap[i] = id;
        compact.has_geo[id] = dataset.has_geo[i];
        compact.geo[id] = dataset.geo[i];
        compact.continent[id] = dataset.continent[i];
        compact.country[id] = dataset.country[i];
        compact.city[id] = dataset.city[i];
    }
    report.nodes_out = compact.node_count();
    compact.pairs.reserve(kept_pairs.size());
    for (const auto& [u, v] : kept_pairs) compact.pairs.emplace_back(remap[u], remap[v]);
    compact.finalize();
    report.pairs_out = compact.pairs.size();
    dataset = std::move(compact);
    return report;
}

std::map<std::string, std::size_t> continent_counts(const ItdkDataset& dataset) {
    std::map<std::string, std::size_t> counts;
    for (const auto& code : dataset.continent)
        if (!code.empty()) ++counts[code];
    return counts;
}

ContinentSegment segment_continent(const ItdkDataset& dataset, std::string_view code) {
    ContinentSegment segment;
    std::vector<std::uint32_t> remap(dataset.node_count(), UINT32_MAX);
    std::vector<GeoPoint> positions;
    for (std::size_t i = 0; i < dataset.node_count(); ++i) {
        if (!dataset.has_geo[i] || dataset.continent[i] != code) continue;
        remap[i] = static_cast<std::uint32_t>(segment.node_map.size());
        segment.node_map.push_back(static_cast<std::uint32_t>(i));
        positions.push_back(dataset.geo[i]);
    }
    segment.graph = SpatialGraph::from_geo(std::move(positions));
    for (const auto& [u, v] : dataset.pairs) {
        if (remap[u] == UINT32_MAX || remap[v] == UINT32_MAX) continue;
        segment.graph.edges.emplace_back(std::min(remap[u], remap[v]),
                                         std::max(remap[u], remap[v]));
    }
    canonicalize_edges(segment.graph);
    return segment;
}

RealNetworkReport real_network_report(const SpatialGraph& fiber, const PhotonicParams& params,
                                      std::uint64_t seed, std::uint64_t stream,
                                      const ReportOptions& options) {
    RngStream rng(seed, stream);
    const SpatialGraph photonic = sample_overlay(fiber, params, geodesic_distance_fn(fiber), rng);
    RealNetworkReport report;
    report.fiber = full_report(fiber, options);
    report.photonic = full_report(photonic, options);
    return report;
}

std::uint64_t fnv1a64(std::uint64_t state, const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
        state ^= bytes[i];
        state *= kFnvPrime;
    }
    return state;
}

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw GraphIoError(path + ": cannot open");
    std::uint64_t state = kFnvOffset;
    char buffer[1 << 16];
    while (in) {
        in.read(buffer, sizeof buffer);
        state = fnv1a64(state, buffer, static_cast<std::size_t>(in.gcount()));
    }
    return state;
}

std::uint64_t dataset_digest(const ItdkDataset& dataset) {
    std::uint64_t state = kFnvOffset;
    const auto mix_u64 = [&](std::uint64_t v) { state = fnv1a64(state, &v, sizeof v); };
    const auto mix_str = [&](const std::string& s) {
        state = fnv1a64(state, s.data(), s.size());
        state = fnv1a64(state, "\x1f", 1);
    };
    mix_u64(dataset.node_count());
    for (std::size_t i = 0; i < dataset.node_count(); ++i) {
        mix_str(dataset.labels[i]);
        mix_u64(dataset.has_geo[i]);
        if (dataset.has_geo[i]) {
            double coords[2] = {dataset.geo[i].latitude, dataset.geo[i].longitude};
            state = fnv1a64(state, coords, sizeof coords);
        }
        mix_str(dataset.continent[i]);
        mix_str(dataset.country[i]);
        mix_str(dataset.city[i]);
    }
    mix_u64(dataset.pairs.size());
    for (const auto& [u, v] : dataset.pairs) {
        mix_u64(u);
        mix_u64(v);
    }
    return state;
}

}  // namespace qnet
