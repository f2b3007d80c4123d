#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "qnet/geometry.hpp"

namespace qnet {

using NodeIndex = std::uint32_t;
using Edge = std::pair<NodeIndex, NodeIndex>;  // canonical form u < v

// Undirected simple graph with optional per-node coordinates. Covers both the
// fiber layer and the photonic overlay sampled from it; the layer tag travels
// with the graph into the serialized header.
struct SpatialGraph {
    enum class Coords { none, planar, geographic };

    std::size_t node_count = 0;
    Coords coords = Coords::none;
    std::vector<PlanarPoint> planar;  // size node_count when coords == planar
    std::vector<GeoPoint> geo;        // size node_count when coords == geographic
    std::vector<Edge> edges;
    std::string layer = "fiber";

    static SpatialGraph from_planar(std::vector<PlanarPoint> points);
    static SpatialGraph from_geo(std::vector<GeoPoint> points);
    static SpatialGraph with_node_count(std::size_t n);
};

// Normalizes every edge to u < v and sorts lexicographically; this is the
// serialized order, so two graphs with equal edge sets serialize identically.
void canonicalize_edges(SpatialGraph& g);

// Empty string when g is a valid simple undirected graph (endpoints in range,
// no self loops, no duplicates among canonical edges), else a diagnostic.
std::string validate_graph(const SpatialGraph& g);

// CSR adjacency, built once and read many times. Neighbor lists ascending.
struct Adjacency {
    std::vector<std::uint32_t> offsets;  // size node_count + 1
    std::vector<NodeIndex> neighbors;

    std::size_t node_count() const { return offsets.empty() ? 0 : offsets.size() - 1; }
    std::size_t degree(NodeIndex v) const { return offsets[v + 1] - offsets[v]; }
    const NodeIndex* begin(NodeIndex v) const { return neighbors.data() + offsets[v]; }
    const NodeIndex* end(NodeIndex v) const { return neighbors.data() + offsets[v + 1]; }
};

Adjacency build_adjacency(const SpatialGraph& g);

// Thrown on malformed input files; the message carries file and line.
struct GraphIoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tab-separated edge list with a '#' header carrying nodes/edges/layer.
void save_edges(const SpatialGraph& g, const std::filesystem::path& file);

// Tab-separated id/x/y (planar) or id/lat/lon (geographic) rows. Doubles are
// written in shortest round-trip form, so save/load/save is byte identical.
void save_positions(const SpatialGraph& g, const std::filesystem::path& file);

// Loads an edge list; positions_file may be empty, giving a positionless
// graph (enough for metrics, not for overlay sampling).
SpatialGraph load_graph(const std::filesystem::path& edges_file,
                        const std::filesystem::path& positions_file = {});

}  // namespace qnet
