#include "qnet/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace qnet {

SpatialGraph SpatialGraph::from_planar(std::vector<PlanarPoint> points) {
    SpatialGraph g;
    g.node_count = points.size();
    g.coords = Coords::planar;
    g.planar = std::move(points);
    return g;
}

SpatialGraph SpatialGraph::from_geo(std::vector<GeoPoint> points) {
    SpatialGraph g;
    g.node_count = points.size();
    g.coords = Coords::geographic;
    g.geo = std::move(points);
    return g;
}

SpatialGraph SpatialGraph::with_node_count(std::size_t n) {
    SpatialGraph g;
    g.node_count = n;
    return g;
}

void canonicalize_edges(SpatialGraph& g) {
    for (auto& e : g.edges)
        if (e.first > e.second) std::swap(e.first, e.second);
    std::sort(g.edges.begin(), g.edges.end());
}

std::string validate_graph(const SpatialGraph& g) {
    if (g.coords == SpatialGraph::Coords::planar && g.planar.size() != g.node_count)
        return "position count does not match node count";
    if (g.coords == SpatialGraph::Coords::geographic && g.geo.size() != g.node_count)
        return "position count does not match node count";
    std::vector<Edge> canon = g.edges;
    for (auto& e : canon) {
        if (e.first >= g.node_count || e.second >= g.node_count)
            return "edge endpoint out of range";
        if (e.first == e.second) return "self loop";
        if (e.first > e.second) std::swap(e.first, e.second);
    }
    std::sort(canon.begin(), canon.end());
    if (std::adjacent_find(canon.begin(), canon.end()) != canon.end())
        return "duplicate edge";
    return {};
}

Adjacency build_adjacency(const SpatialGraph& g) {
    Adjacency adj;
    adj.offsets.assign(g.node_count + 1, 0);
    for (const auto& [u, v] : g.edges) {
        ++adj.offsets[u + 1];
        ++adj.offsets[v + 1];
    }
    for (std::size_t i = 1; i < adj.offsets.size(); ++i)
        adj.offsets[i] += adj.offsets[i - 1];
    adj.neighbors.resize(2 * g.edges.size());
    std::vector<std::uint32_t> cursor(adj.offsets.begin(), adj.offsets.end() - 1);
    for (const auto& [u, v] : g.edges) {
        adj.neighbors[cursor[u]++] = v;
        adj.neighbors[cursor[v]++] = u;
    }
    for (NodeIndex v = 0; v < g.node_count; ++v)
        std::sort(adj.neighbors.begin() + adj.offsets[v], adj.neighbors.begin() + adj.offsets[v + 1]);
    return adj;
}

namespace {

void append_double(std::string& out, double value) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, value);
    out.append(buf, res.ptr);
}

void append_uint(std::string& out, std::uint64_t value) {
    char buf[24];
    auto res = std::to_chars(buf, buf + sizeof buf, value);
    out.append(buf, res.ptr);
}

void write_file(const std::filesystem::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw GraphIoError("cannot open for writing: " + file.string());
    out << text;
    if (!out) throw GraphIoError("write failed: " + file.string());
}

[[noreturn]] void parse_fail(const std::filesystem::path& file, std::size_t line,
                             const std::string& what) {
    throw GraphIoError(file.string() + ":" + std::to_string(line) + ": " + what);
}

// Parses "# key=value key=value ..." headers.
bool parse_header(const std::string& line, std::vector<std::pair<std::string, std::string>>& kv) {
    if (line.empty() || line[0] != '#') return false;
    kv.clear();
    std::istringstream ss(line.substr(1));
    std::string tok;
    while (ss >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) return false;
        kv.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
    }
    return true;
}

const char* skip_blank(const char* p, const char* end) {
    while (p != end && (*p == ' ' || *p == '\t')) ++p;
    return p;
}

}  // namespace

void save_edges(const SpatialGraph& g, const std::filesystem::path& file) {
    SpatialGraph canon = g;
    canonicalize_edges(canon);
    std::string text;
    text.reserve(24 * canon.edges.size() + 64);
    text += "# nodes=";
    append_uint(text, canon.node_count);
    text += " edges=";
    append_uint(text, canon.edges.size());
    text += " layer=" + canon.layer + "\n";
    for (const auto& [u, v] : canon.edges) {
        append_uint(text, u);
        text += '\t';
        append_uint(text, v);
        text += '\n';
    }
    write_file(file, text);
}

void save_positions(const SpatialGraph& g, const std::filesystem::path& file) {
    if (g.coords == SpatialGraph::Coords::none)
        throw GraphIoError("save_positions: graph has no coordinates");
    std::string text;
    text.reserve(48 * g.node_count + 64);
    text += "# nodes=";
    append_uint(text, g.node_count);
    text += " coords=";
    text += g.coords == SpatialGraph::Coords::planar ? "planar" : "geographic";
    text += '\n';
    for (std::size_t i = 0; i < g.node_count; ++i) {
        append_uint(text, i);
        text += '\t';
        if (g.coords == SpatialGraph::Coords::planar) {
            append_double(text, g.planar[i].x);
            text += '\t';
            append_double(text, g.planar[i].y);
        } else {
            append_double(text, g.geo[i].latitude);
            text += '\t';
            append_double(text, g.geo[i].longitude);
        }
        text += '\n';
    }
    write_file(file, text);
}

SpatialGraph load_graph(const std::filesystem::path& edges_file,
                        const std::filesystem::path& positions_file) {
    std::ifstream in(edges_file);
    if (!in) throw GraphIoError("cannot open: " + edges_file.string());

    SpatialGraph g;
    std::string line;
    std::size_t lineno = 0;
    bool have_nodes = false;
    std::size_t declared_edges = 0;
    bool have_edge_count = false;
    std::vector<std::pair<std::string, std::string>> kv;

    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (!parse_header(line, kv)) parse_fail(edges_file, lineno, "malformed header");
            for (const auto& [key, value] : kv) {
                if (key == "nodes") {
                    std::uint64_t n = 0;
                    auto res = std::from_chars(value.data(), value.data() + value.size(), n);
                    if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
                        parse_fail(edges_file, lineno, "bad nodes count '" + value + "'");
                    g.node_count = n;
                    have_nodes = true;
                } else if (key == "edges") {
                    auto res = std::from_chars(value.data(), value.data() + value.size(), declared_edges);
                    if (res.ec != std::errc{})
                        parse_fail(edges_file, lineno, "bad edge count '" + value + "'");
                    have_edge_count = true;
                } else if (key == "layer") {
                    g.layer = value;
                }
            }
            continue;
        }
        if (!have_nodes) parse_fail(edges_file, lineno, "edge before '# nodes=' header");
        const char* p = line.data();
        const char* end = line.data() + line.size();
        std::uint32_t u = 0, v = 0;
        auto r1 = std::from_chars(p, end, u);
        if (r1.ec != std::errc{}) parse_fail(edges_file, lineno, "expected node index");
        p = skip_blank(r1.ptr, end);
        if (p == r1.ptr) parse_fail(edges_file, lineno, "expected separator after first index");
        auto r2 = std::from_chars(p, end, v);
        if (r2.ec != std::errc{}) parse_fail(edges_file, lineno, "expected second node index");
        if (skip_blank(r2.ptr, end) != end) parse_fail(edges_file, lineno, "trailing characters");
        if (u >= g.node_count || v >= g.node_count)
            parse_fail(edges_file, lineno, "edge endpoint out of range");
        if (u == v) parse_fail(edges_file, lineno, "self loop");
        g.edges.emplace_back(u, v);
    }
    if (!have_nodes) throw GraphIoError(edges_file.string() + ": missing '# nodes=' header");
    if (have_edge_count && declared_edges != g.edges.size())
        throw GraphIoError(edges_file.string() + ": header declares " +
                           std::to_string(declared_edges) + " edges, file has " +
                           std::to_string(g.edges.size()));
    canonicalize_edges(g);
    if (std::adjacent_find(g.edges.begin(), g.edges.end()) != g.edges.end())
        throw GraphIoError(edges_file.string() + ": duplicate edge");

    if (!positions_file.empty()) {
        std::ifstream pin(positions_file);
        if (!pin) throw GraphIoError("cannot open: " + positions_file.string());
        lineno = 0;
        bool planar = true;
        bool have_coords = false;
        std::size_t row = 0;
        while (std::getline(pin, line)) {
            ++lineno;
            if (line.empty()) continue;
            if (line[0] == '#') {
                if (!parse_header(line, kv)) parse_fail(positions_file, lineno, "malformed header");
                for (const auto& [key, value] : kv) {
                    if (key == "coords") {
                        if (value == "planar") planar = true;
                        else if (value == "geographic") planar = false;
                        else parse_fail(positions_file, lineno, "unknown coords '" + value + "'");
                        have_coords = true;
                    } else if (key == "nodes") {
                        std::uint64_t n = 0;
                        std::from_chars(value.data(), value.data() + value.size(), n);
                        if (n != g.node_count)
                            parse_fail(positions_file, lineno, "node count differs from edge file");
                    }
                }
                continue;
            }
            if (!have_coords) parse_fail(positions_file, lineno, "row before '# coords=' header");
            const char* p = line.data();
            const char* end = line.data() + line.size();
            std::uint64_t id = 0;
            double a = 0, b = 0;
            auto r0 = std::from_chars(p, end, id);
            if (r0.ec != std::errc{}) parse_fail(positions_file, lineno, "expected node id");
            p = skip_blank(r0.ptr, end);
            auto r1 = std::from_chars(p, end, a);
            if (r1.ec != std::errc{}) parse_fail(positions_file, lineno, "expected coordinate");
            p = skip_blank(r1.ptr, end);
            auto r2 = std::from_chars(p, end, b);
            if (r2.ec != std::errc{}) parse_fail(positions_file, lineno, "expected coordinate");
            if (skip_blank(r2.ptr, end) != end) parse_fail(positions_file, lineno, "trailing characters");
            if (id != row) parse_fail(positions_file, lineno, "node ids must be consecutive from 0");
            if (planar) {
                g.planar.push_back({a, b});
            } else {
                GeoPoint pt{a, b};
                if (!geo_in_bounds(pt)) parse_fail(positions_file, lineno, "coordinates out of range");
                g.geo.push_back(pt);
            }
            ++row;
        }
        if (row != g.node_count)
            throw GraphIoError(positions_file.string() + ": expected " +
                               std::to_string(g.node_count) + " rows, found " + std::to_string(row));
        g.coords = planar ? SpatialGraph::Coords::planar : SpatialGraph::Coords::geographic;
    }
    return g;
}

}  // namespace qnet
