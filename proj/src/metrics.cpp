#include "qnet/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "qnet/rng.hpp"
#include "json.hpp"

namespace qnet {

GiantComponent giant_component(const SpatialGraph& g) {
    return giant_component(build_adjacency(g));
}

GiantComponent giant_component(const Adjacency& adj) {
    const std::size_t n = adj.node_count();
    GiantComponent best;
    if (n == 0) return best;

    std::vector<char> visited(n, 0);
    std::vector<NodeIndex> queue, current;
    // Scanning nodes in ascending order makes the first component found among
    // equal sizes the one with the smallest member index.
    for (NodeIndex start = 0; start < n; ++start) {
        if (visited[start]) continue;
        current.clear();
        queue.clear();
        queue.push_back(start);
        visited[start] = 1;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const NodeIndex v = queue[head];
            current.push_back(v);
            for (const NodeIndex* it = adj.begin(v); it != adj.end(v); ++it)
                if (!visited[*it]) {
                    visited[*it] = 1;
                    queue.push_back(*it);
                }
        }
        if (current.size() > best.nodes.size()) best.nodes = current;
    }
    std::sort(best.nodes.begin(), best.nodes.end());
    best.fraction = static_cast<double>(best.nodes.size()) / static_cast<double>(n);
    return best;
}

namespace {

// Epoch-stamped BFS workspace; avoids clearing distance arrays between
// sources.
struct BfsScratch {
    std::vector<std::uint32_t> epoch;
    std::vector<std::uint32_t> dist;
    std::vector<NodeIndex> queue;
    std::uint32_t current = 0;

    explicit BfsScratch(std::size_t n) : epoch(n, 0), dist(n, 0) { queue.reserve(n); }

    // Sum of hop distances from source to every reachable node.
    std::uint64_t sweep(const Adjacency& adj, NodeIndex source) {
        ++current;
        queue.clear();
        queue.push_back(source);
        epoch[source] = current;
        dist[source] = 0;
        std::uint64_t sum = 0;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const NodeIndex v = queue[head];
            const std::uint32_t dv = dist[v];
            sum += dv;
            for (const NodeIndex* it = adj.begin(v); it != adj.end(v); ++it)
                if (epoch[*it] != current) {
                    epoch[*it] = current;
                    dist[*it] = dv + 1;
                    queue.push_back(*it);
                }
        }
        return sum;
    }
};

}  // namespace

std::optional<PathLength> avg_shortest_path(const SpatialGraph& g, const PathLengthOptions& opt) {
    const Adjacency adj = build_adjacency(g);
    return avg_shortest_path(adj, giant_component(adj), opt);
}

std::optional<PathLength> avg_shortest_path(const Adjacency& adj, const GiantComponent& giant,
                                            const PathLengthOptions& opt) {
    const std::size_t ng = giant.nodes.size();
    if (ng < 2) return std::nullopt;

    BfsScratch scratch(adj.node_count());
    PathLength out;
    if (ng <= opt.exact_threshold || opt.sources >= ng) {
        std::uint64_t total = 0;
        for (const NodeIndex s : giant.nodes) total += scratch.sweep(adj, s);
        out.mean = static_cast<double>(total) /
                   (static_cast<double>(ng) * static_cast<double>(ng - 1));
        return out;
    }

    // Sampled estimate: per-source means over s sources drawn without
    // replacement; the spread of those means gives the standard error.
    std::vector<NodeIndex> pool = giant.nodes;
    RngStream rng(opt.sample_seed, 0);
    const std::size_t s = opt.sources;
    for (std::size_t i = 0; i < s; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    double mean = 0.0;
    std::vector<double> source_means(s);
    for (std::size_t i = 0; i < s; ++i) {
        const double m =
            static_cast<double>(scratch.sweep(adj, pool[i])) / static_cast<double>(ng - 1);
        source_means[i] = m;
        mean += m;
    }
    mean /= static_cast<double>(s);
    double var = 0.0;
    for (const double m : source_means) var += (m - mean) * (m - mean);
    var /= static_cast<double>(s - 1);
    out.mean = mean;
    out.standard_error = std::sqrt(var / static_cast<double>(s));
    out.sampled = true;
    return out;
}

namespace {

// Per-node closed-pair counts: counts[i] = k_i (k_i - 1) C_i, i.e. twice the
// number of triangles through i.
std::vector<std::uint64_t> closed_pair_counts(const Adjacency& adj) {
    const std::size_t n = adj.node_count();
    std::vector<std::uint64_t> counts(n, 0);
    std::vector<std::uint32_t> mark(n, 0);
    std::uint32_t epoch = 0;
    for (NodeIndex i = 0; i < n; ++i) {
        if (adj.degree(i) < 2) continue;
        ++epoch;
        for (const NodeIndex* it = adj.begin(i); it != adj.end(i); ++it) mark[*it] = epoch;
        std::uint64_t c = 0;
        for (const NodeIndex* it = adj.begin(i); it != adj.end(i); ++it)
            for (const NodeIndex* jt = adj.begin(*it); jt != adj.end(*it); ++jt)
                if (mark[*jt] == epoch) ++c;
        counts[i] = c;  // ordered neighbor pairs, already 2 * L_i
    }
    return counts;
}

double node_clustering(const Adjacency& adj, const std::vector<std::uint64_t>& counts,
                       NodeIndex i) {
    const std::size_t k = adj.degree(i);
    if (k < 2) return 0.0;
    return static_cast<double>(counts[i]) / (static_cast<double>(k) * static_cast<double>(k - 1));
}

}  // namespace

double avg_clustering(const SpatialGraph& g) {
    const Adjacency adj = build_adjacency(g);
    const std::size_t n = adj.node_count();
    if (n == 0) return 0.0;
    const auto counts = closed_pair_counts(adj);
    double sum = 0.0;
    for (NodeIndex i = 0; i < n; ++i) sum += node_clustering(adj, counts, i);
    return sum / static_cast<double>(n);
}

std::map<int, double> clustering_by_degree(const SpatialGraph& g) {
    const Adjacency adj = build_adjacency(g);
    const auto counts = closed_pair_counts(adj);
    std::map<int, double> sum;
    std::map<int, std::size_t> num;
    for (NodeIndex i = 0; i < adj.node_count(); ++i) {
        const int k = static_cast<int>(adj.degree(i));
        sum[k] += node_clustering(adj, counts, i);
        ++num[k];
    }
    std::map<int, double> out;
    for (const auto& [k, s] : sum) out[k] = s / static_cast<double>(num[k]);
    return out;
}

std::optional<double> assortativity(const SpatialGraph& g) {
    if (g.edges.empty()) return std::nullopt;
    const Adjacency adj = build_adjacency(g);
    // Pearson over the 2E ordered endpoint pairs; both orientations, so the
    // two marginals coincide.
    const double n = 2.0 * static_cast<double>(g.edges.size());
    double sum = 0.0;
    for (const auto& [u, v] : g.edges)
        sum += static_cast<double>(adj.degree(u)) + static_cast<double>(adj.degree(v));
    const double mu = sum / n;
    double var = 0.0, cov = 0.0;
    for (const auto& [u, v] : g.edges) {
        const double du = static_cast<double>(adj.degree(u)) - mu;
        const double dv = static_cast<double>(adj.degree(v)) - mu;
        var += du * du + dv * dv;
        cov += 2.0 * du * dv;
    }
    if (!(var > 0.0)) return std::nullopt;
    return cov / var;
}

std::map<int, double> knn_by_degree(const SpatialGraph& g) {
    const Adjacency adj = build_adjacency(g);
    std::map<int, double> sum;
    std::map<int, std::size_t> num;
    for (NodeIndex i = 0; i < adj.node_count(); ++i) {
        const std::size_t k = adj.degree(i);
        if (k == 0) continue;
        double acc = 0.0;
        for (const NodeIndex* it = adj.begin(i); it != adj.end(i); ++it)
            acc += static_cast<double>(adj.degree(*it));
        sum[static_cast<int>(k)] += acc / static_cast<double>(k);
        ++num[static_cast<int>(k)];
    }
    std::map<int, double> out;
    for (const auto& [k, s] : sum) out[k] = s / static_cast<double>(num[k]);
    return out;
}

std::map<int, double> degree_histogram(const SpatialGraph& g) {
    const Adjacency adj = build_adjacency(g);
    std::map<int, std::size_t> counts;
    for (NodeIndex i = 0; i < adj.node_count(); ++i) ++counts[static_cast<int>(adj.degree(i))];
    std::map<int, double> out;
    for (const auto& [k, c] : counts)
        out[k] = static_cast<double>(c) / static_cast<double>(adj.node_count());
    return out;
}

MetricsReport full_report(const SpatialGraph& g, const ReportOptions& opt) {
    MetricsReport r;
    r.node_count = g.node_count;
    r.edge_count = g.edges.size();
    if (g.node_count == 0) return r;

    const Adjacency adj = build_adjacency(g);
    const GiantComponent giant = giant_component(adj);
    r.giant_fraction = giant.fraction;
    r.edges_per_node = static_cast<double>(r.edge_count) / static_cast<double>(r.node_count);

    if (opt.path_length) {
        if (const auto pl = avg_shortest_path(adj, giant, opt.path)) {
            r.avg_shortest_path = pl->mean;
            r.avg_shortest_path_stderr = pl->standard_error;
            r.path_sampled = pl->sampled;
        }
    }

    const auto counts = closed_pair_counts(adj);
    double csum = 0.0;
    std::map<int, double> cs;
    std::map<int, double> ks;
    for (NodeIndex i = 0; i < adj.node_count(); ++i) {
        const int k = static_cast<int>(adj.degree(i));
        const double ci = node_clustering(adj, counts, i);
        csum += ci;
        ++r.degree_counts[k];
        cs[k] += ci;
        if (k > 0) {
            double acc = 0.0;
            for (const NodeIndex* it = adj.begin(i); it != adj.end(i); ++it)
                acc += static_cast<double>(adj.degree(*it));
            ks[k] += acc / static_cast<double>(k);
        }
    }
    r.avg_clustering = csum / static_cast<double>(r.node_count);
    r.assortativity = assortativity(g);

    if (opt.histograms) {
        for (const auto& [k, c] : r.degree_counts) {
            r.degree_histogram[k] =
                static_cast<double>(c) / static_cast<double>(r.node_count);
            r.clustering_by_degree[k] = cs[k] / static_cast<double>(c);
            if (k > 0) r.knn_by_degree[k] = ks[k] / static_cast<double>(c);
        }
    }
    return r;
}

namespace {

nlohmann::json opt_json(const std::optional<double>& v) {
    if (!v) return "undefined";
    return *v;
}

nlohmann::json map_pairs(const std::map<int, double>& m) {
    auto arr = nlohmann::json::array();
    for (const auto& [k, v] : m) arr.push_back({k, v});
    return arr;
}

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

std::string report_to_json(const MetricsReport& r) {
    nlohmann::json j;
    j["nodes"] = r.node_count;
    j["edges"] = r.edge_count;
    j["giant_fraction"] = r.giant_fraction;
    j["avg_shortest_path"] = opt_json(r.avg_shortest_path);
    j["avg_shortest_path_stderr"] = opt_json(r.avg_shortest_path_stderr);
    j["path_sampled"] = r.path_sampled;
    j["avg_clustering"] = r.avg_clustering;
    j["assortativity"] = opt_json(r.assortativity);
    j["edges_per_node"] = r.edges_per_node;
    j["degree_histogram"] = map_pairs(r.degree_histogram);
    j["clustering_by_degree"] = map_pairs(r.clustering_by_degree);
    j["knn_by_degree"] = map_pairs(r.knn_by_degree);
    auto counts = nlohmann::json::array();
    for (const auto& [k, c] : r.degree_counts) counts.push_back({k, c});
    j["degree_counts"] = counts;
    return j.dump(2) + "\n";
}

const char* const kReportCsvHeader =
    "nodes,edges,giant_fraction,avg_shortest_path,avg_shortest_path_stderr,"
    "path_sampled,avg_clustering,assortativity,edges_per_node";

std::string report_csv_row(const MetricsReport& r) {
    std::string row = std::to_string(r.node_count) + ',' + std::to_string(r.edge_count) + ',';
    row += format_double(r.giant_fraction) + ',';
    row += (r.avg_shortest_path ? format_double(*r.avg_shortest_path) : "undefined");
    row += ',';
    row += (r.avg_shortest_path_stderr ? format_double(*r.avg_shortest_path_stderr) : "undefined");
    row += ',';
    row += r.path_sampled ? "1" : "0";
    row += ',';
    row += format_double(r.avg_clustering) + ',';
    row += (r.assortativity ? format_double(*r.assortativity) : "undefined");
    row += ',';
    row += format_double(r.edges_per_node);
    return row;
}

}  // namespace qnet
