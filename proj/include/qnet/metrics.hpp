#pragma once

#include <map>
#include <optional>
#include <string>

#include "qnet/graph.hpp"

namespace qnet {

struct GiantComponent {
    std::vector<NodeIndex> nodes;  // ascending
    double fraction = 0.0;         // |nodes| / node_count
};

// Largest connected component; among equal sizes, the one containing the
// smallest node index. Isolated nodes are size-1 components.
GiantComponent giant_component(const SpatialGraph& g);
GiantComponent giant_component(const Adjacency& adj);

struct PathLengthOptions {
    // Above this many giant-component nodes the all-sources sweep switches to
    // a sampled estimate.
    std::size_t exact_threshold = 20000;
    std::size_t sources = 1024;
    std::uint64_t sample_seed = 0;
};

struct PathLength {
    double mean = 0.0;
    std::optional<double> standard_error;  // set only when sampled
    bool sampled = false;
};

// Mean hop distance over ordered pairs of distinct giant-component nodes,
// (1/(Ng*(Ng-1))) * sum_{i != j} d_ij. Empty when the giant component has
// fewer than two nodes.
std::optional<PathLength> avg_shortest_path(const SpatialGraph& g,
                                            const PathLengthOptions& opt = {});
std::optional<PathLength> avg_shortest_path(const Adjacency& adj, const GiantComponent& giant,
                                            const PathLengthOptions& opt = {});

// Mean over all nodes of C_i = 2 L_i / (k_i (k_i - 1)), with C_i = 0 for
// degree < 2. L_i counts edges among the neighbors of i.
double avg_clustering(const SpatialGraph& g);

// Mean C_i per occurring degree; degrees 0 and 1 map to 0.
std::map<int, double> clustering_by_degree(const SpatialGraph& g);

// Degree assortativity: Pearson correlation over the 2E ordered endpoint
// degree pairs. Empty when the endpoint degrees have zero variance (this is
// reported as undefined, never coerced to a number).
std::optional<double> assortativity(const SpatialGraph& g);

// Mean neighbor degree as a function of degree; isolated nodes excluded.
std::map<int, double> knn_by_degree(const SpatialGraph& g);

// P(k) over all nodes, including isolated ones; sums to one for n > 0.
std::map<int, double> degree_histogram(const SpatialGraph& g);

struct ReportOptions {
    bool path_length = true;
    PathLengthOptions path;
    bool histograms = true;
};

struct MetricsReport {
    std::size_t node_count = 0;
    std::size_t edge_count = 0;
    double giant_fraction = 0.0;
    std::optional<double> avg_shortest_path;
    std::optional<double> avg_shortest_path_stderr;
    bool path_sampled = false;
    double avg_clustering = 0.0;
    std::optional<double> assortativity;
    double edges_per_node = 0.0;
    std::map<int, double> degree_histogram;
    std::map<int, std::size_t> degree_counts;
    std::map<int, double> clustering_by_degree;
    std::map<int, double> knn_by_degree;
};

// One pass over the graph computing everything above; path length obeys the
// exact/sampled switch in the options.
MetricsReport full_report(const SpatialGraph& g, const ReportOptions& opt = {});

// JSON object with scalar fields at the top level; metrics that are undefined
// for the graph carry the literal string "undefined".
std::string report_to_json(const MetricsReport& r);

// CSV companion: one header plus one row, same undefined convention.
extern const char* const kReportCsvHeader;
std::string report_csv_row(const MetricsReport& r);

}  // namespace qnet
