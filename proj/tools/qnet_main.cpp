// Command line front end: generate networks, sample overlays, compute
// metrics, scan densities, fit functional forms, ingest ITDK data, and
// compare real topologies against the models.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 input data error,
// 3 fit did not converge.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qnet/experiments.hpp"
#include "qnet/fiber_models.hpp"
#include "qnet/fits.hpp"
#include "qnet/graph.hpp"
#include "qnet/itdk.hpp"
#include "qnet/manifest.hpp"
#include "qnet/metrics.hpp"
#include "qnet/photonic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qnet;

namespace {

[[noreturn]] void config_fail(const std::string& message) {
    throw std::invalid_argument("config: " + message);
}

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string to_hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return std::string("0x") + buf;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw GraphIoError(path.string() + ": cannot open for writing");
    out << text;
    if (!out) throw GraphIoError(path.string() + ": write failed");
}

// ---------------------------------------------------------------------------
// Configuration files
// ---------------------------------------------------------------------------

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) config_fail("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        config_fail(path + ": " + e.what());
    }
}

void check_keys(const json& obj, const std::string& prefix,
                std::initializer_list<std::string_view> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            config_fail("unknown key \"" + (prefix.empty() ? it.key() : prefix + "." + it.key()) +
                        '"');
    }
}

double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) config_fail(path + ": expected a number");
    return v.get<double>();
}

std::uint64_t as_uint(const json& v, const std::string& path) {
    if (!v.is_number_unsigned()) config_fail(path + ": expected a non-negative integer");
    return v.get<std::uint64_t>();
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) config_fail(path + ": expected a string");
    return v.get<std::string>();
}

// Strict parse: every key must be known, every value well typed. Errors name
// the offending field by its dotted path.
ModelConfig parse_model_config(const json& j) {
    if (!j.is_object()) config_fail("expected a JSON object");
    check_keys(j, "",
               {"model", "n", "rho", "radius_km", "waxman", "soares", "rozenfeld", "photonic",
                "seed"});
    ModelConfig c;
    const auto it_model = j.find("model");
    if (it_model == j.end()) config_fail("missing required key \"model\"");
    const std::string name = as_string(*it_model, "model");
    const auto kind = model_kind_from_string(name);
    if (!kind)
        config_fail("model: \"" + name +
                    "\" is not one of brito, brito-soares, brito-rozenfeld");
    c.kind = *kind;
    if (const auto it = j.find("n"); it != j.end()) c.n = as_uint(*it, "n");
    if (const auto it = j.find("rho"); it != j.end()) c.rho = as_number(*it, "rho");
    if (const auto it = j.find("radius_km"); it != j.end())
        c.radius_km = as_number(*it, "radius_km");
    if (const auto it = j.find("waxman"); it != j.end()) {
        check_keys(*it, "waxman", {"beta", "alpha_l_km"});
        if (const auto f = it->find("beta"); f != it->end())
            c.waxman.beta = as_number(*f, "waxman.beta");
        if (const auto f = it->find("alpha_l_km"); f != it->end())
            c.waxman.alpha_l_km = as_number(*f, "waxman.alpha_l_km");
    }
    if (const auto it = j.find("soares"); it != j.end()) {
        check_keys(*it, "soares", {"m", "alpha_a"});
        if (const auto f = it->find("m"); f != it->end())
            c.soares.m = as_uint(*f, "soares.m");
        if (const auto f = it->find("alpha_a"); f != it->end())
            c.soares.alpha_a = as_number(*f, "soares.alpha_a");
    }
    if (const auto it = j.find("rozenfeld"); it != j.end()) {
        check_keys(*it, "rozenfeld",
                   {"lambda", "min_degree", "max_degree", "radius_scale_km", "support"});
        if (const auto f = it->find("lambda"); f != it->end())
            c.rozenfeld.lambda = as_number(*f, "rozenfeld.lambda");
        if (const auto f = it->find("min_degree"); f != it->end())
            c.rozenfeld.min_degree = as_uint(*f, "rozenfeld.min_degree");
        if (const auto f = it->find("max_degree"); f != it->end())
            c.rozenfeld.max_degree = as_uint(*f, "rozenfeld.max_degree");
        if (const auto f = it->find("radius_scale_km"); f != it->end())
            c.rozenfeld.radius_scale_km = as_number(*f, "rozenfeld.radius_scale_km");
        if (const auto f = it->find("support"); f != it->end()) {
            const std::string s = as_string(*f, "rozenfeld.support");
            if (s == "inclusive")
                c.rozenfeld.inclusive_support = true;
            else if (s == "exclusive")
                c.rozenfeld.inclusive_support = false;
            else
                config_fail("rozenfeld.support: expected \"inclusive\" or \"exclusive\"");
        }
    }
    if (const auto it = j.find("photonic"); it != j.end()) {
        check_keys(*it, "photonic", {"gamma_db_per_km", "photons_per_attempt"});
        if (const auto f = it->find("gamma_db_per_km"); f != it->end())
            c.photonic.gamma_db_per_km = as_number(*f, "photonic.gamma_db_per_km");
        if (const auto f = it->find("photons_per_attempt"); f != it->end())
            c.photonic.photons_per_attempt = as_uint(*f, "photonic.photons_per_attempt");
    }
    if (const auto it = j.find("seed"); it != j.end()) c.seed = as_uint(*it, "seed");
    return c;
}

json config_to_json(const ModelConfig& c) {
    json j;
    j["model"] = to_string(c.kind);
    j["n"] = c.n;
    if (c.rho) j["rho"] = *c.rho;
    if (c.radius_km) j["radius_km"] = *c.radius_km;
    j["waxman"] = {{"beta", c.waxman.beta}, {"alpha_l_km", c.waxman.alpha_l_km}};
    j["soares"] = {{"m", c.soares.m}, {"alpha_a", c.soares.alpha_a}};
    j["rozenfeld"] = {{"lambda", c.rozenfeld.lambda},
                      {"min_degree", c.rozenfeld.min_degree},
                      {"max_degree", c.rozenfeld.max_degree},
                      {"radius_scale_km", c.rozenfeld.radius_scale_km},
                      {"support", c.rozenfeld.inclusive_support ? "inclusive" : "exclusive"}};
    j["photonic"] = {{"gamma_db_per_km", c.photonic.gamma_db_per_km},
                     {"photons_per_attempt", c.photonic.photons_per_attempt}};
    j["seed"] = c.seed;
    return j;
}

// ---------------------------------------------------------------------------
// Seeds: command line flag beats QNET_SEED beats the config file value.
// ---------------------------------------------------------------------------

std::optional<std::uint64_t> env_seed() {
    const char* s = std::getenv("QNET_SEED");
    if (!s || !*s) return std::nullopt;
    std::uint64_t v = 0;
    const char* end = s + std::strlen(s);
    const auto res = std::from_chars(s, end, v);
    if (res.ec != std::errc{} || res.ptr != end)
        throw std::invalid_argument("QNET_SEED: not a valid unsigned integer");
    return v;
}

std::uint64_t resolve_seed(const CLI::Option* flag, std::uint64_t flag_value,
                           std::uint64_t fallback) {
    if (flag && flag->count() > 0) return flag_value;
    if (const auto e = env_seed()) return *e;
    return fallback;
}

// ---------------------------------------------------------------------------
// Shared model options
// ---------------------------------------------------------------------------

struct ModelOpts {
    std::string config_path;
    std::string model;
    std::uint64_t n = 0;
    double rho = 0.0;
    double radius = 0.0;
    std::uint64_t seed = 0;
    CLI::Option* model_opt = nullptr;
    CLI::Option* n_opt = nullptr;
    CLI::Option* rho_opt = nullptr;
    CLI::Option* radius_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
};

void add_model_opts(CLI::App* sub, ModelOpts& o) {
    sub->add_option("--config", o.config_path, "Model configuration JSON file");
    o.model_opt =
        sub->add_option("--model", o.model, "Model: brito, brito-soares, brito-rozenfeld");
    o.n_opt = sub->add_option("--n", o.n, "Node count");
    o.rho_opt = sub->add_option("--rho", o.rho, "Node density in nodes per km^2");
    o.radius_opt = sub->add_option("--radius-km", o.radius, "Disk radius in km");
    o.seed_opt = sub->add_option("--seed", o.seed, "Master seed (beats QNET_SEED and config)");
}

ModelConfig resolve_model(const ModelOpts& o) {
    ModelConfig c;
    bool have_model = false;
    if (!o.config_path.empty()) {
        c = parse_model_config(load_config_file(o.config_path));
        have_model = true;
    }
    if (o.model_opt->count() > 0) {
        const auto kind = model_kind_from_string(o.model);
        if (!kind)
            throw std::invalid_argument("--model: \"" + o.model +
                                        "\" is not one of brito, brito-soares, brito-rozenfeld");
        c.kind = *kind;
        have_model = true;
    }
    if (!have_model) throw std::invalid_argument("need --config or --model");
    if (o.n_opt->count() > 0) c.n = o.n;
    // A flag-supplied geometry replaces whatever the file pinned.
    if (o.rho_opt->count() > 0 && o.radius_opt->count() > 0) {
        c.rho = o.rho;
        c.radius_km = o.radius;
    } else if (o.rho_opt->count() > 0) {
        c.rho = o.rho;
        c.radius_km.reset();
    } else if (o.radius_opt->count() > 0) {
        c.radius_km = o.radius;
        c.rho.reset();
    }
    c.seed = resolve_seed(o.seed_opt, o.seed, c.seed);
    return c;
}

// ---------------------------------------------------------------------------
// Histogram exports
// ---------------------------------------------------------------------------

std::string histogram_csv(const std::map<int, std::size_t>& counts,
                          const std::map<int, double>& probability) {
    std::string csv = "k,count,probability\n";
    for (const auto& [k, c] : counts) {
        csv += std::to_string(k) + ',' + std::to_string(c) + ',';
        const auto p = probability.find(k);
        csv += format_double(p == probability.end() ? 0.0 : p->second);
        csv += '\n';
    }
    return csv;
}

std::string by_degree_csv(const std::map<int, double>& values, const char* column) {
    std::string csv = std::string("k,") + column + '\n';
    for (const auto& [k, v] : values) csv += std::to_string(k) + ',' + format_double(v) + '\n';
    return csv;
}

// Geometric binning of a per-degree table over k >= 1. Probability columns
// become densities (bin mass over bin width); value columns become
// count-weighted bin means.
struct LogBinRow {
    double lo = 0.0, hi = 0.0, center = 0.0;
    double count = 0.0;
    double value = 0.0;
    bool has_value = false;
};

std::vector<LogBinRow> log_bin(const std::map<int, std::size_t>& counts,
                               const std::map<int, double>* values, std::size_t bins) {
    std::vector<LogBinRow> rows;
    int k_min = 0, k_max = 0;
    for (const auto& [k, c] : counts) {
        if (k < 1 || c == 0) continue;
        if (k_min == 0) k_min = k;
        k_max = k;
    }
    if (k_min == 0) return rows;
    if (k_max == k_min) bins = 1;
    const double ratio =
        std::pow(static_cast<double>(k_max + 1) / k_min, 1.0 / static_cast<double>(bins));
    rows.resize(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        rows[b].lo = k_min * std::pow(ratio, static_cast<double>(b));
        rows[b].hi = k_min * std::pow(ratio, static_cast<double>(b + 1));
        rows[b].center = std::sqrt(rows[b].lo * rows[b].hi);
    }
    std::vector<double> weighted(bins, 0.0);
    for (const auto& [k, c] : counts) {
        if (k < 1 || c == 0) continue;
        auto b = static_cast<std::size_t>(std::log(static_cast<double>(k) / k_min) /
                                          std::log(ratio));
        if (b >= bins) b = bins - 1;
        rows[b].count += static_cast<double>(c);
        if (values) {
            const auto v = values->find(k);
            if (v != values->end()) {
                weighted[b] += v->second * static_cast<double>(c);
                rows[b].has_value = true;
            }
        }
    }
    for (std::size_t b = 0; b < bins; ++b)
        if (rows[b].has_value) rows[b].value = weighted[b] / rows[b].count;
    rows.erase(std::remove_if(rows.begin(), rows.end(),
                              [](const LogBinRow& r) { return r.count == 0.0; }),
               rows.end());
    return rows;
}

std::string binned_histogram_csv(const std::map<int, std::size_t>& counts,
                                 std::size_t total_nodes, std::size_t bins) {
    std::string csv = "k_lo,k_hi,k_center,count,probability_density\n";
    for (const auto& r : log_bin(counts, nullptr, bins)) {
        const double density = r.count / static_cast<double>(total_nodes) / (r.hi - r.lo);
        csv += format_double(r.lo) + ',' + format_double(r.hi) + ',' + format_double(r.center) +
               ',' + format_double(r.count) + ',' + format_double(density) + '\n';
    }
    return csv;
}

std::string binned_by_degree_csv(const std::map<int, std::size_t>& counts,
                                 const std::map<int, double>& values, const char* column,
                                 std::size_t bins) {
    std::string csv = std::string("k_lo,k_hi,k_center,") + column + '\n';
    for (const auto& r : log_bin(counts, &values, bins)) {
        if (!r.has_value) continue;
        csv += format_double(r.lo) + ',' + format_double(r.hi) + ',' + format_double(r.center) +
               ',' + format_double(r.value) + '\n';
    }
    return csv;
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

struct GenerateOpts {
    ModelOpts model;
    std::string out_dir;
    std::uint64_t stream = 0;
};

int cmd_generate(const GenerateOpts& o) {
    ModelConfig config = resolve_model(o.model);
    validate_config(config);

    RunManifest manifest;
    manifest.command = "generate";
    manifest.config = {{"model", config_to_json(config)}, {"stream", o.stream}};
    manifest.master_seed = config.seed;
    manifest.outputs = {"positions.tsv", "fiber_edges.tsv"};
    write_manifest(o.out_dir, manifest);

    const SpatialGraph g = generate_sample(config, o.stream, Layer::fiber);
    save_positions(g, fs::path(o.out_dir) / "positions.tsv");
    save_edges(g, fs::path(o.out_dir) / "fiber_edges.tsv");
    std::cout << "generate: model=" << to_string(config.kind) << " n=" << g.node_count
              << " edges=" << g.edges.size() << " seed=" << config.seed << " stream=" << o.stream
              << " -> " << o.out_dir << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// overlay
// ---------------------------------------------------------------------------

struct OverlayOpts {
    std::string edges;
    std::string positions;
    std::string out_dir;
    double gamma = 0.2;
    std::uint64_t photons = 1000;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    CLI::Option* seed_opt = nullptr;
};

int cmd_overlay(const OverlayOpts& o) {
    const std::uint64_t seed = resolve_seed(o.seed_opt, o.seed, 0);
    PhotonicParams params;
    params.gamma_db_per_km = o.gamma;
    params.photons_per_attempt = o.photons;

    const SpatialGraph fiber = load_graph(o.edges, o.positions);
    if (fiber.coords == SpatialGraph::Coords::none)
        throw GraphIoError(o.positions + ": overlay sampling needs node positions");

    RunManifest manifest;
    manifest.command = "overlay";
    manifest.config = {{"edges", o.edges},
                       {"positions", o.positions},
                       {"photonic",
                        {{"gamma_db_per_km", params.gamma_db_per_km},
                         {"photons_per_attempt", params.photons_per_attempt}}},
                       {"seed", seed},
                       {"stream", o.stream},
                       {"input_digests",
                        {{"edges", to_hex(fnv1a64_file(o.edges))},
                         {"positions", to_hex(fnv1a64_file(o.positions))}}}};
    manifest.master_seed = seed;
    manifest.outputs = {"photonic_edges.tsv"};
    write_manifest(o.out_dir, manifest);

    RngStream rng(seed, o.stream);
    const SpatialGraph photonic = sample_overlay(fiber, params, default_distance_fn(fiber), rng);
    save_edges(photonic, fs::path(o.out_dir) / "photonic_edges.tsv");
    std::cout << "overlay: kept " << photonic.edges.size() << " of " << fiber.edges.size()
              << " fiber edges -> " << o.out_dir << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// metrics
// ---------------------------------------------------------------------------

struct MetricsOpts {
    std::string edges;
    std::string positions;
    std::string out_dir;
    bool no_path_length = false;
    std::uint64_t exact_threshold = 20000;
    std::uint64_t sources = 1024;
    std::uint64_t seed = 0;
    std::uint64_t log_bins = 0;
    CLI::Option* seed_opt = nullptr;
};

int cmd_metrics(const MetricsOpts& o) {
    const std::uint64_t seed = resolve_seed(o.seed_opt, o.seed, 0);
    const SpatialGraph g = load_graph(o.edges, o.positions);

    ReportOptions opt;
    opt.path_length = !o.no_path_length;
    opt.path.exact_threshold = o.exact_threshold;
    opt.path.sources = o.sources;
    opt.path.sample_seed = seed;

    RunManifest manifest;
    manifest.command = "metrics";
    manifest.config = {{"edges", o.edges},
                       {"positions", o.positions.empty() ? json(nullptr) : json(o.positions)},
                       {"path_length", opt.path_length},
                       {"exact_threshold", opt.path.exact_threshold},
                       {"sources", opt.path.sources},
                       {"seed", seed},
                       {"log_bins", o.log_bins},
                       {"input_digests", {{"edges", to_hex(fnv1a64_file(o.edges))}}}};
    manifest.master_seed = seed;
    manifest.outputs = {"metrics.json", "metrics.csv", "degree_histogram.csv",
                       "clustering_by_degree.csv", "knn_by_degree.csv"};
    write_manifest(o.out_dir, manifest);

    const MetricsReport r = full_report(g, opt);
    const fs::path out(o.out_dir);
    write_text(out / "metrics.json", report_to_json(r));
    write_text(out / "metrics.csv", std::string(kReportCsvHeader) + '\n' + report_csv_row(r) + '\n');
    if (o.log_bins > 0) {
        write_text(out / "degree_histogram.csv",
                   binned_histogram_csv(r.degree_counts, r.node_count, o.log_bins));
        write_text(out / "clustering_by_degree.csv",
                   binned_by_degree_csv(r.degree_counts, r.clustering_by_degree, "c", o.log_bins));
        write_text(out / "knn_by_degree.csv",
                   binned_by_degree_csv(r.degree_counts, r.knn_by_degree, "knn", o.log_bins));
    } else {
        write_text(out / "degree_histogram.csv", histogram_csv(r.degree_counts, r.degree_histogram));
        write_text(out / "clustering_by_degree.csv", by_degree_csv(r.clustering_by_degree, "c"));
        write_text(out / "knn_by_degree.csv", by_degree_csv(r.knn_by_degree, "knn"));
    }
    std::cout << "metrics: n=" << r.node_count << " edges=" << r.edge_count
              << " giant=" << r.giant_fraction << " -> " << o.out_dir << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// scan
// ---------------------------------------------------------------------------

struct ScanOpts {
    ModelOpts model;
    std::string out_dir;
    std::string parameter = "rho";
    double grid_min = 0.0;
    double grid_max = 0.0;
    std::uint64_t points = 0;
    bool log_spacing = false;
    std::uint64_t samples = 100;
    std::string layer = "photonic";
    bool with_path_length = false;
    unsigned threads = 0;
    std::uint64_t stream_offset = 0;
};

int cmd_scan(const ScanOpts& o) {
    ModelConfig config = resolve_model(o.model);

    ScanSpec spec;
    if (o.parameter == "rho")
        spec.parameter = ScanParameter::rho;
    else if (o.parameter == "radius")
        spec.parameter = ScanParameter::radius;
    else if (o.parameter == "n")
        spec.parameter = ScanParameter::n;
    else
        throw std::invalid_argument("--parameter: expected rho, radius, or n");
    if (o.points < 1) throw std::invalid_argument("--points: need at least 1");
    spec.grid = o.log_spacing ? log_grid(o.grid_min, o.grid_max, o.points)
                              : linear_grid(o.grid_min, o.grid_max, o.points);
    spec.samples = o.samples;

    RunOptions run;
    if (o.layer == "fiber")
        run.layer = Layer::fiber;
    else if (o.layer == "photonic")
        run.layer = Layer::photonic;
    else
        throw std::invalid_argument("--layer: expected fiber or photonic");
    run.metrics.path_length = o.with_path_length;
    run.threads = o.threads;
    run.stream_offset = o.stream_offset;

    // An n scan leaves rho constant, so the density-derived outputs make no
    // sense there; both need a resolvable density axis.
    const bool density_axis = spec.parameter != ScanParameter::n;
    const bool with_critical = density_axis && spec.grid.size() >= 3 && spec.samples >= 2;

    RunManifest manifest;
    manifest.command = "scan";
    manifest.config = {{"model", config_to_json(config)},
                       {"scan",
                        {{"parameter", o.parameter},
                         {"grid", spec.grid},
                         {"samples", spec.samples},
                         {"layer", o.layer},
                         {"with_path_length", o.with_path_length},
                         {"stream_offset", o.stream_offset}}}};
    manifest.master_seed = config.seed;
    manifest.outputs = {"scan.csv"};
    if (with_critical) manifest.outputs.push_back("critical.json");
    if (density_axis) manifest.outputs.push_back("plateau.json");
    write_manifest(o.out_dir, manifest);

    const ScanResult scan = scan_density(config, spec, run);
    const fs::path out(o.out_dir);
    write_text(out / "scan.csv", scan_to_csv(scan));
    if (with_critical) {
        const CriticalDensity cd = critical_density(scan);
        const json j = {{"rho_c", cd.rho_c},
                        {"uncertainty", cd.uncertainty},
                        {"bracketed", cd.bracketed}};
        write_text(out / "critical.json", j.dump(2) + '\n');
    }
    if (density_axis) {
        const PlateauEstimate pe = asymptotic_clustering(scan);
        const json j = {{"value", pe.value},
                        {"slope_per_decade", pe.slope_per_decade},
                        {"plateau", pe.plateau}};
        write_text(out / "plateau.json", j.dump(2) + '\n');
    }
    std::cout << "scan: " << o.parameter << " over " << spec.grid.size() << " points, "
              << spec.samples << " samples each -> " << o.out_dir << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

struct FitOpts {
    std::string kind;
    std::string data;
    std::string out_dir;
    std::int64_t k_min = -1;  // -1 picks the per-kind default
    std::int64_t tail_k_min = -1;
};

std::vector<std::vector<double>> read_csv_numbers(const std::string& path,
                                                  std::size_t min_columns,
                                                  std::size_t max_columns) {
    std::ifstream in(path);
    if (!in) throw GraphIoError(path + ": cannot open");
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        std::vector<double> row;
        std::size_t start = 0;
        bool ok = true;
        while (start <= line.size()) {
            std::size_t comma = line.find(',', start);
            if (comma == std::string::npos) comma = line.size();
            double v = 0.0;
            const char* b = line.data() + start;
            const char* e = line.data() + comma;
            const auto res = std::from_chars(b, e, v);
            if (res.ec != std::errc{} || res.ptr != e) {
                ok = false;
                break;
            }
            row.push_back(v);
            start = comma + 1;
        }
        if (!ok) {
            if (line_no == 1) continue;  // header row
            throw GraphIoError(path + ':' + std::to_string(line_no) + ": expected numeric CSV");
        }
        if (row.size() < min_columns || row.size() > max_columns) {
            const std::string want =
                min_columns == max_columns
                    ? std::to_string(min_columns)
                    : std::to_string(min_columns) + " to " + std::to_string(max_columns);
            throw GraphIoError(path + ':' + std::to_string(line_no) + ": expected " + want +
                               " columns");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

int cmd_fit(const FitOpts& o) {
    json fits;
    bool converged = true;
    std::vector<std::string> outputs = {"fits.json"};
    try {
        if (o.kind == "degree") {
            const auto rows = read_csv_numbers(o.data, 2, 3);  // k,count[,probability]
            std::map<int, double> hist;
            double total = 0.0;
            for (const auto& row : rows) {
                hist[static_cast<int>(std::llround(row[0]))] += row[1];
                total += row[1];
            }
            if (!(total > 0.0)) throw GraphIoError(o.data + ": histogram sums to zero");
            for (auto& [k, v] : hist) v /= total;  // counts and probabilities both accepted
            const int k_min = o.k_min < 0 ? 0 : static_cast<int>(o.k_min);
            const FitResult ge = fit_gen_exponential(hist, k_min);
            fits["gen_exponential"] = json::parse(fit_to_json(ge));
            converged = converged && ge.converged && ge.identifiable;
            if (o.tail_k_min >= 0) {
                const FitResult pt = fit_power_law_tail(hist, static_cast<int>(o.tail_k_min));
                fits["power_tail"] = json::parse(fit_to_json(pt));
                converged = converged && pt.converged && pt.identifiable;
            }
        } else if (o.kind == "path") {
            const auto rows = read_csv_numbers(o.data, 3, 3);
            std::vector<PathSample> samples;
            for (const auto& row : rows)
                samples.push_back(PathSample{static_cast<std::size_t>(std::llround(row[0])),
                                             row[1], row[2]});
            const FitResult ps = fit_path_scaling(samples);
            fits["path_scaling"] = json::parse(fit_to_json(ps));
            converged = converged && ps.converged && ps.identifiable;
        } else if (o.kind == "clustering") {
            const auto rows = read_csv_numbers(o.data, 2, 2);
            std::map<int, double> ck;
            for (const auto& row : rows) ck[static_cast<int>(std::llround(row[0]))] = row[1];
            const int k_min = o.k_min < 0 ? 3 : static_cast<int>(o.k_min);
            const FitResult cp = fit_clustering_power(ck, k_min);
            fits["clustering_power"] = json::parse(fit_to_json(cp));
            converged = converged && cp.converged && cp.identifiable;
        } else {
            throw std::invalid_argument("--kind: expected degree, path, or clustering");
        }
    } catch (const std::invalid_argument& e) {
        // Validation inside the fitting routines means unusable input data,
        // except for the flag error above which names its own flag.
        const std::string what = e.what();
        if (what.rfind("--kind", 0) == 0) throw;
        throw GraphIoError(o.data + ": " + what);
    }

    RunManifest manifest;
    manifest.command = "fit";
    manifest.config = {{"kind", o.kind},
                       {"data", o.data},
                       {"k_min", o.k_min},
                       {"tail_k_min", o.tail_k_min},
                       {"input_digests", {{"data", to_hex(fnv1a64_file(o.data))}}}};
    manifest.outputs = outputs;
    write_manifest(o.out_dir, manifest);
    write_text(fs::path(o.out_dir) / "fits.json", fits.dump(2) + '\n');
    std::cout << "fit: kind=" << o.kind << (converged ? "" : " (not converged)") << " -> "
              << o.out_dir << '\n';
    return converged ? 0 : 3;
}

// ---------------------------------------------------------------------------
// ingest
// ---------------------------------------------------------------------------

struct IngestOpts {
    std::string nodes;
    std::string links;
    std::string out_dir;
    std::vector<std::string> continents;
};

json stats_json(const ItdkParseStats& s) {
    return {{"lines", s.lines},
            {"comments", s.comments},
            {"records", s.records},
            {"malformed", s.malformed}};
}

int cmd_ingest(const IngestOpts& o) {
    std::vector<std::string> continents = o.continents;
    if (continents.empty())
        for (const auto code : kContinentCodes) continents.emplace_back(code);
    for (const auto& code : continents)
        if (std::find(std::begin(kContinentCodes), std::end(kContinentCodes), code) ==
            std::end(kContinentCodes))
            throw std::invalid_argument("--continent: unknown code \"" + code +
                                        "\" (use AF AS EU NA OC SA)");

    ItdkDataset dataset = ingest_files(o.nodes, o.links);
    const FilterReport filter = cross_filter(dataset);

    RunManifest manifest;
    manifest.command = "ingest";
    manifest.config = {{"nodes", o.nodes},
                       {"links", o.links},
                       {"continents", continents},
                       {"input_digests",
                        {{"nodes", to_hex(dataset.geo_file_digest)},
                         {"links", to_hex(dataset.link_file_digest)}}}};
    manifest.outputs = {"ingest_report.json"};
    for (const auto& code : continents) {
        manifest.outputs.push_back(code + "_edges.tsv");
        manifest.outputs.push_back(code + "_positions.tsv");
    }
    write_manifest(o.out_dir, manifest);

    json report;
    report["geo_stats"] = stats_json(dataset.geo_stats);
    report["link_stats"] = stats_json(dataset.link_stats);
    report["filter"] = {{"nodes_in", filter.nodes_in},
                        {"pairs_in", filter.pairs_in},
                        {"nodes_active", filter.nodes_active},
                        {"nodes_geolocated", filter.nodes_geolocated},
                        {"pairs_kept", filter.pairs_kept},
                        {"nodes_out", filter.nodes_out},
                        {"pairs_out", filter.pairs_out}};
    report["continent_counts"] = continent_counts(dataset);
    report["dataset_digest"] = to_hex(dataset_digest(dataset));
    report["input_digests"] = {{"nodes", to_hex(dataset.geo_file_digest)},
                               {"links", to_hex(dataset.link_file_digest)}};

    const fs::path out(o.out_dir);
    write_text(out / "ingest_report.json", report.dump(2) + '\n');
    for (const auto& code : continents) {
        const ContinentSegment segment = segment_continent(dataset, code);
        save_edges(segment.graph, out / (code + "_edges.tsv"));
        save_positions(segment.graph, out / (code + "_positions.tsv"));
    }
    std::cout << "ingest: " << filter.nodes_out << " nodes, " << filter.pairs_out
              << " pairs after filtering -> " << o.out_dir << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

struct CompareOpts {
    ModelOpts model;
    std::string edges;
    std::string positions;
    std::string out_dir;
    std::uint64_t samples = 25;
    bool allow_n_mismatch = false;
    unsigned threads = 0;
};

std::string mean_csv_row(const std::vector<MetricsReport>& reports) {
    const auto mean_of = [&](auto&& get) -> std::optional<double> {
        double sum = 0.0;
        std::size_t count = 0;
        for (const auto& r : reports) {
            const std::optional<double> v = get(r);
            if (v) {
                sum += *v;
                ++count;
            }
        }
        if (count == 0) return std::nullopt;
        return sum / static_cast<double>(count);
    };
    const auto cell = [](const std::optional<double>& v) {
        return v ? format_double(*v) : std::string("undefined");
    };
    const auto path_mean =
        mean_of([](const MetricsReport& r) { return r.avg_shortest_path; });
    // Spread of the per-sample means stands in for a single-run standard error.
    std::optional<double> path_se;
    {
        double sum = 0.0, sq = 0.0;
        std::size_t count = 0;
        for (const auto& r : reports)
            if (r.avg_shortest_path) {
                sum += *r.avg_shortest_path;
                sq += *r.avg_shortest_path * *r.avg_shortest_path;
                ++count;
            }
        if (count >= 2) {
            const double mean = sum / static_cast<double>(count);
            const double var =
                (sq - sum * mean) / static_cast<double>(count - 1);
            path_se = std::sqrt(std::max(0.0, var) / static_cast<double>(count));
        }
    }
    double sampled = 0.0;
    for (const auto& r : reports) sampled += r.path_sampled ? 1.0 : 0.0;
    sampled /= static_cast<double>(reports.size());

    std::string row;
    row += cell(mean_of([](const MetricsReport& r) {
        return std::optional<double>(static_cast<double>(r.node_count));
    }));
    row += ',' + cell(mean_of([](const MetricsReport& r) {
        return std::optional<double>(static_cast<double>(r.edge_count));
    }));
    row += ',' + cell(mean_of([](const MetricsReport& r) {
        return std::optional<double>(r.giant_fraction);
    }));
    row += ',' + cell(path_mean);
    row += ',' + cell(path_se);
    row += ',' + format_double(sampled);
    row += ',' + cell(mean_of([](const MetricsReport& r) {
        return std::optional<double>(r.avg_clustering);
    }));
    row += ',' + cell(mean_of([](const MetricsReport& r) { return r.assortativity; }));
    row += ',' + cell(mean_of([](const MetricsReport& r) {
        return std::optional<double>(r.edges_per_node);
    }));
    return row;
}

int cmd_compare(const CompareOpts& o) {
    ModelConfig config = resolve_model(o.model);
    const SpatialGraph real = load_graph(o.edges, o.positions);
    if (real.coords == SpatialGraph::Coords::none)
        throw GraphIoError(o.positions + ": comparison needs node positions");
    if (config.n != real.node_count && !o.allow_n_mismatch)
        throw std::invalid_argument(
            "model n=" + std::to_string(config.n) + " but the real network has " +
            std::to_string(real.node_count) + " nodes; set n or pass --allow-n-mismatch");
    validate_config(config);

    RunManifest manifest;
    manifest.command = "compare";
    manifest.config = {{"model", config_to_json(config)},
                       {"edges", o.edges},
                       {"positions", o.positions},
                       {"samples", o.samples},
                       {"allow_n_mismatch", o.allow_n_mismatch},
                       {"input_digests",
                        {{"edges", to_hex(fnv1a64_file(o.edges))},
                         {"positions", to_hex(fnv1a64_file(o.positions))}}}};
    manifest.master_seed = config.seed;
    manifest.outputs = {"compare.csv"};
    write_manifest(o.out_dir, manifest);

    ReportOptions report_opts;
    const RealNetworkReport real_report =
        real_network_report(real, config.photonic, config.seed, 0, report_opts);

    RunOptions run;
    run.threads = o.threads;
    run.layer = Layer::fiber;
    const auto model_fiber = run_ensemble(config, o.samples, run);
    run.layer = Layer::photonic;
    const auto model_photonic = run_ensemble(config, o.samples, run);

    std::string csv = std::string("row,") + kReportCsvHeader + '\n';
    csv += "real-fiber," + report_csv_row(real_report.fiber) + '\n';
    csv += "real-photonic," + report_csv_row(real_report.photonic) + '\n';
    csv += "model-fiber-mean," + mean_csv_row(model_fiber) + '\n';
    csv += "model-photonic-mean," + mean_csv_row(model_photonic) + '\n';
    write_text(fs::path(o.out_dir) / "compare.csv", csv);
    std::cout << "compare: real n=" << real.node_count << " vs model n=" << config.n << " over "
              << o.samples << " samples -> " << o.out_dir << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spatial quantum-network simulation toolkit"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    GenerateOpts gen;
    CLI::App* gen_sub = app.add_subcommand("generate", "Generate a fiber network");
    add_model_opts(gen_sub, gen.model);
    gen_sub->add_option("--out-dir", gen.out_dir, "Output directory")->required();
    gen_sub->add_option("--stream", gen.stream, "Sample stream index");

    OverlayOpts ov;
    CLI::App* ov_sub = app.add_subcommand("overlay", "Sample the photonic overlay of a network");
    ov_sub->add_option("--edges", ov.edges, "Fiber edge list")->required();
    ov_sub->add_option("--positions", ov.positions, "Node positions")->required();
    ov_sub->add_option("--out-dir", ov.out_dir, "Output directory")->required();
    ov_sub->add_option("--gamma-db-per-km", ov.gamma, "Fiber loss coefficient");
    ov_sub->add_option("--photons", ov.photons, "Photons per entanglement attempt");
    ov.seed_opt = ov_sub->add_option("--seed", ov.seed, "Master seed (beats QNET_SEED)");
    ov_sub->add_option("--stream", ov.stream, "Sample stream index");

    MetricsOpts met;
    CLI::App* met_sub = app.add_subcommand("metrics", "Compute the network metric suite");
    met_sub->add_option("--edges", met.edges, "Edge list")->required();
    met_sub->add_option("--positions", met.positions, "Node positions (optional)");
    met_sub->add_option("--out-dir", met.out_dir, "Output directory")->required();
    met_sub->add_flag("--no-path-length", met.no_path_length, "Skip shortest path lengths");
    met_sub->add_option("--exact-threshold", met.exact_threshold,
                        "Giant size above which path lengths are sampled");
    met_sub->add_option("--sources", met.sources, "BFS sources for sampled path lengths");
    met.seed_opt = met_sub->add_option("--seed", met.seed, "Sampling seed (beats QNET_SEED)");
    met_sub->add_option("--log-bins", met.log_bins,
                        "Export log-binned histograms with this many bins");

    ScanOpts scan;
    CLI::App* scan_sub = app.add_subcommand("scan", "Ensemble scan over a parameter grid");
    add_model_opts(scan_sub, scan.model);
    scan_sub->add_option("--out-dir", scan.out_dir, "Output directory")->required();
    scan_sub->add_option("--parameter", scan.parameter, "Scan parameter: rho, radius, n");
    scan_sub->add_option("--grid-min", scan.grid_min, "Lowest grid value")->required();
    scan_sub->add_option("--grid-max", scan.grid_max, "Highest grid value")->required();
    scan_sub->add_option("--points", scan.points, "Grid points")->required();
    scan_sub->add_flag("--log-spacing", scan.log_spacing, "Geometric instead of linear grid");
    scan_sub->add_option("--samples", scan.samples, "Samples per grid point");
    scan_sub->add_option("--layer", scan.layer, "Layer to measure: fiber or photonic");
    scan_sub->add_flag("--with-path-length", scan.with_path_length,
                       "Also average shortest path lengths (slow)");
    scan_sub->add_option("--threads", scan.threads, "Worker threads (0 = hardware)");
    scan_sub->add_option("--stream-offset", scan.stream_offset, "First sample stream index");

    FitOpts fit;
    CLI::App* fit_sub = app.add_subcommand("fit", "Fit functional forms to exported data");
    fit_sub->add_option("--kind", fit.kind, "degree, path, or clustering")->required();
    fit_sub->add_option("--data", fit.data, "Input CSV")->required();
    fit_sub->add_option("--out-dir", fit.out_dir, "Output directory")->required();
    fit_sub->add_option("--k-min", fit.k_min, "Lowest degree included in the fit");
    fit_sub->add_option("--tail-k-min", fit.tail_k_min,
                        "Also fit a power-law tail from this degree");

    IngestOpts ing;
    CLI::App* ing_sub = app.add_subcommand("ingest", "Ingest ITDK nodes and links files");
    ing_sub->add_option("--nodes", ing.nodes, "Geolocated nodes file")->required();
    ing_sub->add_option("--links", ing.links, "Links file")->required();
    ing_sub->add_option("--out-dir", ing.out_dir, "Output directory")->required();
    ing_sub->add_option("--continent", ing.continents,
                        "Continent code to export (repeatable; default all)");

    CompareOpts cmp;
    CLI::App* cmp_sub =
        app.add_subcommand("compare", "Compare a real topology against a model ensemble");
    add_model_opts(cmp_sub, cmp.model);
    cmp_sub->add_option("--edges", cmp.edges, "Real network edge list")->required();
    cmp_sub->add_option("--positions", cmp.positions, "Real network positions")->required();
    cmp_sub->add_option("--out-dir", cmp.out_dir, "Output directory")->required();
    cmp_sub->add_option("--samples", cmp.samples, "Model ensemble size");
    cmp_sub->add_flag("--allow-n-mismatch", cmp.allow_n_mismatch,
                      "Proceed when model n differs from the real node count");
    cmp_sub->add_option("--threads", cmp.threads, "Worker threads (0 = hardware)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (gen_sub->parsed()) return cmd_generate(gen);
        if (ov_sub->parsed()) return cmd_overlay(ov);
        if (met_sub->parsed()) return cmd_metrics(met);
        if (scan_sub->parsed()) return cmd_scan(scan);
        if (fit_sub->parsed()) return cmd_fit(fit);
        if (ing_sub->parsed()) return cmd_ingest(ing);
        if (cmp_sub->parsed()) return cmd_compare(cmp);
    } catch (const GraphIoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
