#pragma once

#include <optional>
#include <string_view>

#include "qnet/fiber_models.hpp"
#include "qnet/fits.hpp"
#include "qnet/metrics.hpp"
#include "qnet/photonic.hpp"

namespace qnet {

enum class ModelKind { brito, brito_soares, brito_rozenfeld };

const char* to_string(ModelKind kind);
std::optional<ModelKind> model_kind_from_string(std::string_view name);

// Complete description of one network draw: model, size, density (or disk
// radius; one determines the other through rho = N / (pi R^2)), per-model
// parameters, photonic parameters, and the master seed.
struct ModelConfig {
    ModelKind kind = ModelKind::brito;
    std::size_t n = 1000;
    std::optional<double> rho;        // nodes per km^2
    std::optional<double> radius_km;  // disk radius
    WaxmanParams waxman;
    SoaresParams soares;
    RozenfeldParams rozenfeld;
    PhotonicParams photonic;
    std::uint64_t seed = 0;
};

// Throws std::invalid_argument when neither rho nor radius is given, when
// both are given but disagree beyond 1e-6 relative, or when a parameter is
// out of range for the chosen model.
void validate_config(const ModelConfig& config);
double config_radius_km(const ModelConfig& config);
double config_rho(const ModelConfig& config);

enum class Layer { fiber, photonic };

struct RunOptions {
    Layer layer = Layer::photonic;
    ReportOptions metrics;
    unsigned threads = 0;             // 0 = hardware concurrency
    std::uint64_t stream_offset = 0;  // sample i uses stream offset + i
};

// Fiber graph for one stream of the config seed. Positions, then edges, all
// from the one stream, so the full pipeline is replayed by the stream index
// alone. An optional shared degree sampler skips rebuilding the Rozenfeld
// CDF table per sample.
SpatialGraph generate_fiber(const ModelConfig& config, RngStream& rng,
                            const PowerLawDegreeSampler* sampler = nullptr);

// Position -> fiber -> overlay pipeline for one sample stream.
SpatialGraph generate_sample(const ModelConfig& config, std::uint64_t stream, Layer layer,
                             const PowerLawDegreeSampler* sampler = nullptr);

// Metrics for `samples` independent draws; sample i uses stream index
// options.stream_offset + i, so results do not depend on thread count or
// completion order.
std::vector<MetricsReport> run_ensemble(const ModelConfig& config, std::size_t samples,
                                        const RunOptions& options = {});

// ---------------------------------------------------------------------------
// Scans
// ---------------------------------------------------------------------------

enum class ScanParameter { rho, radius, n };

struct ScanSpec {
    ScanParameter parameter = ScanParameter::rho;
    std::vector<double> grid;  // strictly increasing
    std::size_t samples = 100;
};

std::vector<double> linear_grid(double lo, double hi, std::size_t points);
std::vector<double> log_grid(double lo, double hi, std::size_t points);

struct SummaryStat {
    double mean = 0.0;
    std::optional<double> stddev;  // sample std, absent when count < 2
    std::size_t count = 0;         // defined samples
    std::size_t excluded = 0;      // samples where the metric was undefined
};

struct ScanPoint {
    double value = 0.0;  // scanned parameter at this grid point
    double rho = 0.0;
    double radius_km = 0.0;
    std::size_t n = 0;
    std::map<std::string, SummaryStat> stats;
};

struct ScanResult {
    ScanParameter parameter = ScanParameter::rho;
    std::size_t samples = 0;
    std::vector<ScanPoint> points;
};

// Ensemble metrics along the grid. A rho scan holds N fixed and derives the
// radius per point; a radius scan derives rho; an n scan holds whichever of
// rho/radius the base config fixes. Stat columns: giant_fraction,
// avg_clustering, assortativity, edges_per_node, and avg_shortest_path when
// the run options ask for it.
ScanResult scan_density(const ModelConfig& base, const ScanSpec& spec,
                        const RunOptions& options = {});

// Same machinery, named for the assortativity-focused figure sweeps.
ScanResult assortativity_scan(const ModelConfig& base, const ScanSpec& spec,
                              const RunOptions& options = {});

std::string scan_to_csv(const ScanResult& scan);

struct CriticalDensity {
    double rho_c = 0.0;
    double uncertainty = 0.0;  // half the local grid spacing
    bool bracketed = false;    // false when the peak sits on a grid boundary
};

// Peak of the std of the giant fraction across the scan, refined by a
// three-point quadratic through the peak and its neighbors.
CriticalDensity critical_density(const ScanResult& scan);

// Node-weighted histograms pooled across an ensemble.
struct EnsembleHistograms {
    std::map<int, double> degree_probability;
    std::map<int, std::size_t> degree_count;   // pooled node counts
    std::map<int, double> clustering_by_degree;
    std::map<int, double> knn_by_degree;
};

EnsembleHistograms pool_histograms(const std::vector<MetricsReport>& reports);

struct PlateauEstimate {
    double value = 0.0;            // mean <C> over the plateau points
    double slope_per_decade = 0.0;  // d<C>/dlog10(rho) over those points
    bool plateau = false;
};

// Asymptotic clustering from the top quartile of a rho scan (the plateau
// region); flags non-plateaus by the residual slope.
PlateauEstimate asymptotic_clustering(const ScanResult& scan);

}  // namespace qnet
