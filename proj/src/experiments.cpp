#include "qnet/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>

namespace qnet {

const char* to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::brito: return "brito";
        case ModelKind::brito_soares: return "brito-soares";
        case ModelKind::brito_rozenfeld: return "brito-rozenfeld";
    }
    return "?";
}

std::optional<ModelKind> model_kind_from_string(std::string_view name) {
    if (name == "brito") return ModelKind::brito;
    if (name == "brito-soares") return ModelKind::brito_soares;
    if (name == "brito-rozenfeld") return ModelKind::brito_rozenfeld;
    return std::nullopt;
}

void validate_config(const ModelConfig& config) {
    if (config.n < 1) throw std::invalid_argument("config: n must be >= 1");
    if (!config.rho && !config.radius_km)
        throw std::invalid_argument("config: one of rho or radius required");
    if (config.rho && !(*config.rho > 0.0))
        throw std::invalid_argument("config: rho must be positive");
    if (config.radius_km && !(*config.radius_km > 0.0))
        throw std::invalid_argument("config: radius must be positive");
    if (config.rho && config.radius_km) {
        const double implied =
            static_cast<double>(config.n) / (kPi * *config.radius_km * *config.radius_km);
        if (std::abs(implied - *config.rho) > 1e-6 * *config.rho)
            throw std::invalid_argument(
                "config: rho and radius disagree (rho must equal n / (pi R^2))");
    }
    if (!(config.waxman.beta > 0.0 && config.waxman.beta <= 1.0))
        throw std::invalid_argument("config: waxman beta must be in (0, 1]");
    if (!(config.waxman.alpha_l_km > 0.0))
        throw std::invalid_argument("config: waxman alpha_l must be positive");
    if (config.kind == ModelKind::brito_soares) {
        if (config.soares.m < 1) throw std::invalid_argument("config: soares m must be >= 1");
        if (!(config.soares.alpha_a >= 0.0))
            throw std::invalid_argument("config: soares alpha_a must be >= 0");
        if (config.n < config.soares.m + 1)
            throw std::invalid_argument("config: soares needs n >= m + 1");
    }
    if (config.kind == ModelKind::brito_rozenfeld) {
        const auto& rz = config.rozenfeld;
        if (!(rz.lambda > 2.0)) throw std::invalid_argument("config: rozenfeld lambda must be > 2");
        if (rz.min_degree < 1)
            throw std::invalid_argument("config: rozenfeld min degree must be >= 1");
        if (rz.max_degree <= rz.min_degree)
            throw std::invalid_argument("config: rozenfeld max degree must exceed min degree");
        if (!rz.inclusive_support && rz.max_degree < rz.min_degree + 2)
            throw std::invalid_argument("config: rozenfeld exclusive support is empty");
        if (!(rz.radius_scale_km > 0.0))
            throw std::invalid_argument("config: rozenfeld radius scale must be positive");
    }
    if (!(config.photonic.gamma_db_per_km > 0.0))
        throw std::invalid_argument("config: photonic gamma must be positive");
    if (config.photonic.photons_per_attempt < 1)
        throw std::invalid_argument("config: photonic photons must be >= 1");
}

double config_radius_km(const ModelConfig& config) {
    if (config.radius_km) return *config.radius_km;
    if (!config.rho) throw std::invalid_argument("config: one of rho or radius required");
    return std::sqrt(static_cast<double>(config.n) / (kPi * *config.rho));
}

double config_rho(const ModelConfig& config) {
    if (config.rho) return *config.rho;
    if (!config.radius_km) throw std::invalid_argument("config: one of rho or radius required");
    return static_cast<double>(config.n) / (kPi * *config.radius_km * *config.radius_km);
}

SpatialGraph generate_fiber(const ModelConfig& config, RngStream& rng,
                            const PowerLawDegreeSampler* sampler) {
    auto positions = sample_disk(config.n, config_radius_km(config), rng);
    switch (config.kind) {
        case ModelKind::brito:
            return generate_waxman(std::move(positions), config.waxman, rng);
        case ModelKind::brito_soares:
            return generate_soares(std::move(positions), config.soares, rng);
        case ModelKind::brito_rozenfeld:
            return generate_rozenfeld(std::move(positions), config.rozenfeld, rng, sampler);
    }
    throw std::logic_error("unreachable model kind");
}

SpatialGraph generate_sample(const ModelConfig& config, std::uint64_t stream, Layer layer,
                             const PowerLawDegreeSampler* sampler) {
    RngStream rng(config.seed, stream);
    SpatialGraph fiber = generate_fiber(config, rng, sampler);
    canonicalize_edges(fiber);
    if (layer == Layer::fiber) return fiber;
    return sample_overlay(fiber, config.photonic, planar_distance_fn(fiber), rng);
}

std::vector<MetricsReport> run_ensemble(const ModelConfig& config, std::size_t samples,
                                        const RunOptions& options) {
    validate_config(config);
    std::optional<PowerLawDegreeSampler> shared_sampler;
    if (config.kind == ModelKind::brito_rozenfeld) shared_sampler.emplace(config.rozenfeld);
    const PowerLawDegreeSampler* sampler = shared_sampler ? &*shared_sampler : nullptr;

    std::vector<MetricsReport> reports(samples);
    const auto run_one = [&](std::size_t i) {
        const SpatialGraph g =
            generate_sample(config, options.stream_offset + i, options.layer, sampler);
        reports[i] = full_report(g, options.metrics);
    };

    unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
    if (threads < 1) threads = 1;
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, samples));
    if (threads <= 1) {
        for (std::size_t i = 0; i < samples; ++i) run_one(i);
        return reports;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= samples) return;
                try {
                    run_one(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
    return reports;
}

// ---------------------------------------------------------------------------
// Scans
// ---------------------------------------------------------------------------

std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
    if (points < 1 || !(hi > lo)) throw std::invalid_argument("grid: need hi > lo, points >= 1");
    std::vector<double> grid(points);
    if (points == 1) {
        grid[0] = lo;
        return grid;
    }
    for (std::size_t i = 0; i < points; ++i)
        grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    return grid;
}

std::vector<double> log_grid(double lo, double hi, std::size_t points) {
    if (!(lo > 0.0)) throw std::invalid_argument("grid: log grid needs lo > 0");
    auto grid = linear_grid(std::log(lo), std::log(hi), points);
    for (double& g : grid) g = std::exp(g);
    return grid;
}

namespace {

SummaryStat summarize(const std::vector<std::optional<double>>& values) {
    SummaryStat s;
    double sum = 0.0;
    for (const auto& v : values) {
        if (v) {
            sum += *v;
            ++s.count;
        } else {
            ++s.excluded;
        }
    }
    if (s.count == 0) return s;
    s.mean = sum / static_cast<double>(s.count);
    if (s.count >= 2) {
        double var = 0.0;
        for (const auto& v : values)
            if (v) var += (*v - s.mean) * (*v - s.mean);
        s.stddev = std::sqrt(var / static_cast<double>(s.count - 1));
    }
    return s;
}

ModelConfig point_config(const ModelConfig& base, ScanParameter parameter, double value) {
    ModelConfig c = base;
    switch (parameter) {
        case ScanParameter::rho:
            c.rho = value;
            c.radius_km.reset();
            break;
        case ScanParameter::radius:
            c.radius_km = value;
            c.rho.reset();
            break;
        case ScanParameter::n:
            c.n = static_cast<std::size_t>(std::llround(value));
            // Keeps whichever of rho/radius the base config pins.
            break;
    }
    return c;
}

}  // namespace

ScanResult scan_density(const ModelConfig& base, const ScanSpec& spec,
                        const RunOptions& options) {
    if (spec.grid.empty()) throw std::invalid_argument("scan: empty grid");
    if (!std::is_sorted(spec.grid.begin(), spec.grid.end()) ||
        std::adjacent_find(spec.grid.begin(), spec.grid.end()) != spec.grid.end())
        throw std::invalid_argument("scan: grid must be strictly increasing");
    if (spec.samples < 1) throw std::invalid_argument("scan: need at least one sample");
    if (spec.parameter == ScanParameter::n && base.rho && base.radius_km)
        throw std::invalid_argument("scan: n scan needs exactly one of rho or radius fixed");

    RunOptions point_options = options;
    point_options.metrics.histograms = false;  // summaries only

    ScanResult out;
    out.parameter = spec.parameter;
    out.samples = spec.samples;
    out.points.reserve(spec.grid.size());
    for (std::size_t gi = 0; gi < spec.grid.size(); ++gi) {
        const ModelConfig config = point_config(base, spec.parameter, spec.grid[gi]);
        validate_config(config);
        point_options.stream_offset = options.stream_offset + gi * spec.samples;
        const auto reports = run_ensemble(config, spec.samples, point_options);

        ScanPoint pt;
        pt.value = spec.grid[gi];
        pt.rho = config_rho(config);
        pt.radius_km = config_radius_km(config);
        pt.n = config.n;
        std::vector<std::optional<double>> column(reports.size());
        const auto fill = [&](auto&& get) {
            for (std::size_t i = 0; i < reports.size(); ++i) column[i] = get(reports[i]);
        };
        fill([](const MetricsReport& r) { return std::optional<double>(r.giant_fraction); });
        pt.stats["giant_fraction"] = summarize(column);
        fill([](const MetricsReport& r) { return std::optional<double>(r.avg_clustering); });
        pt.stats["avg_clustering"] = summarize(column);
        fill([](const MetricsReport& r) { return r.assortativity; });
        pt.stats["assortativity"] = summarize(column);
        fill([](const MetricsReport& r) { return std::optional<double>(r.edges_per_node); });
        pt.stats["edges_per_node"] = summarize(column);
        if (options.metrics.path_length) {
            fill([](const MetricsReport& r) { return r.avg_shortest_path; });
            pt.stats["avg_shortest_path"] = summarize(column);
        }
        out.points.push_back(std::move(pt));
    }
    return out;
}

ScanResult assortativity_scan(const ModelConfig& base, const ScanSpec& spec,
                              const RunOptions& options) {
    return scan_density(base, spec, options);
}

namespace {

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

std::string scan_to_csv(const ScanResult& scan) {
    std::string csv = "parameter,value,n,rho,radius_km";
    std::vector<std::string> keys;
    if (!scan.points.empty())
        for (const auto& [key, stat] : scan.points.front().stats) keys.push_back(key);
    const bool with_std = scan.samples >= 2;
    for (const auto& key : keys) {
        csv += ',' + key + "_mean";
        if (with_std) csv += ',' + key + "_std";
        csv += ',' + key + "_count," + key + "_excluded";
    }
    csv += '\n';
    const char* pname = scan.parameter == ScanParameter::rho ? "rho"
                        : scan.parameter == ScanParameter::radius ? "radius"
                                                                  : "n";
    for (const auto& pt : scan.points) {
        csv += pname;
        csv += ',' + format_double(pt.value) + ',' + std::to_string(pt.n) + ',' +
               format_double(pt.rho) + ',' + format_double(pt.radius_km);
        for (const auto& key : keys) {
            const SummaryStat& s = pt.stats.at(key);
            csv += ',';
            csv += s.count > 0 ? format_double(s.mean) : "undefined";
            if (with_std) {
                csv += ',';
                csv += s.stddev ? format_double(*s.stddev) : "undefined";
            }
            csv += ',' + std::to_string(s.count) + ',' + std::to_string(s.excluded);
        }
        csv += '\n';
    }
    return csv;
}

CriticalDensity critical_density(const ScanResult& scan) {
    if (scan.points.size() < 3)
        throw std::invalid_argument("critical_density: need at least 3 grid points");
    std::vector<double> x, y;
    for (const auto& pt : scan.points) {
        const auto it = pt.stats.find("giant_fraction");
        if (it == pt.stats.end() || !it->second.stddev)
            throw std::invalid_argument("critical_density: scan lacks giant fraction std");
        x.push_back(pt.rho);
        y.push_back(*it->second.stddev);
    }
    std::size_t peak = 0;
    for (std::size_t i = 1; i < y.size(); ++i)
        if (y[i] > y[peak]) peak = i;

    CriticalDensity out;
    if (peak == 0 || peak + 1 == y.size()) {
        out.rho_c = x[peak];
        const double spacing =
            peak == 0 ? std::abs(x[1] - x[0]) : std::abs(x[peak] - x[peak - 1]);
        out.uncertainty = 0.5 * spacing;
        out.bracketed = false;
        return out;
    }

    // Vertex of the parabola through the peak and its neighbors.
    const double x0 = x[peak - 1], x1 = x[peak], x2 = x[peak + 1];
    const double y0 = y[peak - 1], y1 = y[peak], y2 = y[peak + 1];
    const double num = (x1 - x0) * (x1 - x0) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y1 - y0);
    const double den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    double vertex = x1;
    if (std::abs(den) > 0.0) vertex = x1 - 0.5 * num / den;
    const double lo = std::min(x0, x2), hi = std::max(x0, x2);
    vertex = std::clamp(vertex, lo, hi);
    out.rho_c = vertex;
    out.uncertainty = 0.5 * std::max(std::abs(x1 - x0), std::abs(x2 - x1));
    out.bracketed = true;
    return out;
}

EnsembleHistograms pool_histograms(const std::vector<MetricsReport>& reports) {
    EnsembleHistograms out;
    std::map<int, double> c_sum, knn_sum;
    std::size_t total_nodes = 0;
    for (const auto& r : reports) {
        total_nodes += r.node_count;
        for (const auto& [k, c] : r.degree_counts) {
            out.degree_count[k] += c;
            const auto ck = r.clustering_by_degree.find(k);
            if (ck != r.clustering_by_degree.end())
                c_sum[k] += ck->second * static_cast<double>(c);
            const auto kn = r.knn_by_degree.find(k);
            if (kn != r.knn_by_degree.end())
                knn_sum[k] += kn->second * static_cast<double>(c);
        }
    }
    for (const auto& [k, c] : out.degree_count) {
        out.degree_probability[k] = static_cast<double>(c) / static_cast<double>(total_nodes);
        out.clustering_by_degree[k] = c_sum[k] / static_cast<double>(c);
        if (k > 0) out.knn_by_degree[k] = knn_sum[k] / static_cast<double>(c);
    }
    return out;
}

PlateauEstimate asymptotic_clustering(const ScanResult& scan) {
    if (scan.points.empty()) throw std::invalid_argument("asymptotic_clustering: empty scan");
    std::vector<std::pair<double, double>> pts;  // (rho, mean <C>)
    for (const auto& pt : scan.points) {
        const auto it = pt.stats.find("avg_clustering");
        if (it == pt.stats.end() || it->second.count == 0)
            throw std::invalid_argument("asymptotic_clustering: scan lacks clustering column");
        pts.emplace_back(pt.rho, it->second.mean);
    }
    std::sort(pts.begin(), pts.end());
    const std::size_t q = std::max<std::size_t>(1, pts.size() / 4);
    const std::size_t first = pts.size() - q;

    PlateauEstimate out;
    double sum = 0.0;
    for (std::size_t i = first; i < pts.size(); ++i) sum += pts[i].second;
    out.value = sum / static_cast<double>(q);
    if (q >= 2) {
        double mx = 0.0, my = 0.0;
        for (std::size_t i = first; i < pts.size(); ++i) {
            mx += std::log10(pts[i].first);
            my += pts[i].second;
        }
        mx /= static_cast<double>(q);
        my /= static_cast<double>(q);
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t i = first; i < pts.size(); ++i) {
            const double dx = std::log10(pts[i].first) - mx;
            sxx += dx * dx;
            sxy += dx * (pts[i].second - my);
        }
        out.slope_per_decade = sxx > 0.0 ? sxy / sxx : 0.0;
    }
    // A plateau drifts by well under a tenth per decade of density.
    out.plateau = std::abs(out.slope_per_decade) <= 0.08;
    return out;
}

}  // namespace qnet
