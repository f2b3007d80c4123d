#include "qnet/fiber_models.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <tuple>

namespace qnet {

// ---------------------------------------------------------------------------
// Waxman
// ---------------------------------------------------------------------------

namespace {

void check_waxman(const WaxmanParams& p) {
    if (!(p.beta > 0.0 && p.beta <= 1.0))
        throw std::invalid_argument("waxman: beta must be in (0, 1]");
    if (!(p.alpha_l_km > 0.0))
        throw std::invalid_argument("waxman: alpha_l must be positive");
}

}  // namespace

double waxman_probability(double distance_km, const WaxmanParams& p) {
    check_waxman(p);
    if (!(distance_km >= 0.0))
        throw std::invalid_argument("waxman: distance must be non-negative");
    return p.beta * std::exp(-distance_km / p.alpha_l_km);
}

SpatialGraph generate_waxman(std::vector<PlanarPoint> positions, const WaxmanParams& p,
                             RngStream& rng) {
    check_waxman(p);
    SpatialGraph g = SpatialGraph::from_planar(std::move(positions));
    const std::size_t n = g.node_count;
    const double inv_alpha = 1.0 / p.alpha_l_km;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const PlanarPoint a = g.planar[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = a.x - g.planar[j].x;
            const double dy = a.y - g.planar[j].y;
            const double gamma = p.beta * std::exp(-std::sqrt(dx * dx + dy * dy) * inv_alpha);
            if (rng.uniform01() < gamma)
                g.edges.emplace_back(static_cast<NodeIndex>(i), static_cast<NodeIndex>(j));
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Soares growth
// ---------------------------------------------------------------------------

namespace {

void check_soares(const SoaresParams& p) {
    if (p.m < 1) throw std::invalid_argument("soares: m must be >= 1");
    if (!(p.alpha_a >= 0.0)) throw std::invalid_argument("soares: alpha_a must be >= 0");
}

// d^(-alpha) from the squared distance; d is clamped below so coincident
// points keep finite weight.
inline double inverse_distance_power(double d2, double alpha) {
    constexpr double min_d2 = kMinAttachmentDistanceKm * kMinAttachmentDistanceKm;
    if (d2 < min_d2) d2 = min_d2;
    if (alpha == 5.0) {
        // Default exponent; avoids std::pow in the O(N^2) inner loop.
        return 1.0 / (d2 * d2 * std::sqrt(d2));
    }
    return std::pow(d2, -0.5 * alpha);
}

}  // namespace

std::vector<double> soares_attachment_weights(
    const std::vector<std::pair<std::size_t, double>>& degree_distance, double alpha_a) {
    if (degree_distance.empty())
        throw std::invalid_argument("soares_attachment_weights: no candidates");
    if (!(alpha_a >= 0.0))
        throw std::invalid_argument("soares_attachment_weights: alpha_a must be >= 0");
    std::vector<double> weights;
    weights.reserve(degree_distance.size());
    double total = 0.0;
    for (const auto& [degree, distance] : degree_distance) {
        if (!(distance >= 0.0))
            throw std::invalid_argument("soares_attachment_weights: negative distance");
        const double w =
            static_cast<double>(degree) * inverse_distance_power(distance * distance, alpha_a);
        weights.push_back(w);
        total += w;
    }
    if (!(total > 0.0))
        throw std::invalid_argument("soares_attachment_weights: zero total weight");
    for (double& w : weights) w /= total;
    return weights;
}

SpatialGraph generate_soares(std::vector<PlanarPoint> positions, const SoaresParams& p,
                             RngStream& rng) {
    check_soares(p);
    const std::size_t n = positions.size();
    const std::size_t m = p.m;
    if (n < m + 1)
        throw std::invalid_argument("soares: need at least m+1 positions");

    SpatialGraph g = SpatialGraph::from_planar(std::move(positions));
    g.edges.reserve(m * (m + 1) / 2 + m * (n - m - 1));
    std::vector<std::size_t> degree(n, 0);

    // Seed clique on the first m+1 arrivals.
    for (std::size_t i = 0; i < m + 1; ++i)
        for (std::size_t j = i + 1; j < m + 1; ++j) {
            g.edges.emplace_back(static_cast<NodeIndex>(i), static_cast<NodeIndex>(j));
            ++degree[i];
            ++degree[j];
        }

    std::vector<double> weight(n, 0.0);
    for (std::size_t j = m + 1; j < n; ++j) {
        const PlanarPoint pj = g.planar[j];
        double total = 0.0;
        for (std::size_t i = 0; i < j; ++i) {
            const double dx = pj.x - g.planar[i].x;
            const double dy = pj.y - g.planar[i].y;
            const double w = static_cast<double>(degree[i]) *
                             inverse_distance_power(dx * dx + dy * dy, p.alpha_a);
            weight[i] = w;
            total += w;
        }
        // m draws without replacement; picked weights are zeroed and the
        // remaining mass renormalizes implicitly through the running total.
        for (std::size_t pick = 0; pick < m; ++pick) {
            double t = rng.uniform01() * total;
            std::size_t chosen = j;  // sentinel
            for (std::size_t i = 0; i < j; ++i) {
                t -= weight[i];
                if (t < 0.0 && weight[i] > 0.0) {
                    chosen = i;
                    break;
                }
            }
            if (chosen == j) {
                // Rounding pushed t past the last positive weight.
                for (std::size_t i = j; i-- > 0;)
                    if (weight[i] > 0.0) {
                        chosen = i;
                        break;
                    }
            }
            g.edges.emplace_back(static_cast<NodeIndex>(chosen), static_cast<NodeIndex>(j));
            ++degree[chosen];
            ++degree[j];
            total -= weight[chosen];
            weight[chosen] = 0.0;
        }
    }
    canonicalize_edges(g);
    return g;
}

// ---------------------------------------------------------------------------
// Rozenfeld quota model
// ---------------------------------------------------------------------------

namespace {

void check_rozenfeld(const RozenfeldParams& p) {
    if (!(p.lambda > 2.0)) throw std::invalid_argument("rozenfeld: lambda must be > 2");
    if (p.min_degree < 1) throw std::invalid_argument("rozenfeld: min degree must be >= 1");
    if (p.max_degree <= p.min_degree)
        throw std::invalid_argument("rozenfeld: max degree must exceed min degree");
    if (!p.inclusive_support && p.max_degree < p.min_degree + 2)
        throw std::invalid_argument("rozenfeld: exclusive support is empty");
    if (!(p.radius_scale_km > 0.0))
        throw std::invalid_argument("rozenfeld: radius scale must be positive");
}

}  // namespace

double connection_radius(std::size_t k, double radius_scale_km) {
    return radius_scale_km * std::sqrt(static_cast<double>(k));
}

PowerLawDegreeSampler::PowerLawDegreeSampler(const RozenfeldParams& p) {
    check_rozenfeld(p);
    const std::size_t lo = p.inclusive_support ? p.min_degree : p.min_degree + 1;
    const std::size_t hi = p.inclusive_support ? p.max_degree : p.max_degree - 1;
    support_min_ = lo;
    cdf_.resize(hi - lo + 1);
    // Sum smallest masses first so the normalization keeps the tail.
    double total = 0.0;
    for (std::size_t k = hi + 1; k-- > lo;)
        total += std::pow(static_cast<double>(k), -p.lambda);
    double acc = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) {
        acc += std::pow(static_cast<double>(k), -p.lambda) / total;
        cdf_[k - lo] = acc;
    }
    cdf_.back() = 1.0;
}

std::size_t PowerLawDegreeSampler::operator()(RngStream& rng) const {
    const double u = rng.uniform01();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return support_min_ + static_cast<std::size_t>(it - cdf_.begin());
}

std::size_t sample_target_degree(const RozenfeldParams& p, RngStream& rng) {
    return PowerLawDegreeSampler(p)(rng);
}

namespace {

// Uniform bucket grid over the position bounding box; cell edge equals the
// radius scale so a radius-r query touches O((r/A)^2) cells.
class BucketGrid {
public:
    BucketGrid(const std::vector<PlanarPoint>& points, double cell_km)
        : cell_(cell_km) {
        min_x_ = min_y_ = 0.0;
        double max_x = 0.0, max_y = 0.0;
        if (!points.empty()) {
            min_x_ = max_x = points[0].x;
            min_y_ = max_y = points[0].y;
        }
        for (const auto& p : points) {
            if (p.x < min_x_) min_x_ = p.x;
            if (p.y < min_y_) min_y_ = p.y;
            if (p.x > max_x) max_x = p.x;
            if (p.y > max_y) max_y = p.y;
        }
        nx_ = static_cast<std::size_t>((max_x - min_x_) / cell_) + 1;
        ny_ = static_cast<std::size_t>((max_y - min_y_) / cell_) + 1;
        cells_.resize(nx_ * ny_);
        for (NodeIndex i = 0; i < points.size(); ++i)
            cells_[cell_of(points[i])].push_back(i);
    }

    template <typename Fn>
    void for_candidates(const PlanarPoint& q, double radius, Fn&& fn) const {
        const std::size_t cx0 = clamp_x(q.x - radius);
        const std::size_t cx1 = clamp_x(q.x + radius);
        const std::size_t cy0 = clamp_y(q.y - radius);
        const std::size_t cy1 = clamp_y(q.y + radius);
        for (std::size_t cy = cy0; cy <= cy1; ++cy)
            for (std::size_t cx = cx0; cx <= cx1; ++cx)
                for (NodeIndex j : cells_[cy * nx_ + cx]) fn(j);
    }

private:
    std::size_t cell_of(const PlanarPoint& p) const {
        return clamp_y(p.y) * nx_ + clamp_x(p.x);
    }
    std::size_t clamp_x(double x) const {
        const double c = (x - min_x_) / cell_;
        if (c <= 0.0) return 0;
        const auto i = static_cast<std::size_t>(c);
        return i >= nx_ ? nx_ - 1 : i;
    }
    std::size_t clamp_y(double y) const {
        const double c = (y - min_y_) / cell_;
        if (c <= 0.0) return 0;
        const auto i = static_cast<std::size_t>(c);
        return i >= ny_ ? ny_ - 1 : i;
    }

    double cell_;
    double min_x_, min_y_;
    std::size_t nx_, ny_;
    std::vector<std::vector<NodeIndex>> cells_;
};

bool linked(const std::vector<std::vector<NodeIndex>>& adj, NodeIndex u, NodeIndex v) {
    const auto& shorter = adj[u].size() <= adj[v].size() ? adj[u] : adj[v];
    const NodeIndex other = adj[u].size() <= adj[v].size() ? v : u;
    return std::find(shorter.begin(), shorter.end(), other) != shorter.end();
}

}  // namespace

SpatialGraph generate_rozenfeld(std::vector<PlanarPoint> positions, const RozenfeldParams& p,
                                RngStream& rng, const PowerLawDegreeSampler* sampler,
                                RozenfeldDiagnostics* diag) {
    check_rozenfeld(p);
    const std::size_t n = positions.size();
    std::optional<PowerLawDegreeSampler> local_sampler;
    if (!sampler) local_sampler.emplace(p);
    const PowerLawDegreeSampler& draw = sampler ? *sampler : *local_sampler;

    std::vector<std::size_t> quota(n);
    for (std::size_t i = 0; i < n; ++i) quota[i] = draw(rng);

    std::vector<NodeIndex> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<NodeIndex>(i);
    for (std::size_t i = n; i > 1; --i)
        std::swap(order[i - 1], order[rng.below(i)]);

    SpatialGraph g = SpatialGraph::from_planar(std::move(positions));
    std::vector<std::tuple<NodeIndex, NodeIndex, NodeIndex>> created;  // u < v, initiator
    if (n > 1) {
        const BucketGrid grid(g.planar, p.radius_scale_km);
        std::vector<std::vector<NodeIndex>> adj(n);
        std::vector<std::pair<double, NodeIndex>> near;
        for (const NodeIndex v : order) {
            if (adj[v].size() >= quota[v]) continue;
            const double radius = connection_radius(quota[v], p.radius_scale_km);
            const double r2 = radius * radius;
            const PlanarPoint pv = g.planar[v];
            near.clear();
            grid.for_candidates(pv, radius, [&](NodeIndex j) {
                if (j == v) return;
                const double dx = pv.x - g.planar[j].x;
                const double dy = pv.y - g.planar[j].y;
                const double d2 = dx * dx + dy * dy;
                if (d2 <= r2) near.emplace_back(d2, j);
            });
            // Nearest first; equidistant candidates by lower index.
            std::sort(near.begin(), near.end());
            for (const auto& [d2, j] : near) {
                if (adj[v].size() >= quota[v]) break;
                if (adj[j].size() >= quota[j]) continue;
                if (linked(adj, v, j)) continue;
                adj[v].push_back(j);
                adj[j].push_back(v);
                created.emplace_back(std::min(v, j), std::max(v, j), v);
            }
        }
    }

    std::sort(created.begin(), created.end());
    g.edges.reserve(created.size());
    for (const auto& [u, v, ini] : created) g.edges.emplace_back(u, v);
    if (diag) {
        diag->quotas = std::move(quota);
        diag->order = std::move(order);
        diag->initiators.clear();
        diag->initiators.reserve(created.size());
        for (const auto& [u, v, ini] : created) diag->initiators.push_back(ini);
    }
    return g;
}

}  // namespace qnet
