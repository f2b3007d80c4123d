#include "qnet/fits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace qnet {

namespace {

struct Line {
    double slope = 0.0;
    double intercept = 0.0;
    double sse = 0.0;
};

// Ordinary least squares y = intercept + slope * x, centered for stability.
Line linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    Line out;
    if (sxx > 0.0) out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (out.intercept + out.slope * x[i]);
        out.sse += r * r;
    }
    return out;
}

// Best (ln a, b) for fixed c; b is constrained non-negative, so decaying data
// always maps into the model family.
Line gen_exp_at(const std::vector<int>& k, const std::vector<double>& lnp, double c,
                bool* clamped) {
    std::vector<double> x(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) x[i] = std::pow(static_cast<double>(k[i]), c);
    Line fit = linear_fit(x, lnp);
    if (fit.slope > 0.0) {
        // b = -slope would be negative; fall back to the constant model.
        double my = 0.0;
        for (const double y : lnp) my += y;
        my /= static_cast<double>(lnp.size());
        fit.slope = 0.0;
        fit.intercept = my;
        fit.sse = 0.0;
        for (const double y : lnp) fit.sse += (y - my) * (y - my);
        if (clamped) *clamped = true;
    } else if (clamped) {
        *clamped = false;
    }
    return fit;
}

}  // namespace

FitResult fit_gen_exponential(const std::map<int, double>& histogram, int k_min) {
    std::vector<int> k;
    std::vector<double> lnp;
    for (const auto& [kk, p] : histogram) {
        if (kk < k_min || !(p > 0.0)) continue;
        k.push_back(kk);
        lnp.push_back(std::log(p));
    }
    if (k.size() < 4)
        throw std::invalid_argument("fit_gen_exponential: need at least 4 nonzero bins");

    FitResult out;
    out.form = "gen-exponential";
    out.domain_min = k.front();
    out.domain_max = k.back();

    const auto [lo_it, hi_it] = std::minmax_element(lnp.begin(), lnp.end());
    if (*hi_it - *lo_it < 1e-12) {
        // Flat data: any c fits with b = 0, so the exponent is meaningless.
        out.parameters["a"] = std::exp(*lo_it);
        out.parameters["b"] = 0.0;
        out.parameters["c"] = 1.0;
        out.residual = 0.0;
        out.identifiable = false;
        return out;
    }

    // Coarse grid over the stretch exponent, then golden section around the
    // best cell. sse(c) is smooth, so this converges to machine precision.
    const double c_lo_all = 0.05, c_hi_all = 6.0;
    const int grid_points = 120;
    double best_c = c_lo_all, best_sse = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= grid_points; ++i) {
        const double c = c_lo_all * std::pow(c_hi_all / c_lo_all,
                                             static_cast<double>(i) / grid_points);
        const double sse = gen_exp_at(k, lnp, c, nullptr).sse;
        if (sse < best_sse) {
            best_sse = sse;
            best_c = c;
        }
    }
    const double step = std::pow(c_hi_all / c_lo_all, 1.0 / grid_points);
    double a = best_c / step, b = best_c * step;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = gen_exp_at(k, lnp, x1, nullptr).sse;
    double f2 = gen_exp_at(k, lnp, x2, nullptr).sse;
    for (int iter = 0; iter < 200 && (b - a) > 1e-12 * b; ++iter) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = gen_exp_at(k, lnp, x1, nullptr).sse;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = gen_exp_at(k, lnp, x2, nullptr).sse;
        }
    }
    const double c = 0.5 * (a + b);
    bool clamped = false;
    const Line fit = gen_exp_at(k, lnp, c, &clamped);
    out.parameters["a"] = std::exp(fit.intercept);
    out.parameters["b"] = -fit.slope;
    out.parameters["c"] = c;
    out.residual = fit.sse;
    out.identifiable = !clamped;
    out.converged = std::isfinite(fit.sse);
    return out;
}

FitResult fit_power_law_tail(const std::map<int, double>& histogram, int k_min) {
    std::vector<double> lnk, lnp;
    int lo = 0, hi = 0;
    for (const auto& [k, p] : histogram) {
        if (k < std::max(k_min, 1) || !(p > 0.0)) continue;
        if (lnk.empty()) lo = k;
        hi = k;
        lnk.push_back(std::log(static_cast<double>(k)));
        lnp.push_back(std::log(p));
    }
    if (lnk.size() < 3)
        throw std::invalid_argument("fit_power_law_tail: need at least 3 nonzero bins");
    const Line fit = linear_fit(lnk, lnp);
    FitResult out;
    out.form = "power-law";
    out.parameters["a"] = std::exp(fit.intercept);
    out.parameters["b"] = -fit.slope;
    out.residual = fit.sse;
    out.domain_min = lo;
    out.domain_max = hi;
    out.converged = std::isfinite(fit.sse);
    return out;
}

FitResult fit_path_scaling(const std::vector<PathSample>& points) {
    if (points.size() < 3)
        throw std::invalid_argument("fit_path_scaling: need at least 3 points");
    const double rho = points.front().rho;
    for (const auto& pt : points) {
        if (!(pt.rho > 0.0) || std::abs(pt.rho - rho) > 1e-9 * rho)
            throw std::invalid_argument("fit_path_scaling: samples must share one density");
        if (!(pt.mean_path > 0.0) || pt.n < 2)
            throw std::invalid_argument("fit_path_scaling: invalid sample");
    }

    std::vector<double> lnn(points.size()), lnl(points.size()), l(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        lnn[i] = std::log(static_cast<double>(points[i].n));
        lnl[i] = std::log(points[i].mean_path);
        l[i] = points[i].mean_path;
    }

    const Line power = linear_fit(lnn, lnl);  // ln l = delta ln N + ln(a / rho)
    const Line logalt = linear_fit(lnn, l);   // l = alpha ln N + beta

    double rss_power = 0.0, rss_log = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double pp = std::exp(power.intercept + power.slope * lnn[i]);
        const double pl = logalt.intercept + logalt.slope * lnn[i];
        rss_power += (l[i] - pp) * (l[i] - pp);
        rss_log += (l[i] - pl) * (l[i] - pl);
    }

    FitResult out;
    out.form = "path-scaling";
    out.parameters["delta"] = power.slope;
    out.parameters["amplitude"] = std::exp(power.intercept) * rho;
    out.parameters["rho"] = rho;
    out.parameters["log_alpha"] = logalt.slope;
    out.parameters["log_beta"] = logalt.intercept;
    out.parameters["rss_linear_power"] = rss_power;
    out.parameters["rss_linear_log"] = rss_log;
    out.residual = power.sse;
    out.domain_min = static_cast<double>(points.front().n);
    out.domain_max = static_cast<double>(points.back().n);
    for (const auto& pt : points) {
        out.domain_min = std::min(out.domain_min, static_cast<double>(pt.n));
        out.domain_max = std::max(out.domain_max, static_cast<double>(pt.n));
    }
    out.converged = std::isfinite(power.sse) && std::isfinite(logalt.sse);
    return out;
}

FitResult fit_clustering_power(const std::map<int, double>& ck, int k_min) {
    std::vector<double> lnk, lnc;
    int lo = 0, hi = 0;
    for (const auto& [k, c] : ck) {
        if (k < k_min || !(c > 0.0)) continue;
        if (lnk.empty()) lo = k;
        hi = k;
        lnk.push_back(std::log(static_cast<double>(k)));
        lnc.push_back(std::log(c));
    }
    if (lnk.size() < 3)
        throw std::invalid_argument("fit_clustering_power: need at least 3 nonzero bins");
    const Line fit = linear_fit(lnk, lnc);
    FitResult out;
    out.form = "clustering-power";
    out.parameters["slope"] = fit.slope;
    out.parameters["amplitude"] = std::exp(fit.intercept);
    out.residual = fit.sse;
    out.domain_min = lo;
    out.domain_max = hi;
    out.converged = std::isfinite(fit.sse);
    return out;
}

std::string fit_to_json(const FitResult& r) {
    nlohmann::json j;
    j["form"] = r.form;
    j["parameters"] = r.parameters;
    j["residual"] = r.residual;
    j["domain"] = {r.domain_min, r.domain_max};
    j["converged"] = r.converged;
    j["identifiable"] = r.identifiable;
    return j.dump(2) + "\n";
}

}  // namespace qnet
