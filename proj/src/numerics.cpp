#include "latheat/numerics.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace latheat {

double simpson_integral(std::span<const double> g, double dt) {
    if (g.size() < 3 || g.size() % 2 == 0)
        throw invalid_input("simpson_integral: need an odd sample count (even panels)");
    double acc = g.front() + g.back();
    for (std::size_t i = 1; i + 1 < g.size(); ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * g[i];
    return acc * dt / 3.0;
}

std::vector<double> cumulative_integral(std::span<const double> g, double dt) {
    if (g.size() < 3 || g.size() % 2 == 0)
        throw invalid_input("cumulative_integral: need an odd sample count (even steps)");
    std::vector<double> c(g.size(), 0.0);
    for (std::size_t i = 0; i + 2 < g.size(); i += 2) {
        c[i + 1] = c[i] + dt / 12.0 * (5.0 * g[i] + 8.0 * g[i + 1] - g[i + 2]);
        c[i + 2] = c[i] + dt / 3.0 * (g[i] + 4.0 * g[i + 1] + g[i + 2]);
    }
    return c;
}

namespace {

GaussRule make_gauss_rule(int order) {
    GaussRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    for (int i = 0; i < (order + 1) / 2; ++i) {
        // Chebyshev-angle initial guess, Newton on P_order.
        double x = std::cos(kPi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[order - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[order - 1 - i] = w;
    }
    return rule;
}

} // namespace

const GaussRule& gauss_rule(int order) {
    static std::mutex mtx;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, make_gauss_rule(order)).first;
    return it->second;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw invalid_input("fit_line: need at least two matched points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw invalid_input("fit_line: degenerate abscissa");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss += r * r;
        fit.max_abs_residual = std::max(fit.max_abs_residual, std::abs(r));
    }
    if (x.size() > 2) fit.slope_stderr = std::sqrt(ss / (n - 2.0) / sxx);
    return fit;
}

LinearFit fit_loglog_tail(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw invalid_input("fit_loglog_tail: need at least two matched points");
    const std::size_t keep = std::max<std::size_t>(2, (x.size() + 1) / 2);
    const std::size_t from = x.size() - keep;
    std::vector<double> lx, ly;
    lx.reserve(keep);
    ly.reserve(keep);
    for (std::size_t i = from; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw invalid_input("fit_loglog_tail: nonpositive data");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    return fit_line(lx, ly);
}

} // namespace latheat
