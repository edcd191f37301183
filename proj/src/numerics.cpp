#include "graphwave/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "graphwave/params.hpp"

namespace graphwave::numerics {

double safe_artanh(double t) {
    constexpr double kEdge = 1.0 - 1e-15;
    t = std::clamp(t, -kEdge, kEdge);
    return 0.5 * std::log((1.0 + t) / (1.0 - t));
}

double sech(double x) {
    const double ax = std::abs(x);
    if (ax > 350.0) return 0.0;
    const double e = std::exp(-ax);
    return 2.0 * e / (1.0 + e * e);
}

std::vector<double> fd_weights(double z, std::span<const double> nodes, int order) {
    const int n = static_cast<int>(nodes.size());
    std::vector<std::vector<double>> c(n, std::vector<double>(order + 1, 0.0));
    double c1 = 1.0;
    double c4 = nodes[0] - z;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, order);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = nodes[i] - z;
        for (int j = 0; j < i; ++j) {
            const double c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) {
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) {
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = c[i][order];
    return w;
}

namespace {

constexpr int kStencil = 7;

// Weights (in units of 1/h) for the first derivative at sample `at`
// of a seven-point window starting at sample 0.
const std::vector<double>& window_weights(int at) {
    static const auto table = [] {
        std::vector<std::vector<double>> t;
        std::vector<double> nodes(kStencil);
        for (int i = 0; i < kStencil; ++i) nodes[i] = i;
        for (int at = 0; at < kStencil; ++at) {
            t.push_back(fd_weights(at, nodes, 1));
        }
        return t;
    }();
    return table[at];
}

}  // namespace

std::vector<double> derivative(std::span<const double> f, double h) {
    const int n = static_cast<int>(f.size());
    if (n < kStencil) {
        throw PreconditionError("derivative needs at least 7 samples");
    }
    std::vector<double> d(n);
    for (int i = 0; i < n; ++i) {
        int start = i - 3;
        start = std::clamp(start, 0, n - kStencil);
        const auto& w = window_weights(i - start);
        double acc = 0.0;
        for (int k = 0; k < kStencil; ++k) acc += w[k] * f[start + k];
        d[i] = acc / h;
    }
    return d;
}

double derivative_at_start(std::span<const double> f, double h) {
    if (f.size() < static_cast<std::size_t>(kStencil)) {
        throw PreconditionError("derivative needs at least 7 samples");
    }
    const auto& w = window_weights(0);
    double acc = 0.0;
    for (int k = 0; k < kStencil; ++k) acc += w[k] * f[k];
    return acc / h;
}

std::vector<double> simpson_weights(int n, double h) {
    if (n < 3) throw PreconditionError("Simpson needs at least 3 samples");
    std::vector<double> w(n, 0.0);
    const int intervals = n - 1;
    int simpson_end = intervals;  // last sample index covered by 1/3 rule
    if (intervals % 2 == 1) {
        if (n < 4) throw PreconditionError("Simpson needs at least 4 samples");
        simpson_end = intervals - 3;
        const double c = 3.0 * h / 8.0;
        w[simpson_end] += c;
        w[simpson_end + 1] += 3.0 * c;
        w[simpson_end + 2] += 3.0 * c;
        w[simpson_end + 3] += c;
    }
    for (int i = 0; i + 2 <= simpson_end; i += 2) {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
    }
    return w;
}

std::vector<double> gregory_weights(int n, double h) {
    if (n < 10) return simpson_weights(n, h);
    constexpr double g[4] = {1.0 / 12.0, 1.0 / 24.0, 19.0 / 720.0, 3.0 / 160.0};
    std::vector<double> w(n, h);
    w[0] = w[n - 1] = 0.5 * h;
    for (int k = 1; k <= 4; ++k) {
        double binom = 1.0;
        for (int i = 0; i <= k; ++i) {
            // forward difference at the left end, backward at the right
            const double left = ((k + 1) % 2 == 0 ? 1.0 : -1.0) * g[k - 1] * ((k - i) % 2 == 0 ? 1.0 : -1.0);
            const double right = -g[k - 1] * (i % 2 == 0 ? 1.0 : -1.0);
            w[i] += h * left * binom;
            w[n - 1 - i] += h * right * binom;
            binom = binom * (k - i) / (i + 1);
        }
    }
    return w;
}

double integrate_samples(std::span<const double> f, double h) {
    const auto w = gregory_weights(static_cast<int>(f.size()), h);
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += w[i] * f[i];
    return acc;
}

namespace {

double simpson_recurse(const std::function<double(double)>& f, double a, double b,
                       double fa, double fm, double fb, double whole, double tol,
                       int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth) {
    if (a == b) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_recurse(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

double power_of_one_minus_t2(double alpha, double lo, double tol) {
    if (!(alpha > -1.0)) throw PreconditionError("exponent must exceed -1");
    if (lo >= 1.0) return 0.0;
    if (lo <= -1.0) throw PreconditionError("lower limit must exceed -1");
    if (lo < 0.0) {
        // even integrand
        return 2.0 * power_of_one_minus_t2(alpha, 0.0, 0.5 * tol) -
               power_of_one_minus_t2(alpha, -lo, 0.5 * tol);
    }
    constexpr double kSplit = 1e-8;
    auto g = [alpha](double t) { return std::pow(std::max(0.0, 1.0 - t * t), alpha); };
    // (1-t^2)^a = (1-t)^a (1+t)^a ~ 2^a (1-t)^a near t = 1
    auto tail = [alpha](double from) {
        const double d = 1.0 - from;
        return std::pow(2.0, alpha) * std::pow(d, alpha + 1.0) / (alpha + 1.0) *
               (1.0 - alpha * (alpha + 1.0) / (2.0 * (alpha + 2.0)) * d);
    };
    const double split = 1.0 - kSplit;
    if (alpha < 0.0) {
        // t = 1 - u^{1/gam}, gam = alpha + 1: integrand becomes (2 - u^{1/gam})^alpha / gam
        const double gam = alpha + 1.0;
        auto h = [alpha, gam](double u) { return std::pow(2.0 - std::pow(u, 1.0 / gam), alpha) / gam; };
        return adaptive_simpson(h, 0.0, std::pow(1.0 - lo, gam), tol);
    }
    if (lo >= split) return tail(lo);
    return adaptive_simpson(g, lo, split, tol) + tail(split);
}

double bisect(const std::function<double(double)>& f, double a, double b, double xtol,
              int max_iter) {
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (!std::isfinite(fa) || !std::isfinite(fb) || (fa > 0.0) == (fb > 0.0)) {
        throw NoRootError("no sign change on [" + std::to_string(a) + ", " +
                          std::to_string(b) + "]");
    }
    for (int it = 0; it < max_iter && std::abs(b - a) > xtol; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fm > 0.0) == (fa > 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace graphwave::numerics
