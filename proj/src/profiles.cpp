#include "graphwave/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "graphwave/numerics.hpp"

namespace graphwave {

std::string to_string(const ProfileKind& kind) {
    return kind.symmetric ? std::string("symmetric") : "asymmetric(" + std::to_string(kind.k) + ")";
}

namespace {

double log_sech(double y) {
    const double ay = std::abs(y);
    return -ay + std::log(2.0) - std::log1p(std::exp(-2.0 * ay));
}

double tanh_scale(double p, double omega) { return 0.5 * (p - 1.0) * std::sqrt(omega); }

}  // namespace

double soliton_value(double p, double omega, double a, double x) {
    const double y = tanh_scale(p, omega) * (x + a);
    const double amp = 0.5 * (p + 1.0) * omega;
    return std::exp((std::log(amp) + 2.0 * log_sech(y)) / (p - 1.0));
}

double soliton_slope(double p, double omega, double a, double x) {
    const double y = tanh_scale(p, omega) * (x + a);
    return -std::sqrt(omega) * std::tanh(y) * soliton_value(p, omega, a, x);
}

std::function<double(double)> soliton_profile(double p, double omega, double a) {
    if (!(p > 1.0) || !(omega > 0.0)) throw PreconditionError("need p > 1 and omega > 0");
    return [p, omega, a](double x) { return soliton_value(p, omega, a, x); };
}

double offset_from_t(const ModelParams& params, double t) {
    const double sign = params.beta() > 0.0 ? 1.0 : -1.0;
    return -sign * numerics::safe_artanh(t) / tanh_scale(params.p(), params.omega());
}

namespace {

template <typename T>
T w_generic(double p, int N, int k, double a, T x) {
    const double kp1 = std::pow(static_cast<double>(k), p - 1.0);
    const double kp2 = std::pow(static_cast<double>(k), p + 1.0);
    const double nk = N - k;
    const T num = x * x * (a * a * kp1 - kp2) - 2.0 * a * nk * kp1 * x + nk * nk * kp1;
    const T den = std::pow(a * x - nk, p + 1.0);
    return num / den + x * x - 1.0;
}

double abs_beta_sqrt_omega(const ModelParams& params) {
    return std::abs(params.beta()) * std::sqrt(params.omega());
}

}  // namespace

double w_function(const ModelParams& params, int k, double x) {
    return w_generic<double>(params.p(), params.N(), k, abs_beta_sqrt_omega(params), x);
}

std::pair<double, double> t_system_residuals(const ModelParams& params, int k, TPair t) {
    const double p = params.p();
    auto f = [p](double s) { return std::pow(s, p - 1.0) - std::pow(s, p + 1.0); };
    const double a = abs_beta_sqrt_omega(params);
    return {std::abs(f(t.t1) - f(t.tN)),
            std::abs(k / t.t1 + (params.N() - k) / t.tN - a) / a};
}

TPair solve_t_system(const ModelParams& params, int k) {
    const int N = params.N();
    if (k < 1 || k > N - 1) throw PreconditionError("k must lie in 1..N-1");
    const double p = params.p();
    const double a = abs_beta_sqrt_omega(params);
    const double x0 = N / a;
    if (!(x0 < 1.0)) throw NoRootError("N/(|beta| sqrt(omega)) >= 1: no profile");
    auto w = [&](double x) { return w_function(params, k, x); };

    // Bracket facts: w(N/a) = 0, w'(N/a) < 0, w(1) > 0.
    const double w0 = w(x0);
    const double slope0 = ((p + 1.0) * N * N - a * a * (p - 1.0)) / (a * k);
    const double w1 = w(1.0);
    if (std::abs(w0) > 1e-10 * std::max(1.0, std::abs(slope0))) {
        throw NoRootError("w(N/a) does not vanish");
    }
    if (!(slope0 < 0.0) || !(w1 > 0.0)) {
        throw NoRootError("no asymmetric root: omega must exceed omega_star");
    }
    const double lo = x0 + 1e-9;
    if (!(w(lo) < 0.0)) throw NoRootError("w does not dip below zero past N/a");

    double x = numerics::bisect(w, lo, 1.0, 1e-15);
    // Newton polish with a complex-step derivative.
    for (int it = 0; it < 4; ++it) {
        constexpr double kStep = 1e-30;
        const auto wc = w_generic<std::complex<double>>(p, N, k, a, {x, kStep});
        const double dw = wc.imag() / kStep;
        if (dw == 0.0 || !std::isfinite(dw)) break;
        const double next = x - wc.real() / dw;
        if (!(next > lo && next <= 1.0)) break;
        x = next;
        if (std::abs(wc.real()) <= 1e-15) break;
    }
    TPair t{k / (a - (N - k) / x), x};
    const auto [r1, r2] = t_system_residuals(params, k, t);
    const double tmax = std::sqrt((p - 1.0) / (p + 1.0));
    if (r1 > 1e-12 || r2 > 1e-12 || !(t.t1 > 0.0 && t.t1 < tmax && tmax < t.tN && t.tN <= 1.0)) {
        throw NoRootError("asymmetric root failed verification");
    }
    return t;
}

ProfileSpec make_profile_spec(const ModelParams& params, const ProfileKind& kind) {
    if (!(params.omega() > params.omega_floor())) {
        throw PreconditionError("profiles need omega > N^2/beta^2");
    }
    ProfileSpec spec{params, kind};
    if (kind.symmetric) {
        const double t = params.N() / abs_beta_sqrt_omega(params);
        spec.t1 = spec.tN = t;
        // a_beta = -(2/((p-1)sqrt w)) artanh(N/(beta sqrt w))
        spec.a1 = spec.aN = -numerics::safe_artanh(params.N() / (params.beta() * std::sqrt(params.omega()))) /
                            tanh_scale(params.p(), params.omega());
        return spec;
    }
    if (kind.k < 1 || kind.k > params.N() - 1) throw PreconditionError("k must lie in 1..N-1");
    const auto t = solve_t_system(params, kind.k);
    spec.t1 = t.t1;
    spec.tN = t.tN;
    spec.a1 = offset_from_t(params, t.t1);
    spec.aN = offset_from_t(params, t.tN);
    return spec;
}

GraphField sample_profile(const ProfileSpec& spec, const Grid& grid) {
    GraphField f(grid);
    const double p = spec.params.p();
    const double w = spec.params.omega();
    for (int j = 0; j < grid.N(); ++j) {
        const double a = spec.offset(j);
        for (int i = 0; i < grid.M(); ++i) f(j, i) = soliton_value(p, w, a, grid.x(i));
    }
    return f;
}

CriticalPoint build_critical_point(const ModelParams& params, const ProfileKind& kind,
                                   int points_per_edge) {
    auto spec = make_profile_spec(params, kind);
    const Grid grid = make_grid(params, points_per_edge);
    return {spec, sample_profile(spec, grid)};
}

StationarityReport stationarity_check(const GraphField& f, const ModelParams& params) {
    const Grid& grid = f.grid();
    if (grid.N() != params.N()) throw PreconditionError("field edge count differs");
    const double h = grid.h();
    const double p = params.p();
    const double w = params.omega();
    StationarityReport r;
    std::vector<double> re(grid.M());
    double first_slope = 0.0;
    for (int j = 0; j < grid.N(); ++j) {
        const auto e = f.edge(j);
        for (int i = 0; i < grid.M(); ++i) re[i] = e[i].real();
        for (int i = 1; i + 1 < grid.M(); ++i) {
            const double d2 = (re[i + 1] - 2.0 * re[i] + re[i - 1]) / (h * h);
            const double u = re[i];
            const double res = -d2 + w * u - std::pow(std::abs(u), p - 1.0) * u;
            r.interior = std::max(r.interior, std::abs(res));
        }
        const double slope = numerics::derivative_at_start(re, h);
        if (j == 0) first_slope = slope;
        r.slope_mismatch = std::max(r.slope_mismatch, std::abs(slope - first_slope));
    }
    r.vertex_balance = std::abs(f.vertex_sum().real() - params.beta() * first_slope);
    return r;
}

double compute_beta_star(double p, double omega, int N) {
    ModelParams::make(p, omega, -1.0, N);
    const double alpha = 2.0 / (p - 1.0);
    const double full = numerics::power_of_one_minus_t2(alpha, 0.0);
    auto g = [&](double u) { return N * numerics::power_of_one_minus_t2(alpha, u) - full; };
    const double u = numerics::bisect(g, 0.0, 1.0, 1e-15);
    return -N / (u * std::sqrt(omega));
}

}  // namespace graphwave
