#include "graphwave/functionals.hpp"

#include <algorithm>
#include <cmath>

#include "graphwave/forms.hpp"
#include "graphwave/numerics.hpp"

namespace graphwave {

namespace {

double prefactor(double p) { return std::pow(0.5 * (p + 1.0), 2.0 / (p - 1.0)); }

}  // namespace

FunctionalReport evaluate(const GraphField& f, const ModelParams& params) {
    const double p = params.p();
    const double w = params.omega();
    FunctionalReport r;
    r.grad_sq = derivative_norm_sq(f);
    const double vertex = std::norm(f.vertex_sum()) / params.beta();
    r.F = r.grad_sq + vertex;
    const double l2 = lp_norm(f, 2.0);
    r.Q = l2 * l2;
    r.power = std::pow(lp_norm(f, p + 1.0), p + 1.0);
    r.S = 0.5 * r.F + 0.5 * w * r.Q - r.power / (p + 1.0);
    r.I = r.F + w * r.Q - r.power;
    r.E = 0.5 * r.F - r.power / (p + 1.0);
    r.P = r.grad_sq + 0.5 * vertex - (p - 1.0) / (2.0 * (p + 1.0)) * r.power;
    return r;
}

double virial_functional(const GraphField& f, const ModelParams& params, bool include_nonlinear) {
    const double p = params.p();
    double P = derivative_norm_sq(f) + 0.5 * std::norm(f.vertex_sum()) / params.beta();
    if (include_nonlinear) {
        P -= (p - 1.0) / (2.0 * (p + 1.0)) * std::pow(lp_norm(f, p + 1.0), p + 1.0);
    }
    return P;
}

double d_infinity(double p, double omega) {
    ModelParams::make(p, omega, 1.0, 2);
    const double integral = numerics::power_of_one_minus_t2(2.0 / (p - 1.0), 0.0);
    return 0.5 * prefactor(p) * std::pow(omega, (p + 3.0) / (2.0 * (p - 1.0))) * integral;
}

double symmetric_action_closed_form(const ModelParams& params) {
    if (!(params.omega() > params.omega_floor())) {
        throw PreconditionError("symmetric profile needs omega > N^2/beta^2");
    }
    const double p = params.p();
    const double w = params.omega();
    // signed limit: for beta > 0 the peak sits inside the edge and the range covers it
    const double lo = -params.N() / (params.beta() * std::sqrt(w));
    const double integral = numerics::power_of_one_minus_t2(2.0 / (p - 1.0), lo);
    return 0.5 * params.N() * prefactor(p) * std::pow(w, (p + 3.0) / (2.0 * (p - 1.0))) * integral;
}

double symmetric_mass_closed_form(const ModelParams& params) {
    if (!(params.omega() > params.omega_floor())) {
        throw PreconditionError("symmetric profile needs omega > N^2/beta^2");
    }
    const double p = params.p();
    const double w = params.omega();
    const double alpha = 2.0 / (p - 1.0);
    const double lo = -params.N() / (params.beta() * std::sqrt(w));
    const double integral = numerics::power_of_one_minus_t2(alpha - 1.0, lo);
    return params.N() * prefactor(p) * std::pow(w, alpha - 0.5) * (2.0 / (p - 1.0)) * integral;
}

std::pair<double, GraphField> nehari_rescale(const GraphField& f, const ModelParams& params) {
    const auto r = evaluate(f, params);
    if (!(r.power > 0.0)) throw PreconditionError("nehari_rescale needs a nonzero field");
    const double quad = r.F + params.omega() * r.Q;
    if (!(quad > 0.0)) throw PreconditionError("F_beta + omega Q must be positive");
    const double lambda = std::pow(quad / r.power, 1.0 / (params.p() - 1.0));
    return {lambda, Complex(lambda) * f};
}

std::vector<RankEntry> rank_critical_points(const ModelParams& params, int points_per_edge) {
    if (!(params.omega() > params.omega_star())) {
        throw PreconditionError("ranking needs omega > omega_star");
    }
    std::vector<RankEntry> out;
    for (int k = 1; k < params.N(); ++k) {
        const auto cp = build_critical_point(params, ProfileKind::Asymmetric(k), points_per_edge);
        out.push_back({cp.spec.kind, evaluate(cp.field, params).S});
    }
    const auto cp = build_critical_point(params, ProfileKind::Symmetric(), points_per_edge);
    out.push_back({cp.spec.kind, evaluate(cp.field, params).S});
    std::stable_sort(out.begin(), out.end(),
                     [](const RankEntry& a, const RankEntry& b) { return a.S < b.S; });
    return out;
}

double slope_J1(const ModelParams& params) {
    const double p = params.p();
    const double u = -params.N() / (params.beta() * std::sqrt(params.omega()));
    const double e = (3.0 - p) / (p - 1.0);
    const double G = numerics::power_of_one_minus_t2(e, u);
    return (5.0 - p) / (p - 1.0) * G + u * std::pow(1.0 - u * u, e);
}

SlopeReport mass_slope(const ModelParams& params) {
    if (!(params.omega() > params.omega_floor())) {
        throw PreconditionError("slope needs omega > N^2/beta^2");
    }
    const double p = params.p();
    const double w = params.omega();
    SlopeReport r;
    r.J1 = slope_J1(params);
    if (params.beta() > 0.0) {
        const double C = params.N() / (p - 1.0) * prefactor(p);
        r.J = C * std::pow(w, (7.0 - 3.0 * p) / (2.0 * (p - 1.0))) * r.J1;
    } else {
        // Outside the proposition: central difference of the closed-form mass.
        r.in_proposition = false;
        const double dw = 1e-4 * std::min(w, w - params.omega_floor());
        r.J = (symmetric_mass_closed_form(params.with_omega(w + dw)) -
               symmetric_mass_closed_form(params.with_omega(w - dw))) /
              (2.0 * dw);
    }
    if (params.beta() > 0.0 && p > 3.0 && p < 5.0) {
        const double floor = params.omega_floor();
        auto j1 = [&](double om) { return slope_J1(params.with_omega(om)); };
        const double lo = floor * (1.0 + 1e-9);
        const double hi = 1e6 * floor;
        const double flo = j1(lo);
        const double fhi = j1(hi);
        if (std::isfinite(flo) && (flo > 0.0) != (fhi > 0.0)) {
            r.omega_star = numerics::bisect(j1, lo, hi, 1e-12 * floor);
        }
    }
    return r;
}

double omega3_residual(double p, int N, double xi) {
    const double alpha = 2.0 / (p - 1.0);
    return 0.5 * (p - 5.0) * N * numerics::power_of_one_minus_t2(alpha, xi) -
           xi * std::pow(1.0 - xi * xi, alpha);
}

Omega3 omega3(double p, int N, double beta) {
    if (!(p > 5.0)) throw PreconditionError("omega3 needs p > 5");
    if (!(beta < 0.0)) throw PreconditionError("omega3 needs beta < 0");
    ModelParams::make(p, 1.0, beta, N);
    auto g = [&](double xi) { return omega3_residual(p, N, xi); };
    const double lo = 1e-6;
    const double hi = 1.0 - 1e-6;
    if (!(g(lo) > 0.0) || !(g(hi) < 0.0)) throw NoRootError("omega3 bracket has no sign change");
    const double xi = numerics::bisect(g, lo, hi, 1e-15);
    return {xi, static_cast<double>(N) * N / (beta * beta * xi * xi)};
}

}  // namespace graphwave
