#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "graphwave/grid.hpp"
#include "graphwave/params.hpp"
#include "graphwave/profiles.hpp"

namespace graphwave {

struct FunctionalReport {
    double S = 0.0;  // action
    double I = 0.0;  // Nehari functional
    double E = 0.0;  // energy
    double Q = 0.0;  // charge ||f||_2^2
    double P = 0.0;  // virial functional ||f'||^2 + |sum f(0)|^2/(2 beta) - ...
    double F = 0.0;  // F_beta(f)
    double grad_sq = 0.0;  // ||f'||_2^2
    double power = 0.0;    // ||f||_{p+1}^{p+1}
};

FunctionalReport evaluate(const GraphField& f, const ModelParams& params);

/// The nonlinear part of P, weight (p-1)/(2(p+1)), can be dropped for
/// checks of the linear flow.
double virial_functional(const GraphField& f, const ModelParams& params,
                         bool include_nonlinear = true);

double d_infinity(double p, double omega);

/// Closed-form action of the symmetric profile. The integral starts at
/// -N/(beta sqrt(w)), so it also covers beta > 0.
double symmetric_action_closed_form(const ModelParams& params);

/// Closed-form charge ||phi_beta||_2^2 of the symmetric profile.
double symmetric_mass_closed_form(const ModelParams& params);

/// lambda1 with I(lambda1 f) = 0, and the rescaled field.
std::pair<double, GraphField> nehari_rescale(const GraphField& f, const ModelParams& params);

struct RankEntry {
    ProfileKind kind;
    double S;
};

/// All N critical points sorted by ascending action.
std::vector<RankEntry> rank_critical_points(const ModelParams& params,
                                            int points_per_edge = 2048);

struct SlopeReport {
    double J = 0.0;
    double J1 = 0.0;
    std::optional<double> omega_star;
    bool in_proposition = true;  // false for beta < 0 (numerical slope only)
};

/// d/d omega of ||phi_beta||^2.
SlopeReport mass_slope(const ModelParams& params);

/// J1(omega) for the symmetric profile.
double slope_J1(const ModelParams& params);

struct Omega3 {
    double xi;
    double omega3;
};

double omega3_residual(double p, int N, double xi);
Omega3 omega3(double p, int N, double beta);

}  // namespace graphwave
