#pragma once

#include <functional>
#include <string>

#include "graphwave/grid.hpp"
#include "graphwave/params.hpp"

namespace graphwave {

/// Which member of the critical family: the symmetric profile phi_beta,
/// or phi_k with k edges on the small tanh-parameter t1.
struct ProfileKind {
    bool symmetric = true;
    int k = 0;

    static ProfileKind Symmetric() { return {true, 0}; }
    static ProfileKind Asymmetric(int k) { return {false, k}; }

    bool operator==(const ProfileKind&) const = default;
};

std::string to_string(const ProfileKind& kind);

struct ProfileSpec {
    ModelParams params;
    ProfileKind kind;
    double t1 = 0.0;
    double tN = 0.0;
    double a1 = 0.0;
    double aN = 0.0;

    /// Edges carrying offset a1 (all N for the symmetric profile).
    int first_count() const { return kind.symmetric ? params.N() : kind.k; }
    double offset(int edge) const { return edge < first_count() ? a1 : aN; }
};

/// {((p+1)w/2) sech^2(((p-1)sqrt(w)/2)(x+a))}^{1/(p-1)}
double soliton_value(double p, double omega, double a, double x);
/// d/dx of soliton_value: -sqrt(w) tanh(((p-1)sqrt(w)/2)(x+a)) times the value.
double soliton_slope(double p, double omega, double a, double x);
std::function<double(double)> soliton_profile(double p, double omega, double a);

/// Offset for tanh-parameter t: -sign(beta) (2/((p-1)sqrt(w))) artanh(t).
double offset_from_t(const ModelParams& params, double t);

/// The function w(x) whose root in (N/a, 1] is t_N, a = |beta| sqrt(w).
double w_function(const ModelParams& params, int k, double x);

struct TPair {
    double t1;
    double tN;
};

/// Solves the two-line system for the asymmetric profile with k edges on t1.
/// Throws NoRootError when the bracket (N/a + 1e-9, 1] fails.
TPair solve_t_system(const ModelParams& params, int k);

/// Residuals of both lines of the system at (t1, tN).
std::pair<double, double> t_system_residuals(const ModelParams& params, int k, TPair t);

ProfileSpec make_profile_spec(const ModelParams& params, const ProfileKind& kind);

/// Samples the profile of `spec` on `grid`.
GraphField sample_profile(const ProfileSpec& spec, const Grid& grid);

struct CriticalPoint {
    ProfileSpec spec;
    GraphField field;
};

CriticalPoint build_critical_point(const ModelParams& params, const ProfileKind& kind,
                                   int points_per_edge = 2048);

struct StationarityReport {
    double interior = 0.0;       // max |-f'' + w f - |f|^{p-1} f| off the ends
    double slope_mismatch = 0.0; // max_j |f_j'(0) - f_1'(0)|
    double vertex_balance = 0.0; // |sum_j f_j(0) - beta f_1'(0)|
};

StationarityReport stationarity_check(const GraphField& f, const ModelParams& params);

/// The negative coupling beta* below which the symmetric action exceeds
/// the half-line value.
double compute_beta_star(double p, double omega, int N);

}  // namespace graphwave
