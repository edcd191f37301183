#pragma once

#include <optional>
#include <string>
#include <vector>

#include "graphwave/forms.hpp"
#include "graphwave/profiles.hpp"

namespace graphwave {

enum class Which { L1, L2 };

/// Quadratic forms of L1 (potential w - p phi^{p-1}) and L2 (w - phi^{p-1}),
/// vertex term included, on quadratic (P2) elements over the grid of
/// make_grid. Each edge carries 2(M-1) dofs ordered node 0, midpoint 0,
/// node 1, ...; the outer node is removed. Dof 0 of edge j sits at the vertex.
struct OperatorPair {
    FormMatrices K1;
    FormMatrices K2;  // K2.Mmass == K1.Mmass
    ProfileSpec profile;
    Grid grid;
    RealVector phi;  // profile interpolated at the dofs
    int dofs_per_edge = 0;
};

OperatorPair assemble_operator_pair(const ProfileSpec& spec, int points_per_edge = 512);

/// 10 h^2: the near-kernel tolerance.
double kernel_tolerance(const Grid& grid);

struct SpectralReport {
    int n1 = 0;
    int n2 = 0;
    std::optional<int> ker1_dim;
    std::optional<int> ker2_dim;
    std::vector<double> eigen1;  // located negative eigenvalues (shooting only)
    std::vector<double> eigen2;
    std::string method;
};

struct ShootValue {
    bool pole = false;
    double F = 0.0;   // u'/u at the vertex
    double u = 0.0;   // normalized pair at the vertex, positive multiple of
    double du = 0.0;  // the decaying solution
};

/// Decaying solution of -u'' + w u - c((p+1)w/2) sech^2(((p-1)sqrt(w)/2) x) u = lambda u
/// (c = p for L1, 1 for L2) integrated by RK4 from the tail back to x = a.
ShootValue shoot_log_derivative(double lambda, double a, Which which, const ModelParams& params);

/// Lower end of the lambda scan, below the bottom of both wells.
double lambda_min(const ModelParams& params);

SpectralReport morse_by_shooting(const ProfileSpec& spec);

/// Inertia of the assembled forms.
SpectralReport morse_by_inertia(const ProfileSpec& spec, int points_per_edge = 512);

struct KernelReport {
    int ker1_dim = 0;
    int ker2_dim = 0;
    double overlap2 = 0.0;  // |<x, phi>_M| / (|x|_M |phi|_M) for the L2 near-kernel vector
    std::vector<double> smallest1;  // generalized eigenvalues of smallest modulus
    std::vector<double> smallest2;
    double tolerance = 0.0;
};

KernelReport kernel_report(const ProfileSpec& spec, int points_per_edge = 512);

/// Lowest `count` generalized eigenvalues (by modulus) and M-orthonormal vectors.
struct EigenPairs {
    RealVector values;
    Eigen::MatrixXd vectors;
};
EigenPairs smallest_eigenpairs(const SparseMatrix& K, const SparseMatrix& M, int count);

/// Number of negative pivots of K (Sylvester inertia).
int negative_count(const SparseMatrix& K);

struct UnstableMode {
    Complex lambda;    // Re lambda > 0
    int multiplicity;  // from edge-permutation symmetry
};

/// Growth rates of the linearized flow with Re lambda > 0.
std::vector<UnstableMode> unstable_modes(const ProfileSpec& spec, int points_per_edge = 256);

/// All mu = -lambda^2 of the linearization (one copy per sector eigenvalue).
std::vector<Complex> linearization_mu(const ProfileSpec& spec, int points_per_edge = 256);

/// Total count of unstable modes with multiplicity and Re lambda > threshold.
int count_modes(const std::vector<UnstableMode>& modes, double threshold = 0.0);

/// n(P L1 P) - n(P L2^{-1} P) with P the projection off the profile.
int grillakis_lower_bound(const ProfileSpec& spec, int points_per_edge = 512);

}  // namespace graphwave
