#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <span>

#include "graphwave/grid.hpp"
#include "graphwave/params.hpp"

namespace graphwave {

using SparseMatrix = Eigen::SparseMatrix<double>;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

/// Discretized bilinear forms on the dofs of a grid (outer node removed).
/// Dof index of node i on edge j is j*(M-1) + i.
struct FormMatrices {
    SparseMatrix K;
    SparseMatrix Mmass;
    int dof_count = 0;
};

/// P1 finite-element assembly of
///   q(v) = ||v'||^2 + int V |v|^2 + (1/beta) |sum_j v_j(0)|^2
/// where V is the nodal potential (edge-major N x M, empty means zero),
/// integrated with the consistent linear-interpolant rule.
FormMatrices assemble_forms(const ModelParams& params, const Grid& grid,
                            std::span<const double> potential, bool include_vertex);

/// Lumped (row-sum) mass weights, one per dof.
RealVector lumped_mass(const Grid& grid);

/// Stiffness plus mass, the H^1 Gram matrix on dofs (no vertex term).
SparseMatrix h1_gram(const Grid& grid);

ComplexVector to_dofs(const GraphField& f);
GraphField from_dofs(const Grid& grid, const ComplexVector& v);

/// Simpson approximation of (sum_j int |f_j|^q)^{1/q}; q = infinity gives
/// the max modulus. Rejects q < 1.
double lp_norm(const GraphField& f, double q);

/// sum_j int |f_j'|^2, sixth-order differences and Simpson.
double derivative_norm_sq(const GraphField& f);

/// F_beta(f) = ||f'||^2 + (1/beta)|sum_j f_j(0)|^2.
double quadratic_form_F_beta(const GraphField& f, const ModelParams& params);

/// Real and imaginary parts sampled edge by edge.
GraphField real_field(const Grid& grid, std::span<const double> values);

}  // namespace graphwave
