#include "graphwave/forms.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "graphwave/numerics.hpp"

namespace graphwave {

namespace {

using Triplet = Eigen::Triplet<double>;

int dof(const Grid& grid, int edge, int i) { return edge * (grid.M() - 1) + i; }

FormMatrices assemble_p1(const Grid& grid, std::span<const double> potential,
                         bool include_vertex, double vertex_coef) {
    const int N = grid.N();
    const int M = grid.M();
    const bool has_potential = !potential.empty();
    if (has_potential && potential.size() != static_cast<std::size_t>(N) * M) {
        throw PreconditionError("potential shape does not match grid");
    }
    const double h = grid.h();
    const int n = grid.dof_count();
    std::vector<Triplet> kt;
    std::vector<Triplet> mt;
    kt.reserve(static_cast<std::size_t>(N) * M * 4 + N * N);
    mt.reserve(static_cast<std::size_t>(N) * M * 4);
    for (int j = 0; j < N; ++j) {
        for (int e = 0; e < M - 1; ++e) {
            const int nodes[2] = {e, e + 1};
            double ke[2][2] = {{1.0 / h, -1.0 / h}, {-1.0 / h, 1.0 / h}};
            const double me[2][2] = {{h / 3.0, h / 6.0}, {h / 6.0, h / 3.0}};
            if (has_potential) {
                const double v0 = potential[static_cast<std::size_t>(j) * M + e];
                const double v1 = potential[static_cast<std::size_t>(j) * M + e + 1];
                ke[0][0] += h / 12.0 * (3.0 * v0 + v1);
                ke[0][1] += h / 12.0 * (v0 + v1);
                ke[1][0] += h / 12.0 * (v0 + v1);
                ke[1][1] += h / 12.0 * (v0 + 3.0 * v1);
            }
            for (int a = 0; a < 2; ++a) {
                if (nodes[a] == M - 1) continue;
                for (int b = 0; b < 2; ++b) {
                    if (nodes[b] == M - 1) continue;
                    kt.emplace_back(dof(grid, j, nodes[a]), dof(grid, j, nodes[b]), ke[a][b]);
                    mt.emplace_back(dof(grid, j, nodes[a]), dof(grid, j, nodes[b]), me[a][b]);
                }
            }
        }
    }
    if (include_vertex) {
        const double c = vertex_coef;
        for (int j = 0; j < N; ++j) {
            for (int l = 0; l < N; ++l) kt.emplace_back(dof(grid, j, 0), dof(grid, l, 0), c);
        }
    }
    FormMatrices out;
    out.dof_count = n;
    out.K.resize(n, n);
    out.K.setFromTriplets(kt.begin(), kt.end());
    out.Mmass.resize(n, n);
    out.Mmass.setFromTriplets(mt.begin(), mt.end());
    return out;
}

}  // namespace

FormMatrices assemble_forms(const ModelParams& params, const Grid& grid,
                            std::span<const double> potential, bool include_vertex) {
    if (grid.N() != params.N()) throw PreconditionError("grid edge count differs from params");
    return assemble_p1(grid, potential, include_vertex, 1.0 / params.beta());
}

RealVector lumped_mass(const Grid& grid) {
    const int M = grid.M();
    const double h = grid.h();
    RealVector w(grid.dof_count());
    for (int j = 0; j < grid.N(); ++j) {
        for (int i = 0; i < M - 1; ++i) w[dof(grid, j, i)] = (i == 0) ? 0.5 * h : h;
    }
    return w;
}

SparseMatrix h1_gram(const Grid& grid) {
    const auto forms = assemble_p1(grid, {}, false, 0.0);
    return forms.K + forms.Mmass;
}

ComplexVector to_dofs(const GraphField& f) {
    const Grid& grid = f.grid();
    ComplexVector v(grid.dof_count());
    for (int j = 0; j < grid.N(); ++j) {
        for (int i = 0; i < grid.M() - 1; ++i) v[dof(grid, j, i)] = f(j, i);
    }
    return v;
}

GraphField from_dofs(const Grid& grid, const ComplexVector& v) {
    if (v.size() != grid.dof_count()) throw PreconditionError("dof vector size mismatch");
    GraphField f(grid);
    for (int j = 0; j < grid.N(); ++j) {
        for (int i = 0; i < grid.M() - 1; ++i) f(j, i) = v[dof(grid, j, i)];
    }
    return f;
}

double lp_norm(const GraphField& f, double q) {
    if (std::isinf(q) && q > 0) return f.max_abs();
    if (!(q >= 1.0)) throw PreconditionError("lp_norm needs q >= 1");
    const Grid& grid = f.grid();
    const auto w = numerics::gregory_weights(grid.M(), grid.h());
    double acc = 0.0;
    for (int j = 0; j < grid.N(); ++j) {
        const auto e = f.edge(j);
        for (int i = 0; i < grid.M(); ++i) acc += w[i] * std::pow(std::abs(e[i]), q);
    }
    return std::pow(acc, 1.0 / q);
}

double derivative_norm_sq(const GraphField& f) {
    const Grid& grid = f.grid();
    const auto w = numerics::gregory_weights(grid.M(), grid.h());
    std::vector<double> re(grid.M());
    std::vector<double> im(grid.M());
    double acc = 0.0;
    for (int j = 0; j < grid.N(); ++j) {
        const auto e = f.edge(j);
        for (int i = 0; i < grid.M(); ++i) {
            re[i] = e[i].real();
            im[i] = e[i].imag();
        }
        const auto dr = numerics::derivative(re, grid.h());
        const auto di = numerics::derivative(im, grid.h());
        for (int i = 0; i < grid.M(); ++i) acc += w[i] * (dr[i] * dr[i] + di[i] * di[i]);
    }
    return acc;
}

double quadratic_form_F_beta(const GraphField& f, const ModelParams& params) {
    if (f.grid().N() != params.N()) throw PreconditionError("field edge count differs");
    return derivative_norm_sq(f) + std::norm(f.vertex_sum()) / params.beta();
}

GraphField real_field(const Grid& grid, std::span<const double> values) {
    if (values.size() != static_cast<std::size_t>(grid.N()) * grid.M()) {
        throw PreconditionError("sample count does not match grid");
    }
    std::vector<Complex> c(values.begin(), values.end());
    return GraphField(grid, std::move(c));
}

}  // namespace graphwave
