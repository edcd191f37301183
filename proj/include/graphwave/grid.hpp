#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "graphwave/params.hpp"

namespace graphwave {

using Complex = std::complex<double>;

/// Uniform grid shared by all N truncated half-lines [0, L].
/// Node 0 of every edge sits at the vertex; node M-1 at the outer wall.
class Grid {
public:
    Grid(int edges, double length, int points_per_edge);

    int N() const { return N_; }
    double L() const { return L_; }
    int M() const { return M_; }
    double h() const { return h_; }
    double x(int i) const { return h_ * i; }

    /// Degrees of freedom of a form with the outer Dirichlet node removed.
    int dof_count() const { return N_ * (M_ - 1); }

    bool operator==(const Grid&) const = default;

private:
    int N_;
    double L_;
    int M_;
    double h_;
};

/// Grid whose truncation length keeps every critical profile of `params`
/// (and exp(-sqrt(omega) L)) below 1e-14 at the wall.
/// Requires points_per_edge >= 64.
Grid make_grid(const ModelParams& params, int points_per_edge);

/// Complex function on the star graph, stored edge-major (N x M).
/// Edges are independent: nothing ties values[j][0] across j.
class GraphField {
public:
    explicit GraphField(const Grid& grid);
    GraphField(const Grid& grid, std::vector<Complex> values);

    const Grid& grid() const { return grid_; }

    Complex& operator()(int edge, int i) { return values_[index(edge, i)]; }
    Complex operator()(int edge, int i) const { return values_[index(edge, i)]; }

    std::span<Complex> edge(int j) {
        return {values_.data() + static_cast<std::size_t>(j) * grid_.M(),
                static_cast<std::size_t>(grid_.M())};
    }
    std::span<const Complex> edge(int j) const {
        return {values_.data() + static_cast<std::size_t>(j) * grid_.M(),
                static_cast<std::size_t>(grid_.M())};
    }

    Complex vertex_value(int j) const { return (*this)(j, 0); }
    Complex vertex_sum() const;

    const std::vector<Complex>& values() const { return values_; }
    std::vector<Complex>& values() { return values_; }

    GraphField& operator*=(Complex c);
    GraphField& operator+=(const GraphField& other);
    GraphField& operator-=(const GraphField& other);

    /// Largest |Im| over all samples.
    double max_imag() const;
    double max_abs() const;

private:
    std::size_t index(int edge, int i) const {
        return static_cast<std::size_t>(edge) * grid_.M() + i;
    }

    Grid grid_;
    std::vector<Complex> values_;
};

GraphField operator*(Complex c, GraphField f);
GraphField operator+(GraphField a, const GraphField& b);
GraphField operator-(GraphField a, const GraphField& b);

}  // namespace graphwave
