#include "graphwave/grid.hpp"

#include <algorithm>
#include <cmath>

#include "graphwave/numerics.hpp"

namespace graphwave {

Grid::Grid(int edges, double length, int points_per_edge)
    : N_(edges), L_(length), M_(points_per_edge), h_(0.0) {
    if (edges < 1) throw PreconditionError("grid needs at least one edge");
    if (points_per_edge < 3) throw PreconditionError("grid needs M >= 3");
    if (!(length > 0.0) || !std::isfinite(length)) {
        throw PreconditionError("grid length must be finite and positive");
    }
    h_ = L_ / (M_ - 1);
}

Grid make_grid(const ModelParams& params, int points_per_edge) {
    if (points_per_edge < 64) throw PreconditionError("make_grid needs M >= 64");
    const double p = params.p();
    const double sw = std::sqrt(params.omega());
    const double a = std::abs(params.beta()) * sw;
    const double tmax = std::sqrt((p - 1.0) / (p + 1.0));
    double t_guess = tmax;
    if (params.omega() > params.omega_floor()) {
        const double s = 1.0 / a;
        const double f = std::pow(s, p - 1.0) - std::pow(s, p + 1.0);
        t_guess = std::max({params.N() / a, std::sqrt(std::max(0.0, 1.0 - f)), tmax});
    }
    const double raw =
        2.0 / ((p - 1.0) * sw) * numerics::safe_artanh(std::min(t_guess, 1.0)) + 35.0 / sw;
    const double L = std::ceil(raw * 2.0) / 2.0;
    if (!(std::exp(-sw * L) < 1e-14)) {
        throw PreconditionError("truncation length misses the tail bound");
    }
    return Grid(params.N(), L, points_per_edge);
}

GraphField::GraphField(const Grid& grid)
    : grid_(grid), values_(static_cast<std::size_t>(grid.N()) * grid.M()) {}

GraphField::GraphField(const Grid& grid, std::vector<Complex> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != static_cast<std::size_t>(grid.N()) * grid.M()) {
        throw PreconditionError("field size does not match grid");
    }
}

Complex GraphField::vertex_sum() const {
    Complex s = 0.0;
    for (int j = 0; j < grid_.N(); ++j) s += vertex_value(j);
    return s;
}

GraphField& GraphField::operator*=(Complex c) {
    for (auto& v : values_) v *= c;
    return *this;
}

GraphField& GraphField::operator+=(const GraphField& other) {
    if (!(other.grid_ == grid_)) throw PreconditionError("grid mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

GraphField& GraphField::operator-=(const GraphField& other) {
    if (!(other.grid_ == grid_)) throw PreconditionError("grid mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

double GraphField::max_imag() const {
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, std::abs(v.imag()));
    return m;
}

double GraphField::max_abs() const {
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, std::abs(v));
    return m;
}

GraphField operator*(Complex c, GraphField f) { return f *= c; }
GraphField operator+(GraphField a, const GraphField& b) { return a += b; }
GraphField operator-(GraphField a, const GraphField& b) { return a -= b; }

}  // namespace graphwave
