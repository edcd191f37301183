#include "graphwave/evolution.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>

#include "graphwave/functionals.hpp"
#include "graphwave/numerics.hpp"

namespace graphwave {

namespace {

using ComplexSparse = Eigen::SparseMatrix<Complex>;

constexpr double kFixedPointTol = 1e-12;
constexpr int kFixedPointIters = 50;
constexpr int kMaxHalvings = 10;

}  // namespace

std::string to_string(RunStatus status) {
    switch (status) {
        case RunStatus::Completed: return "Completed";
        case RunStatus::OrbitEscape: return "OrbitEscape";
        case RunStatus::BlowupFlagged: return "BlowupFlagged";
        case RunStatus::WallAbort: return "WallAbort";
    }
    return "unknown";
}

struct Stepper::Factor {
    Eigen::SparseLU<ComplexSparse> lu;
    ComplexSparse explicit_part;  // M - i dt/2 K
};

Stepper::Stepper(const ModelParams& params, const Grid& grid, bool nonlinear)
    : params_(params),
      grid_(grid),
      nonlinear_(nonlinear),
      forms_(assemble_forms(params, grid, {}, true)),
      lumped_(lumped_mass(grid)),
      gram_(h1_gram(grid)) {}

Stepper::Factor& Stepper::factor(double dt) {
    auto it = factors_.find(dt);
    if (it != factors_.end()) return *it->second;
    auto f = std::make_shared<Factor>();
    const ComplexSparse M = forms_.Mmass.cast<Complex>();
    const ComplexSparse K = forms_.K.cast<Complex>();
    const Complex half(0.0, 0.5 * dt);
    ComplexSparse implicit_part = M + half * K;
    f->explicit_part = M - half * K;
    implicit_part.makeCompressed();
    f->lu.analyzePattern(implicit_part);
    f->lu.factorize(implicit_part);
    if (f->lu.info() != Eigen::Success) throw PreconditionError("Crank-Nicolson matrix is singular");
    factors_[dt] = f;
    return *f;
}

std::optional<ComplexVector> Stepper::try_step(const ComplexVector& u, double dt) {
    auto& f = factor(dt);
    const ComplexVector base = f.explicit_part * u;
    if (!nonlinear_) return ComplexVector(f.lu.solve(base));
    const double q = params_.p() - 1.0;
    ComplexVector next = u;
    for (int it = 0; it < kFixedPointIters; ++it) {
        const ComplexVector mid = 0.5 * (next + u);
        ComplexVector g(mid.size());
        for (Eigen::Index i = 0; i < mid.size(); ++i) {
            g[i] = lumped_[i] * std::pow(std::abs(mid[i]), q) * mid[i];
        }
        const ComplexVector rhs = base + Complex(0.0, dt) * g;
        ComplexVector cand = f.lu.solve(rhs);
        if (!cand.allFinite()) return std::nullopt;
        const double change = (cand - next).cwiseAbs().maxCoeff();
        const double scale = std::max(1.0, cand.cwiseAbs().maxCoeff());
        next = std::move(cand);
        if (change <= kFixedPointTol * scale) return next;
    }
    return std::nullopt;
}

ComplexVector Stepper::step_depth(const ComplexVector& u, double dt, int depth) {
    if (auto r = try_step(u, dt)) return *r;
    if (depth >= kMaxHalvings) throw FixedPointDivergence("fixed point diverged at the dt floor");
    halved_ = true;
    const ComplexVector half = step_depth(u, 0.5 * dt, depth + 1);
    return step_depth(half, 0.5 * dt, depth + 1);
}

ComplexVector Stepper::step(const ComplexVector& u, double dt) {
    if (dt == 0.0 || !std::isfinite(dt)) throw PreconditionError("step needs a finite nonzero dt");
    if (u.size() != grid_.dof_count()) throw PreconditionError("state does not match the grid");
    return step_depth(u, dt, 0);
}

GraphField Stepper::step(const GraphField& u, double dt) {
    if (!(u.grid() == grid_)) throw PreconditionError("field lives on another grid");
    return from_dofs(grid_, step(to_dofs(u), dt));
}

double Stepper::mass(const ComplexVector& u) const {
    return (u.adjoint() * (forms_.Mmass * u)).value().real();
}

double Stepper::energy(const ComplexVector& u) const {
    double e = 0.5 * (u.adjoint() * (forms_.K * u)).value().real();
    if (nonlinear_) {
        const double p = params_.p();
        double acc = 0.0;
        for (Eigen::Index i = 0; i < u.size(); ++i) acc += lumped_[i] * std::pow(std::abs(u[i]), p + 1.0);
        e -= acc / (p + 1.0);
    }
    return e;
}

double Stepper::h1_norm(const ComplexVector& u) const {
    return std::sqrt((u.adjoint() * (gram_ * u)).value().real());
}

double weighted_second_moment(const GraphField& u) {
    const Grid& g = u.grid();
    const auto w = numerics::gregory_weights(g.M(), g.h());
    double acc = 0.0;
    for (int j = 0; j < g.N(); ++j) {
        const auto e = u.edge(j);
        for (int i = 0; i < g.M(); ++i) acc += w[i] * g.x(i) * g.x(i) * std::norm(e[i]);
    }
    return acc;
}

double orbit_distance(const GraphField& u, const GraphField& phi) {
    if (!(u.grid() == phi.grid())) throw PreconditionError("orbit_distance: grids differ");
    const SparseMatrix G = h1_gram(u.grid());
    const ComplexVector a = to_dofs(u);
    const ComplexVector b = to_dofs(phi);
    const Complex z = (b.adjoint() * (G * a)).value();
    // |u|^2 + |phi|^2 - 2|z| evaluated as |u - e^{i arg z} phi|^2, free of cancellation
    const Complex phase = std::abs(z) > 0.0 ? z / std::abs(z) : Complex(1.0);
    const ComplexVector r = a - phase * b;
    return std::sqrt(std::max(0.0, (r.adjoint() * (G * r)).value().real()));
}

namespace {

double wall_ratio(const ComplexVector& u, const Grid& g) {
    const int start = static_cast<int>(std::ceil(0.9 * (g.M() - 1)));
    double far = 0.0;
    double all = 0.0;
    for (int j = 0; j < g.N(); ++j) {
        for (int i = 0; i < g.M() - 1; ++i) {
            const double a = std::abs(u[static_cast<Eigen::Index>(j) * (g.M() - 1) + i]);
            all = std::max(all, a);
            if (i >= start) far = std::max(far, a);
        }
    }
    return all > 0.0 ? far / all : 0.0;
}

}  // namespace

TrajectoryLog evolve(const GraphField& u0, const ModelParams& params, const EvolveOptions& opt) {
    if (opt.dt == 0.0 || !std::isfinite(opt.dt) || !std::isfinite(opt.T) || opt.dt * opt.T < 0.0) {
        throw PreconditionError("evolve needs dt and T of the same sign");
    }
    if (opt.sample_every < 1) throw PreconditionError("sample_every must be positive");
    const long steps = std::lround(opt.T / opt.dt);
    if (std::abs(steps * opt.dt - opt.T) > 1e-9 * std::max(1.0, std::abs(opt.T))) {
        throw PreconditionError("T must be a whole number of steps");
    }
    for (const auto& v : u0.values()) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw PreconditionError("u0 is not finite");
    }
    if (opt.reference && !(opt.reference->grid() == u0.grid())) {
        throw PreconditionError("reference profile lives on another grid");
    }
    Stepper stepper(params, u0.grid(), opt.nonlinear);
    const Grid& g = u0.grid();
    TrajectoryLog log;
    ComplexVector u = to_dofs(u0);

    auto record = [&](double t) {
        const GraphField f = from_dofs(g, u);
        log.times.push_back(t);
        log.mass.push_back(stepper.mass(u));
        log.energy.push_back(stepper.energy(u));
        log.fvals.push_back(weighted_second_moment(f));
        log.Pvals.push_back(virial_functional(f, params, opt.nonlinear));
        log.kinetic.push_back(derivative_norm_sq(f));
        log.orbit_dist.push_back(opt.reference ? orbit_distance(f, *opt.reference)
                                               : std::numeric_limits<double>::quiet_NaN());
        log.h1_norm.push_back(stepper.h1_norm(u));
    };

    record(0.0);
    const double h1_start = log.h1_norm.front();
    log.outcome = {RunStatus::Completed, 0.0};
    for (long n = 1; n <= steps; ++n) {
        const double t = n * opt.dt;
        try {
            u = stepper.step(u, opt.dt);
        } catch (const FixedPointDivergence&) {
            log.hit_dt_floor = true;
            log.outcome = {RunStatus::BlowupFlagged, t};
            return log;
        }
        if (n % opt.sample_every != 0 && n != steps) continue;
        record(t);
        log.outcome.time = t;
        if (log.orbit_dist.back() > opt.escape) {
            log.outcome = {RunStatus::OrbitEscape, t};
            return log;
        }
        if (log.h1_norm.back() > 1e3 * h1_start) {
            log.outcome = {RunStatus::BlowupFlagged, t};
            return log;
        }
        const double wall = wall_ratio(u, g);
        log.wall_peak = std::max(log.wall_peak, wall);
        if (wall > opt.wall_tolerance) {
            log.warning = "solution reached the outer wall at t=" + std::to_string(t);
            log.outcome = {RunStatus::WallAbort, t};
            return log;
        }
    }
    return log;
}

double virial_check(const TrajectoryLog& log) {
    const std::size_t n = log.times.size();
    if (n < 5) throw PreconditionError("virial_check needs at least 5 samples");
    double scale = 0.0;
    for (double k : log.kinetic) scale = std::max(scale, 8.0 * k);
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double d1 = log.times[i] - log.times[i - 1];
        const double d2 = log.times[i + 1] - log.times[i];
        // uneven spacing only at a truncated final sample
        const double f2 = 2.0 * (d1 * log.fvals[i + 1] - (d1 + d2) * log.fvals[i] + d2 * log.fvals[i - 1]) /
                          (d1 * d2 * (d1 + d2));
        worst = std::max(worst, std::abs(f2 - 8.0 * log.Pvals[i]));
    }
    return scale > 0.0 ? worst / scale : worst;
}

RunOutcome classify_run(const TrajectoryLog& log, double escape) {
    if (log.times.empty()) return {RunStatus::Completed, 0.0};
    const double h0 = log.h1_norm.front();
    for (std::size_t i = 0; i < log.times.size(); ++i) {
        if (log.orbit_dist[i] > escape) return {RunStatus::OrbitEscape, log.times[i]};
        if (log.h1_norm[i] > 1e3 * h0) return {RunStatus::BlowupFlagged, log.times[i]};
    }
    if (log.hit_dt_floor) return {RunStatus::BlowupFlagged, log.outcome.time};
    if (log.outcome.status == RunStatus::WallAbort) return log.outcome;
    return {RunStatus::Completed, log.times.back()};
}

void write_csv(const TrajectoryLog& log, std::ostream& out) {
    const auto flags = out.flags();
    const auto prec = out.precision();
    out << "t,mass,energy,f,P,orbit_dist,h1_norm\n";
    out << std::setprecision(17);
    for (std::size_t i = 0; i < log.times.size(); ++i) {
        out << log.times[i] << ',' << log.mass[i] << ',' << log.energy[i] << ',' << log.fvals[i] << ','
            << log.Pvals[i] << ',' << log.orbit_dist[i] << ',' << log.h1_norm[i] << '\n';
    }
    out.flags(flags);
    out.precision(prec);
}

GraphField discrete_profile(const ProfileSpec& spec, const Grid& grid) {
    const auto& m = spec.params;
    const auto forms = assemble_forms(m, grid, {}, true);
    const RealVector D = lumped_mass(grid);
    const SparseMatrix A = forms.K + m.omega() * forms.Mmass;
    RealVector u = to_dofs(sample_profile(spec, grid)).real();
    const double q = m.p() - 1.0;
    for (int it = 0; it < 40; ++it) {
        RealVector nl(u.size());
        std::vector<Eigen::Triplet<double>> diag;
        for (Eigen::Index i = 0; i < u.size(); ++i) {
            const double a = std::pow(std::abs(u[i]), q);
            nl[i] = D[i] * a * u[i];
            diag.emplace_back(static_cast<int>(i), static_cast<int>(i), m.p() * D[i] * a);
        }
        const RealVector res = A * u - nl;
        SparseMatrix J(u.size(), u.size());
        J.setFromTriplets(diag.begin(), diag.end());
        J = A - J;
        Eigen::SparseLU<SparseMatrix> lu(J);
        if (lu.info() != Eigen::Success) throw NoRootError("discrete_profile: singular Jacobian");
        const RealVector du = lu.solve(res);
        u -= du;
        if (du.cwiseAbs().maxCoeff() <= 1e-14 * u.cwiseAbs().maxCoeff()) break;
    }
    return from_dofs(grid, u.cast<Complex>());
}

GraphField smooth_bump(const Grid& grid, double amplitude, unsigned seed, bool zero_sum) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> centre(0.3, 3.0), width(0.4, 1.2), coef(-1.0, 1.0);
    GraphField f(grid);
    for (int j = 0; j < grid.N(); ++j) {
        for (int b = 0; b < 3; ++b) {
            const double c = centre(rng);
            const double w = width(rng);
            const Complex a(coef(rng), coef(rng));
            for (int i = 0; i < grid.M(); ++i) {
                const double x = grid.x(i);
                const double z = (x - c) / w;
                f(j, i) += a * x * x * std::exp(-z * z);
            }
        }
    }
    if (zero_sum) {
        for (int i = 0; i < grid.M(); ++i) {
            Complex mean = 0.0;
            for (int j = 0; j < grid.N(); ++j) mean += f(j, i);
            mean /= static_cast<double>(grid.N());
            for (int j = 0; j < grid.N(); ++j) f(j, i) -= mean;
        }
    }
    // vanish at the wall
    for (int j = 0; j < grid.N(); ++j) f(j, grid.M() - 1) = 0.0;
    const double peak = f.max_abs();
    if (peak > 0.0) f *= Complex(amplitude / peak);
    return f;
}

}  // namespace graphwave
