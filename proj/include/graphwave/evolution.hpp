#pragma once

#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "graphwave/forms.hpp"
#include "graphwave/profiles.hpp"

namespace graphwave {

/// The Crank-Nicolson fixed point failed even at dt/2^10.
class FixedPointDivergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class RunStatus { Completed, OrbitEscape, BlowupFlagged, WallAbort };

std::string to_string(RunStatus status);

struct RunOutcome {
    RunStatus status = RunStatus::Completed;
    double time = 0.0;  // when the status was reached (end time if Completed)
};

struct TrajectoryLog {
    std::vector<double> times;
    std::vector<double> mass;        // u^H M u
    std::vector<double> energy;      // discrete Hamiltonian
    std::vector<double> fvals;       // ||x u||^2
    std::vector<double> Pvals;       // virial functional
    std::vector<double> orbit_dist;  // NaN without a reference profile
    std::vector<double> h1_norm;
    std::vector<double> kinetic;     // ||u'||^2, not written to CSV
    RunOutcome outcome;
    bool hit_dt_floor = false;
    double wall_peak = 0.0;  // largest |u| beyond 0.9 L relative to max |u|
    std::string warning;
};

/// Crank-Nicolson for i u_t = -Delta_beta u - |u|^{p-1} u on the P1 forms of
/// graph_core. The nonlinearity uses the lumped mass so that u^H M u is
/// conserved exactly; it is evaluated at the midpoint by fixed-point iteration.
class Stepper {
public:
    Stepper(const ModelParams& params, const Grid& grid, bool nonlinear = true);

    /// One step of size dt (either sign). Falls back to halved substeps on
    /// fixed-point failure; throws FixedPointDivergence below |dt|/2^10.
    ComplexVector step(const ComplexVector& u, double dt);
    GraphField step(const GraphField& u, double dt);

    double mass(const ComplexVector& u) const;
    double energy(const ComplexVector& u) const;
    double h1_norm(const ComplexVector& u) const;

    const Grid& grid() const { return grid_; }
    const ModelParams& params() const { return params_; }
    bool nonlinear() const { return nonlinear_; }
    /// Substeps were needed at some point.
    bool halved() const { return halved_; }

private:
    struct Factor;
    std::optional<ComplexVector> try_step(const ComplexVector& u, double dt);
    ComplexVector step_depth(const ComplexVector& u, double dt, int depth);
    Factor& factor(double dt);

    ModelParams params_;
    Grid grid_;
    bool nonlinear_;
    FormMatrices forms_;
    RealVector lumped_;
    SparseMatrix gram_;
    std::map<double, std::shared_ptr<Factor>> factors_;
    bool halved_ = false;
};

struct EvolveOptions {
    double dt = 1e-3;
    double T = 1.0;
    int sample_every = 10;
    bool nonlinear = true;
    /// Profile for the orbit distance; escape is checked against it.
    std::optional<GraphField> reference;
    double escape = std::numeric_limits<double>::infinity();
    /// Abort when |u| beyond 0.9 L exceeds this fraction of max |u|.
    double wall_tolerance = 1e-6;
};

TrajectoryLog evolve(const GraphField& u0, const ModelParams& params, const EvolveOptions& options);

/// inf over theta of ||u - e^{i theta} phi||_{H^1}, H^1 on the P1 dofs.
double orbit_distance(const GraphField& u, const GraphField& phi);

/// sum_j int x^2 |u_j|^2.
double weighted_second_moment(const GraphField& u);

/// max |f'' - 8 P| over interior samples (second central differences),
/// relative to the kinetic scale 8 max ||u'||^2, which stays meaningful
/// when P vanishes. Needs at least 5 samples.
double virial_check(const TrajectoryLog& log);

RunOutcome classify_run(const TrajectoryLog& log, double escape);

/// CSV with header t,mass,energy,f,P,orbit_dist,h1_norm at 17 digits.
void write_csv(const TrajectoryLog& log, std::ostream& out);

/// Stationary state of the discrete scheme nearest the sampled profile
/// (Newton on (K + w M) u = D |u|^{p-1} u).
GraphField discrete_profile(const ProfileSpec& spec, const Grid& grid);

/// Smooth deterministic perturbation: a few x^2-weighted Gaussians per edge
/// with pseudo-random complex weights, scaled to max modulus `amplitude`.
/// Value and slope vanish at the vertex, so it lies in the operator domain.
/// zero_sum removes the edge average (no vertex coupling is excited).
GraphField smooth_bump(const Grid& grid, double amplitude, unsigned seed, bool zero_sum = false);

}  // namespace graphwave
