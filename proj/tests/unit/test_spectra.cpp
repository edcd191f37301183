#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "graphwave/spectra.hpp"

using namespace graphwave;

namespace {

ProfileSpec symmetric(double beta, int N, double omega, double p = 3) {
    return make_profile_spec(ModelParams::make(p, omega, beta, N), ProfileKind::Symmetric());
}

// Jost solutions of the p = 3 wells (sech^2 depth l(l+1) kappa^2, l = 1 for
// L2, l = 2 for L1) give u'/u in closed form.
double jost_log_derivative(double lambda, double a, Which which, double omega) {
    const double k = std::sqrt(omega);
    const double s = std::sqrt(omega - lambda);
    const double T = std::tanh(k * a);
    const double sech2 = 1.0 - T * T;
    if (which == Which::L2) return -s + k * k * sech2 / (s + k * T);
    const double q = 3 * k * k * T * T + 3 * s * k * T + s * s - k * k;
    const double dq = (6 * k * k * T + 3 * s * k) * k * sech2;
    return -s + dq / q;
}

std::vector<double> dense_generalized(const SparseMatrix& K, const SparseMatrix& M) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(K), Eigen::MatrixXd(M),
                                                                 Eigen::EigenvaluesOnly);
    const auto& v = es.eigenvalues();
    return {v.data(), v.data() + v.size()};
}

}  // namespace

TEST_CASE("shooting: F(0) closed forms at the symmetric offset") {
    for (int N : {2, 3, 4}) {
        for (double beta : {-1.0, 1.0}) {
            for (double p : {3.0, 5.0}) {
                const auto spec = symmetric(beta, N, 25, p);
                const auto& m = spec.params;
                const double w = m.omega();
                const auto f1 = shoot_log_derivative(0.0, spec.a1, Which::L1, m);
                const auto f2 = shoot_log_derivative(0.0, spec.a1, Which::L2, m);
                const double expect1 = beta * w * (p - 1) / (2 * N) * (N * N / (beta * beta * w) - 1);
                CAPTURE(to_string(m));
                CHECK_FALSE(f1.pole);
                CHECK(std::abs(f1.F - N / beta - expect1) <= 1e-6);
                CHECK(std::abs(f2.F - N / beta) <= 1e-6);
            }
        }
    }
}

TEST_CASE("shooting matches the p = 3 Jost solutions for negative lambda") {
    const auto m = ModelParams::make(3, 16, -1, 3);
    for (double a : {-0.4, 0.0, 0.3, 1.2}) {
        for (double lambda : {-0.5, -7.0, -20.0, -60.0}) {
            for (Which which : {Which::L1, Which::L2}) {
                const double ref = jost_log_derivative(lambda, a, which, 16);
                const auto v = shoot_log_derivative(lambda, a, which, m);
                if (v.pole) continue;
                CHECK(std::abs(v.F - ref) <= 1e-6 * std::max(1.0, std::abs(ref)));
            }
        }
    }
    CHECK_THROWS_AS(shoot_log_derivative(0.1, 0.0, Which::L1, m), PreconditionError);
}

TEST_CASE("shooting: F increases between poles") {
    const auto spec = symmetric(1, 3, 12);
    const auto& m = spec.params;
    const double lmin = lambda_min(m);
    for (Which which : {Which::L1, Which::L2}) {
        ShootValue prev = shoot_log_derivative(lmin, spec.a1, which, m);
        int checked = 0;
        for (int i = 1; i <= 400; ++i) {
            const double l = lmin * (1.0 - i / 401.0);
            const auto cur = shoot_log_derivative(l, spec.a1, which, m);
            // same sign of u means no pole in between
            if (!prev.pole && !cur.pole && (prev.u > 0) == (cur.u > 0)) {
                CHECK(cur.F > prev.F);
                ++checked;
            }
            prev = cur;
        }
        CHECK(checked > 350);
    }
}

TEST_CASE("Morse table examples by both methods") {
    struct Cell {
        double beta;
        double omega;
        int n1, n2;
    };
    for (const Cell c : {Cell{-1, 12, 1, 0}, Cell{-1, 25, 3, 0}, Cell{1, 12, 5, 2}}) {
        const auto spec = symmetric(c.beta, 3, c.omega);
        const auto s = morse_by_shooting(spec);
        const auto r = morse_by_inertia(spec);
        CAPTURE(c.beta);
        CAPTURE(c.omega);
        CHECK(s.n1 == c.n1);
        CHECK(s.n2 == c.n2);
        CHECK(r.n1 == c.n1);
        CHECK(r.n2 == c.n2);
        CHECK(s.method == "shooting");
        CHECK(r.method == "inertia");
        // located eigenvalues lie strictly inside (lambda_min, 0)
        const double lmin = lambda_min(spec.params);
        CHECK(static_cast<int>(s.eigen1.size()) == s.n1);
        for (double l : s.eigen1) {
            CHECK(l > lmin);
            CHECK(l < 0.0);
        }
    }
}

TEST_CASE("asymmetric Morse bounds") {
    const auto mneg = ModelParams::make(3, 60, -1, 5);
    const auto specneg = make_profile_spec(mneg, ProfileKind::Asymmetric(2));
    for (const auto& r : {morse_by_shooting(specneg), morse_by_inertia(specneg)}) {
        CHECK(r.n1 >= 2);
        CHECK(r.n2 == 0);
    }
    const auto specpos = make_profile_spec(mneg.with_beta(1), ProfileKind::Asymmetric(1));
    const auto s = morse_by_shooting(specpos);
    const auto r = morse_by_inertia(specpos);
    CHECK(s.n1 == r.n1);
    CHECK(s.n2 == r.n2);
    CHECK(r.n1 >= 6);
    CHECK(r.n2 <= 4);
}

TEST_CASE("inertia: n(L1) >= n(L2), mesh stability and M precondition") {
    for (double beta : {-1.0, 1.0}) {
        const auto spec = symmetric(beta, 2, 10.4);
        const auto a = morse_by_inertia(spec, 512);
        const auto b = morse_by_inertia(spec, 1024);
        CHECK(a.n1 >= a.n2);
        CHECK(a.n1 == b.n1);
        CHECK(a.n2 == b.n2);
    }
    CHECK_THROWS_AS(morse_by_inertia(symmetric(-1, 3, 25), 256), PreconditionError);
}

TEST_CASE("negative_count and smallest_eigenpairs against dense eigensolvers") {
    const auto spec = symmetric(1, 3, 12);
    const auto op = assemble_operator_pair(spec, 64);
    for (const auto* K : {&op.K1.K, &op.K2.K}) {
        const auto ev = dense_generalized(*K, op.K1.Mmass);
        const int dense_neg = static_cast<int>(std::count_if(ev.begin(), ev.end(), [](double v) { return v < 0; }));
        CHECK(negative_count(*K) == dense_neg);
        std::vector<double> sorted = ev;
        std::sort(sorted.begin(), sorted.end(), [](double x, double y) { return std::abs(x) < std::abs(y); });
        const auto pairs = smallest_eigenpairs(*K, op.K1.Mmass, 4);
        for (int i = 0; i < 4; ++i) {
            CHECK(pairs.values[i] == doctest::Approx(sorted[i]).epsilon(1e-8));
        }
        // M-orthonormal Ritz vectors
        const Eigen::MatrixXd G = pairs.vectors.transpose() * (op.K1.Mmass * pairs.vectors);
        CHECK((G - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-8);
    }
}

TEST_CASE("kernel_report") {
    const auto gen = kernel_report(symmetric(-1, 3, 25));
    CHECK(gen.ker2_dim == 1);
    CHECK(gen.overlap2 >= 0.999);
    CHECK(gen.ker1_dim == 0);
    const auto at = kernel_report(symmetric(-1, 3, 18));
    CHECK(at.ker1_dim == 2);
    CHECK(std::abs(at.smallest1[0]) < at.tolerance);
    CHECK(std::abs(at.smallest1[1]) < at.tolerance);
    CHECK(std::abs(at.smallest1[2]) > at.tolerance);
    const auto pos = kernel_report(symmetric(1, 2, 7));
    CHECK(pos.ker2_dim == 1);
    CHECK(pos.overlap2 >= 0.999);
}

TEST_CASE("unstable_modes examples and grillakis bound") {
    const auto unstable = symmetric(-1, 3, 25);
    const auto modes = unstable_modes(unstable);
    REQUIRE_FALSE(modes.empty());
    const double tau = kernel_tolerance(make_grid(unstable.params, 256));
    CHECK(modes[0].lambda.real() > 10 * tau);
    CHECK(std::abs(modes[0].lambda.imag()) < tau);
    const int bound = grillakis_lower_bound(unstable);
    CHECK(bound >= 2);
    CHECK(bound <= count_modes(modes));

    const auto stable = symmetric(-1, 3, 12);
    CHECK(count_modes(unstable_modes(stable), 10 * tau) == 0);
    CHECK(grillakis_lower_bound(stable) == 0);
}

TEST_CASE("linearization spectrum: conjugate closure and sector reduction") {
    const auto spec = symmetric(-1, 3, 25);
    const auto mu = linearization_mu(spec, 64);
    const double tau = kernel_tolerance(make_grid(spec.params, 64));
    for (const Complex z : mu) {
        if (std::abs(z.imag()) < tau) continue;
        const bool has_conj = std::any_of(mu.begin(), mu.end(), [&](Complex w) {
            return std::abs(w - std::conj(z)) <= tau * std::max(1.0, std::abs(z));
        });
        CHECK(has_conj);
    }
    // full unreduced problem on the whole graph: the clearly unstable part agrees
    const auto op = assemble_operator_pair(spec, 64);
    const Eigen::MatrixXd M(op.K1.Mmass);
    Eigen::LLT<Eigen::MatrixXd> llt(M);
    const Eigen::MatrixXd A = llt.solve(Eigen::MatrixXd(op.K2.K)) * llt.solve(Eigen::MatrixXd(op.K1.K));
    Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
    std::vector<double> full, reduced;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        if (es.eigenvalues()[i].real() < -1.0) full.push_back(es.eigenvalues()[i].real());
    }
    for (const Complex z : mu) {
        if (z.real() < -1.0) reduced.push_back(z.real());
    }
    std::sort(full.begin(), full.end());
    std::sort(reduced.begin(), reduced.end());
    REQUIRE(full.size() == reduced.size());
    REQUIRE_FALSE(full.empty());
    for (std::size_t i = 0; i < full.size(); ++i) {
        CHECK(full[i] == doctest::Approx(reduced[i]).epsilon(1e-8));
    }
    CHECK_THROWS_AS(linearization_mu(spec, 1024), PreconditionError);
}
