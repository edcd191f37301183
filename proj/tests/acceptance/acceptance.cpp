// Acceptance runner: one line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "graphwave/evolution.hpp"
#include "graphwave/functionals.hpp"
#include "graphwave/spectra.hpp"

using namespace graphwave;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;
};

// collects failures; the first few go into the summary line
class Tally {
public:
    void check(bool ok, const std::string& what) {
        ++total_;
        if (ok) return;
        ++failed_;
        if (failed_ <= 3) notes_ += (notes_.empty() ? "" : "; ") + what;
    }
    Verdict verdict(const std::string& summary) const {
        std::ostringstream os;
        os << summary << " [" << total_ - failed_ << "/" << total_ << " checks]";
        if (failed_) os << " failed: " << notes_;
        return {failed_ == 0, os.str()};
    }

private:
    int total_ = 0;
    int failed_ = 0;
    std::string notes_;
};

std::string fmt(double v, int digits = 6) {
    std::ostringstream os;
    os.precision(digits);
    os << v;
    return os.str();
}

ProfileSpec symmetric(double p, double omega, double beta, int N) {
    return make_profile_spec(ModelParams::make(p, omega, beta, N), ProfileKind::Symmetric());
}

// Deterministic feasible draws for the symmetric profile.
std::vector<ModelParams> random_draws(unsigned seed, int count) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> up(2.0, 6.0), ub(0.5, 2.0), uw(1.5, 6.0), coin(0.0, 1.0);
    std::uniform_int_distribution<int> un(2, 5);
    std::vector<ModelParams> out;
    for (int i = 0; i < count; ++i) {
        const double p = up(rng);
        const int N = un(rng);
        const double beta = (coin(rng) < 0.5 ? -1.0 : 1.0) * ub(rng);
        const double omega = uw(rng) * N * N / (beta * beta);
        out.push_back(ModelParams::make(p, omega, beta, N));
    }
    return out;
}

// Morse counts keyed by (beta, N, omega, kind k, method/M)
struct MorseCell {
    double beta;
    int N;
    double omega;
    int k;  // 0 = symmetric
};

struct MorseResult {
    SpectralReport shooting, inertia512, inertia1024;
};

std::map<std::tuple<double, int, double, int>, MorseResult> g_morse;

const MorseResult& morse(const MorseCell& c, bool with_1024) {
    const auto key = std::make_tuple(c.beta, c.N, c.omega, c.k);
    auto it = g_morse.find(key);
    if (it == g_morse.end()) {
        const auto m = ModelParams::make(3, c.omega, c.beta, c.N);
        const auto spec = make_profile_spec(m, c.k == 0 ? ProfileKind::Symmetric() : ProfileKind::Asymmetric(c.k));
        MorseResult r{morse_by_shooting(spec), morse_by_inertia(spec, 512), {}};
        r.inertia1024.n1 = -1;
        it = g_morse.emplace(key, r).first;
    }
    if (with_1024 && it->second.inertia1024.n1 < 0) {
        const auto m = ModelParams::make(3, c.omega, c.beta, c.N);
        const auto spec = make_profile_spec(m, c.k == 0 ? ProfileKind::Symmetric() : ProfileKind::Asymmetric(c.k));
        it->second.inertia1024 = morse_by_inertia(spec, 1024);
    }
    return it->second;
}

std::vector<MorseCell> table_cells() {
    std::vector<MorseCell> cells;
    for (double beta : {-1.0, 1.0}) {
        for (int N : {2, 3}) {
            const double star = 2.0 * N * N;  // p = 3: 2 N^2 / beta^2
            const double floor = N * N;
            for (double w : {0.5 * (floor + star), star, star + 7.0}) cells.push_back({beta, N, w, 0});
        }
    }
    return cells;
}

std::vector<MorseCell> asymmetric_cells() { return {{-1, 5, 60, 1}, {-1, 5, 60, 2}, {1, 5, 60, 1}}; }

std::pair<int, int> expected_table(const MorseCell& c) {
    const double star = 2.0 * c.N * c.N / (c.beta * c.beta);
    if (c.beta < 0) return {c.omega <= star ? 1 : c.N, 0};
    return {c.omega < star ? 2 * c.N - 1 : c.N, c.N - 1};
}

Verdict criterion1() {
    Tally t;
    for (const auto& c : table_cells()) {
        const auto& r = morse(c, false);
        const auto [n1, n2] = expected_table(c);
        const std::string where = "beta=" + fmt(c.beta) + " N=" + std::to_string(c.N) + " w=" + fmt(c.omega);
        t.check(r.shooting.n1 == n1 && r.shooting.n2 == n2, "shooting " + where);
        t.check(r.inertia512.n1 == n1 && r.inertia512.n2 == n2, "inertia " + where);
    }
    return t.verdict("12 cells (below / at / above omega_star), shooting and inertia");
}

Verdict criterion2() {
    Tally t;
    for (const auto& c : asymmetric_cells()) {
        const auto& r = morse(c, false);
        for (const SpectralReport* s : {&r.shooting, &r.inertia512}) {
            const std::string where = s->method + " beta=" + fmt(c.beta) + " k=" + std::to_string(c.k) +
                                      " (n1,n2)=(" + std::to_string(s->n1) + "," + std::to_string(s->n2) + ")";
            if (c.beta < 0) {
                t.check(s->n1 >= c.k, where);
                t.check(s->n2 == 0, where);
            } else {
                t.check(s->n1 >= 2 * c.N - c.k - 3, where);
                t.check(s->n2 <= c.N - 1, where);
            }
        }
    }
    return t.verdict("N=5, w=60: beta=-1 k=1,2 and beta=+1 k=1");
}

Verdict criterion3() {
    Tally t;
    double worst = 0.0;
    for (const auto& m : random_draws(20261018, 6)) {
        const auto spec = make_profile_spec(m, ProfileKind::Symmetric());
        const double p = m.p(), w = m.omega(), b = m.beta();
        const int N = m.N();
        const double expect1 = b * w * (p - 1) / (2 * N) * (N * N / (b * b * w) - 1);
        const auto f1 = shoot_log_derivative(0.0, spec.a1, Which::L1, m);
        const auto f2 = shoot_log_derivative(0.0, spec.a1, Which::L2, m);
        const double e1 = std::abs(f1.F - N / b - expect1) / std::abs(expect1);
        const double e2 = std::abs(f2.F - N / b) / std::abs(N / b);
        worst = std::max({worst, e1, e2});
        t.check(!f1.pole && e1 <= 1e-6, "L1 " + to_string(m) + " rel " + fmt(e1));
        t.check(!f2.pole && e2 <= 1e-6, "L2 " + to_string(m) + " rel " + fmt(e2));
    }
    return t.verdict("6 seeded draws, worst relative error " + fmt(worst, 3));
}

Verdict criterion4() {
    Tally t;
    double min_overlap = 1.0;
    for (const auto& m : random_draws(4242, 6)) {
        const auto r = kernel_report(make_profile_spec(m, ProfileKind::Symmetric()));
        min_overlap = std::min(min_overlap, r.overlap2);
        t.check(r.ker2_dim == 1, "ker L2 dim " + std::to_string(r.ker2_dim) + " at " + to_string(m));
        t.check(r.overlap2 >= 0.999, "overlap " + fmt(r.overlap2) + " at " + to_string(m));
    }
    const auto at = kernel_report(symmetric(3, 18, -1, 3));
    const auto above = kernel_report(symmetric(3, 25, -1, 3));
    t.check(at.ker1_dim == 2, "ker L1 at w=18 is " + std::to_string(at.ker1_dim));
    t.check(above.ker1_dim == 0, "ker L1 at w=25 is " + std::to_string(above.ker1_dim));
    return t.verdict("dim ker L2 = 1 (min overlap " + fmt(min_overlap, 8) + "), dim ker L1 = " +
                     std::to_string(at.ker1_dim) + " at w=18, " + std::to_string(above.ker1_dim) + " at w=25");
}

Verdict criterion5() {
    Tally t;
    int built = 0;
    double worst = 0.0;
    for (double p : {3.0, 5.0}) {
        for (double beta : {-1.0, 1.0}) {
            for (const auto& [N, w] : std::vector<std::pair<int, double>>{{3, 25.0}, {5, 60.0}}) {
                const auto m = ModelParams::make(p, w, beta, N);
                std::vector<ProfileKind> kinds{ProfileKind::Symmetric()};
                for (int k = 1; k < N; ++k) kinds.push_back(ProfileKind::Asymmetric(k));
                for (const auto& kind : kinds) {
                    std::optional<CriticalPoint> cp;
                    try {
                        cp = build_critical_point(m, kind, 2048);
                    } catch (const NoRootError&) {
                        continue;  // that member of the family does not exist here
                    }
                    ++built;
                    const auto r = evaluate(cp->field, m);
                    const double nehari = (p - 1) / (2 * (p + 1)) * r.power;
                    const double eI = std::abs(r.I) / r.power;
                    const double eP = std::abs(r.P) / r.grad_sq;
                    const double eS = std::abs(r.S - nehari) / nehari;
                    worst = std::max({worst, eI, eP, eS});
                    const std::string where = to_string(m) + " " + to_string(kind);
                    t.check(eI <= 1e-6, "I " + where);
                    t.check(eP <= 1e-6, "P " + where);
                    t.check(eS <= 1e-6, "S " + where);
                }
            }
        }
    }
    return t.verdict(std::to_string(built) + " critical points at M=2048, worst relative " + fmt(worst, 3));
}

Verdict criterion6() {
    Tally t;
    for (double w : {0.5, 1.0, 7.0, 25.0}) {
        const double d3 = 2.0 / 3.0 * std::pow(w, 1.5);
        const double d5 = std::sqrt(3.0) * std::numbers::pi / 8.0 * w;
        t.check(std::abs(d_infinity(3, w) - d3) <= 1e-10 * d3, "d_inf(3) w=" + fmt(w));
        t.check(std::abs(d_infinity(5, w) - d5) <= 1e-10 * d5, "d_inf(5) w=" + fmt(w));
    }
    double worst = 0.0;
    for (double p : {3.0, 5.0}) {
        for (const auto& [beta, N, w] : std::vector<std::tuple<double, int, double>>{{-1, 3, 25}, {1, 2, 12}}) {
            const auto m = ModelParams::make(p, w, beta, N);
            const double S = evaluate(build_critical_point(m, ProfileKind::Symmetric(), 4096).field, m).S;
            const double rel = std::abs(S - symmetric_action_closed_form(m)) / std::abs(S);
            worst = std::max(worst, rel);
            t.check(rel <= 1e-8, "closed form " + to_string(m) + " rel " + fmt(rel));
        }
    }
    for (int N : {2, 3, 4}) {
        for (double w : {1.0, 4.0}) {
            const double bs = compute_beta_star(3, w, N);
            const double edge = -N / std::sqrt(w);
            const double dinf = d_infinity(3, w);
            auto S = [&](double beta) { return symmetric_action_closed_form(ModelParams::make(3, w, beta, N)); };
            for (double s : {0.01, 0.25, 0.5, 0.75, 0.99}) {
                t.check(S(bs + s * (edge - bs)) < dinf, "S < d_inf inside, N=" + std::to_string(N));
            }
            t.check(S(bs * (1 + 1e-6)) > dinf, "reversal below beta*, N=" + std::to_string(N));
            t.check(S(bs * 1.5) > dinf, "S > d_inf far below beta*, N=" + std::to_string(N));
            t.check(std::abs(S(bs) - dinf) <= 1e-10 * dinf, "S(beta*) = d_inf, N=" + std::to_string(N));
        }
    }
    return t.verdict("d_inf closed forms, symmetric action (worst rel " + fmt(worst, 3) + "), beta* sign change");
}

Verdict criterion7() {
    Tally t;
    std::string order;
    for (int N : {3, 4}) {
        const auto m = ModelParams::make(3, 25.0 * N * N / 9.0, -1, N);
        const auto table = rank_critical_points(m, 2048);
        t.check(table.size() >= 2, "table size");
        if (table.size() < 2) continue;
        t.check(table[0].kind == ProfileKind::Asymmetric(1), "first is " + to_string(table[0].kind));
        t.check(table[0].S < table[1].S, "strict minimum N=" + std::to_string(N));
        if (N == 4) {
            double s2 = NAN, sb = NAN;
            for (const auto& e : table) {
                if (e.kind == ProfileKind::Asymmetric(2)) s2 = e.S;
                if (e.kind.symmetric) sb = e.S;
            }
            t.check(s2 < sb, "S(phi_2) < S(phi_beta)");
        }
        order += (order.empty() ? "" : ", ") + std::string("N=") + std::to_string(N) + " min S=" + fmt(table[0].S);
    }
    return t.verdict("phi_1 is the strict minimum (" + order + ")");
}

Verdict criterion8() {
    Tally t;
    for (double w : {5.0, 10.0, 100.0}) {
        t.check(mass_slope(ModelParams::make(3, w, 1, 2)).J > 0, "p=3 w=" + fmt(w));
        t.check(mass_slope(ModelParams::make(6, w, 1, 2)).J < 0, "p=6 w=" + fmt(w));
    }
    const auto m4 = ModelParams::make(4, 10, 1, 2);
    const auto r = mass_slope(m4);
    t.check(r.omega_star.has_value(), "p=4 omega* located");
    double ws = NAN;
    if (r.omega_star) {
        ws = *r.omega_star;
        t.check(mass_slope(m4.with_omega(0.9 * ws)).J * mass_slope(m4.with_omega(1.1 * ws)).J < 0,
                "J(0.9 w*) J(1.1 w*) < 0");
        // exactly one sign change on a fine log grid over (floor, 1e4 floor]
        int changes = 0;
        double prev = mass_slope(m4.with_omega(4.0 * (1 + 1e-6))).J;
        for (int i = 1; i <= 2000; ++i) {
            const double w = 4.0 * std::pow(1e4, i / 2000.0);
            const double J = mass_slope(m4.with_omega(w)).J;
            if ((J > 0) != (prev > 0)) ++changes;
            prev = J;
        }
        t.check(changes == 1, "sign changes " + std::to_string(changes));
    }
    return t.verdict("J>0 at p=3, J<0 at p=6, p=4 single sign change at w*=" + fmt(ws, 10));
}

Verdict criterion9() {
    Tally t;
    struct Case {
        double beta;
        double omega;
        int N;
        int k;
    };
    std::string summary;
    for (const Case c : {Case{-1, 25, 3, 0}, Case{1, 12, 3, 0}, Case{-1, 60, 5, 2}, Case{1, 60, 5, 1}}) {
        const auto m = ModelParams::make(3, c.omega, c.beta, c.N);
        const auto spec = make_profile_spec(m, c.k == 0 ? ProfileKind::Symmetric() : ProfileKind::Asymmetric(c.k));
        const auto modes = unstable_modes(spec);
        const double tau = kernel_tolerance(make_grid(m, 256));
        double top = 0.0;
        for (const auto& md : modes) top = std::max(top, md.lambda.real());
        const int count = count_modes(modes);
        const int bound = grillakis_lower_bound(spec);
        const std::string where = to_string(m) + " " + to_string(spec.kind);
        t.check(top > 10 * tau, "no mode above 10 tau at " + where);
        t.check(bound <= count, "bound " + std::to_string(bound) + " > count " + std::to_string(count) + " at " + where);
        summary += (summary.empty() ? "" : ", ") + fmt(top, 5) + " (" + std::to_string(bound) + "<=" +
                   std::to_string(count) + ")";
    }
    return t.verdict("max Re lambda (bound<=count): " + summary);
}

double max_rel_drift(const std::vector<double>& v) {
    double d = 0.0;
    for (double x : v) d = std::max(d, std::abs(x / v.front() - 1.0));
    return d;
}

Verdict criterion10() {
    Tally t;
    const auto m = ModelParams::make(3, 12, -1, 3);
    const Grid g = make_grid(m, 1024);
    GraphField u0 = sample_profile(make_profile_spec(m, ProfileKind::Symmetric()), g);
    u0 += smooth_bump(g, 1e-3, 17);
    EvolveOptions o;
    o.dt = 1e-3;
    o.T = 5.0;
    o.sample_every = 10;
    o.wall_tolerance = 1e-2;
    const auto log = evolve(u0, m, o);
    const double dm = max_rel_drift(log.mass);
    const double de = max_rel_drift(log.energy);
    const double vir = virial_check(log);
    t.check(log.outcome.status == RunStatus::Completed, "status " + to_string(log.outcome.status));
    t.check(dm <= 1e-8, "mass drift " + fmt(dm));
    t.check(de <= 1e-6, "energy drift " + fmt(de));
    t.check(vir <= 0.02, "virial " + fmt(vir));
    return t.verdict("mass drift " + fmt(dm, 3) + ", energy drift " + fmt(de, 3) + ", virial " + fmt(vir, 3) +
                     ", wall peak " + fmt(log.wall_peak, 3));
}

// least-squares slope of log d(t) over samples with lo <= d <= hi
double escape_slope(const TrajectoryLog& log, double lo, double hi, int& used) {
    double st = 0, sy = 0, stt = 0, sty = 0;
    used = 0;
    for (std::size_t i = 0; i < log.times.size(); ++i) {
        const double d = log.orbit_dist[i];
        if (!(d >= lo && d <= hi)) continue;
        const double y = std::log(d);
        st += log.times[i];
        sy += y;
        stt += log.times[i] * log.times[i];
        sty += log.times[i] * y;
        ++used;
    }
    return (used * sty - st * sy) / (used * stt - st * st);
}

Verdict criterion11() {
    Tally t;
    const double eps = 1e-3, escape = 0.1, horizon = 5.0;
    auto run = [&](double omega) {
        const auto m = ModelParams::make(3, omega, -1, 3);
        const Grid g = make_grid(m, 1024);
        const GraphField phi = discrete_profile(make_profile_spec(m, ProfileKind::Symmetric()), g);
        GraphField u0 = phi;
        u0 += smooth_bump(g, eps, 23, true);
        EvolveOptions o;
        o.dt = 1e-3;
        o.T = horizon;
        o.sample_every = 5;
        o.reference = phi;
        o.escape = escape;
        o.wall_tolerance = 1e-2;
        return evolve(u0, m, o);
    };

    const auto unstable = run(25);
    double lambda = 0.0;
    for (const auto& md : unstable_modes(symmetric(3, 25, -1, 3))) lambda = std::max(lambda, md.lambda.real());
    int used = 0;
    const double slope = escape_slope(unstable, 10 * eps, escape, used);
    t.check(unstable.outcome.status == RunStatus::OrbitEscape, "w=25 status " + to_string(unstable.outcome.status));
    t.check(used >= 5, "only " + std::to_string(used) + " samples in the fitting window");
    t.check(std::abs(slope - lambda) <= 0.3 * lambda, "slope " + fmt(slope) + " vs lambda " + fmt(lambda));

    const auto stable = run(12);
    const double dmax = *std::max_element(stable.orbit_dist.begin(), stable.orbit_dist.end());
    t.check(stable.outcome.status == RunStatus::Completed, "w=12 status " + to_string(stable.outcome.status));
    t.check(dmax <= 1e-2, "w=12 max orbit distance " + fmt(dmax));

    const double w3 = omega3(7, 3, -1).omega3;
    const auto mb = ModelParams::make(7, w3, -1, 3);
    const Grid gb = make_grid(mb, 1024);
    GraphField ub = sample_profile(make_profile_spec(mb, ProfileKind::Symmetric()), gb);
    ub *= Complex(1.05);
    EvolveOptions ob;
    ob.dt = 1e-3;
    ob.T = horizon;
    ob.sample_every = 10;
    ob.wall_tolerance = 1e-2;
    const auto blow = evolve(ub, mb, ob);
    t.check(blow.outcome.status == RunStatus::BlowupFlagged, "p=7 status " + to_string(blow.outcome.status));
    t.check(blow.outcome.time < horizon, "p=7 flagged at " + fmt(blow.outcome.time));

    return t.verdict("escape at t=" + fmt(unstable.outcome.time, 4) + " slope " + fmt(slope, 4) + " vs lambda " +
                     fmt(lambda, 4) + "; w=12 max dist " + fmt(dmax, 3) + "; p=7 " + to_string(blow.outcome.status) +
                     " at t=" + fmt(blow.outcome.time, 4) + " (w3=" + fmt(w3, 6) + ")");
}

Verdict criterion12() {
    Tally t;
    auto cells = table_cells();
    for (const auto& c : asymmetric_cells()) cells.push_back(c);
    for (const auto& c : cells) {
        const auto& r = morse(c, true);
        const std::string where =
            "beta=" + fmt(c.beta) + " N=" + std::to_string(c.N) + " w=" + fmt(c.omega) + " k=" + std::to_string(c.k);
        t.check(r.inertia512.n1 == r.inertia1024.n1 && r.inertia512.n2 == r.inertia1024.n2, "M 512/1024 " + where);
        t.check(r.shooting.n1 == r.inertia512.n1 && r.shooting.n2 == r.inertia512.n2, "methods " + where);
    }
    return t.verdict(std::to_string(cells.size()) + " cells: M=512 vs M=1024 and shooting vs inertia");
}

}  // namespace

int main() {
    struct Item {
        int id;
        const char* name;
        std::function<Verdict()> run;
        double budget;  // seconds, 0 = none
    };
    const std::vector<Item> items = {
        {1, "Morse-index table", criterion1, 60},
        {2, "asymmetric Morse bounds", criterion2, 60},
        {3, "shooting closed forms", criterion3, 0},
        {4, "kernel structure", criterion4, 0},
        {5, "Nehari and virial identities", criterion5, 0},
        {6, "closed-form functional values", criterion6, 0},
        {7, "ground-state ranking", criterion7, 0},
        {8, "slope condition", criterion8, 0},
        {9, "spectral instability", criterion9, 0},
        {10, "conservation and virial dynamics", criterion10, 300},
        {11, "instability dynamics", criterion11, 0},
        {12, "method independence", criterion12, 0},
    };
    int failed = 0;
    for (const auto& item : items) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = item.run();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (item.budget > 0 && secs > item.budget) {
            v.pass = false;
            v.detail += " over the " + fmt(item.budget) + " s budget";
        }
        if (!v.pass) ++failed;
        std::printf("%s  %2d  %-34s %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", item.id, item.name, v.detail.c_str(),
                    secs);
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(items.size()) - failed, items.size());
    return failed == 0 ? 0 : 1;
}
