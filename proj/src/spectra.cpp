#include "graphwave/spectra.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "graphwave/numerics.hpp"

namespace graphwave {

namespace {

constexpr double kGaussX[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                               0.5384693101056831, 0.9061798459386640};
constexpr double kGaussW[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                               0.4786286704993665, 0.2369268850561891};

double coupling(Which which, double p) { return which == Which::L1 ? p : 1.0; }

// w - c((p+1)w/2) sech^2(((p-1)sqrt(w)/2)(x + a))
double well(const ModelParams& m, double c, double a, double x) {
    const double p = m.p();
    const double w = m.omega();
    const double s = numerics::sech((p - 1.0) * std::sqrt(w) / 2.0 * (x + a));
    return w - c * (p + 1.0) * w / 2.0 * s * s;
}

struct Block {
    double offset;
    double weight;
};

// P2 forms on a stack of half-line blocks, block b scaled by weight_b, with
// the vertex term (1/beta)(sum_b weight_b v_b(0))^2 when requested.
FormMatrices assemble_p2(const ModelParams& m, const Grid& g, const std::vector<Block>& blocks,
                         double c, bool vertex) {
    const int M = g.M();
    const int ne = 2 * (M - 1);
    const int n = ne * static_cast<int>(blocks.size());
    const double h = g.h();
    std::vector<Eigen::Triplet<double>> kt;
    std::vector<Eigen::Triplet<double>> mt;
    kt.reserve(static_cast<std::size_t>(9) * (M - 1) * blocks.size() + blocks.size() * blocks.size());
    mt.reserve(static_cast<std::size_t>(9) * (M - 1) * blocks.size());
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const int base = static_cast<int>(b) * ne;
        const double wt = blocks[b].weight;
        for (int e = 0; e < M - 1; ++e) {
            double ke[3][3] = {};
            double me[3][3] = {};
            for (int q = 0; q < 5; ++q) {
                const double s = 0.5 * (kGaussX[q] + 1.0);
                const double gw = kGaussW[q] * h / 2.0;
                const double N[3] = {2.0 * (s - 0.5) * (s - 1.0), -4.0 * s * (s - 1.0),
                                     2.0 * s * (s - 0.5)};
                const double dN[3] = {4.0 * s - 3.0, -8.0 * s + 4.0, 4.0 * s - 1.0};
                const double V = well(m, c, blocks[b].offset, (e + s) * h);
                for (int i = 0; i < 3; ++i) {
                    for (int j = 0; j < 3; ++j) {
                        ke[i][j] += gw * (dN[i] * dN[j] / (h * h) + V * N[i] * N[j]);
                        me[i][j] += gw * N[i] * N[j];
                    }
                }
            }
            for (int i = 0; i < 3; ++i) {
                const int gi = 2 * e + i;
                if (gi >= ne) continue;
                for (int j = 0; j < 3; ++j) {
                    const int gj = 2 * e + j;
                    if (gj >= ne) continue;
                    kt.emplace_back(base + gi, base + gj, wt * ke[i][j]);
                    mt.emplace_back(base + gi, base + gj, wt * me[i][j]);
                }
            }
        }
    }
    if (vertex) {
        for (std::size_t a = 0; a < blocks.size(); ++a) {
            for (std::size_t b = 0; b < blocks.size(); ++b) {
                kt.emplace_back(static_cast<int>(a) * ne, static_cast<int>(b) * ne,
                                blocks[a].weight * blocks[b].weight / m.beta());
            }
        }
    }
    FormMatrices f;
    f.K.resize(n, n);
    f.Mmass.resize(n, n);
    f.K.setFromTriplets(kt.begin(), kt.end());
    f.Mmass.setFromTriplets(mt.begin(), mt.end());
    f.dof_count = n;
    return f;
}

std::vector<Block> edge_blocks(const ProfileSpec& spec) {
    std::vector<Block> b;
    for (int j = 0; j < spec.params.N(); ++j) b.push_back({spec.offset(j), 1.0});
    return b;
}

// Edge-permutation classes: offset and number of edges carrying it.
std::vector<Block> groups(const ProfileSpec& spec) {
    const int N = spec.params.N();
    if (spec.kind.symmetric) return {{spec.a1, static_cast<double>(N)}};
    return {{spec.a1, static_cast<double>(spec.kind.k)},
            {spec.aN, static_cast<double>(N - spec.kind.k)}};
}

int dense_negative_count(const SparseMatrix& K) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(K), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw UnresolvedError("inertia: eigensolver failed");
    return static_cast<int>((es.eigenvalues().array() < 0.0).count());
}

int count_negative(const RealVector& v) { return static_cast<int>((v.array() < 0.0).count()); }

// Sign of c^T K^{-1} c, negative when the constraint direction lowers the count.
bool schur_negative(const SparseMatrix& K, const RealVector& c) {
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(K);
    if (ldlt.info() == Eigen::Success) {
        const RealVector y = ldlt.solve(c);
        const double s = c.dot(y);
        if (std::isfinite(s)) return s < 0.0;
    }
    Eigen::MatrixXd d(K);
    return c.dot(d.fullPivLu().solve(c)) < 0.0;
}

}  // namespace

double kernel_tolerance(const Grid& grid) { return 10.0 * grid.h() * grid.h(); }

OperatorPair assemble_operator_pair(const ProfileSpec& spec, int points_per_edge) {
    const auto& m = spec.params;
    const Grid g = make_grid(m, points_per_edge);
    const auto blocks = edge_blocks(spec);
    OperatorPair op{assemble_p2(m, g, blocks, m.p(), true), assemble_p2(m, g, blocks, 1.0, true),
                    spec, g, RealVector(), 2 * (g.M() - 1)};
    op.phi.resize(op.K1.dof_count);
    for (int j = 0; j < m.N(); ++j) {
        for (int i = 0; i < op.dofs_per_edge; ++i) {
            const double x = 0.5 * i * g.h();
            op.phi[j * op.dofs_per_edge + i] = soliton_value(m.p(), m.omega(), spec.offset(j), x);
        }
    }
    return op;
}

int negative_count(const SparseMatrix& K) {
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(K);
    double scale = 0.0;
    if (ldlt.info() == Eigen::Success) {
        const RealVector d = ldlt.vectorD();
        scale = d.cwiseAbs().maxCoeff();
        if (d.allFinite() && d.cwiseAbs().minCoeff() > 1e-14 * scale) return count_negative(d);
    }
    // tiny pivot from a near-null direction: nudge by 1e-12 |K|, below anything resolvable
    if (std::isfinite(scale) && scale > 0.0) {
        SparseMatrix I(K.rows(), K.cols());
        I.setIdentity();
        Eigen::SimplicialLDLT<SparseMatrix> shifted(K + (1e-12 * scale) * I);
        if (shifted.info() == Eigen::Success) {
            const RealVector d = shifted.vectorD();
            if (d.allFinite() && d.cwiseAbs().minCoeff() > 1e-14 * scale) return count_negative(d);
        }
    }
    if (K.rows() > 4000) throw UnresolvedError("inertia: factorization broke down");
    return dense_negative_count(K);
}

SpectralReport morse_by_inertia(const ProfileSpec& spec, int points_per_edge) {
    if (points_per_edge < 512) throw PreconditionError("morse_by_inertia needs M >= 512");
    const auto op = assemble_operator_pair(spec, points_per_edge);
    const double tau = kernel_tolerance(op.grid);
    SpectralReport r;
    r.method = "inertia";
    r.n1 = negative_count(op.K1.K);
    r.n2 = negative_count(op.K2.K);
    const SparseMatrix& M = op.K1.Mmass;
    r.ker1_dim = negative_count(op.K1.K - tau * M) - negative_count(op.K1.K + tau * M);
    r.ker2_dim = negative_count(op.K2.K - tau * M) - negative_count(op.K2.K + tau * M);
    return r;
}

EigenPairs smallest_eigenpairs(const SparseMatrix& K, const SparseMatrix& M, int count) {
    const int n = static_cast<int>(K.rows());
    const int block = std::min(n, std::max(2 * count, count + 10));
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(K);
    if (ldlt.info() != Eigen::Success) throw UnresolvedError("smallest_eigenpairs: factorization failed");
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd X(n, block);
    for (int j = 0; j < block; ++j) {
        for (int i = 0; i < n; ++i) X(i, j) = nd(rng);
    }
    RealVector values;
    for (int it = 0; it < 400; ++it) {
        Eigen::MatrixXd Y = ldlt.solve(M * X);
        // M-orthonormalize before the Ritz step
        Eigen::MatrixXd G = Y.transpose() * (M * Y);
        Eigen::LLT<Eigen::MatrixXd> llt(G);
        Eigen::MatrixXd Linv = llt.matrixL().solve(Eigen::MatrixXd::Identity(block, block));
        Y = Y * Linv.transpose();
        Eigen::MatrixXd H = Y.transpose() * (K * Y);
        H = 0.5 * (H + H.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        // order by modulus
        std::vector<int> idx(block);
        for (int i = 0; i < block; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](int a, int b) {
            return std::abs(es.eigenvalues()[a]) < std::abs(es.eigenvalues()[b]);
        });
        Eigen::MatrixXd Xn(n, block);
        RealVector v(block);
        for (int i = 0; i < block; ++i) {
            Xn.col(i) = Y * es.eigenvectors().col(idx[i]);
            v[i] = es.eigenvalues()[idx[i]];
        }
        X = Xn;
        const bool done = values.size() == block &&
                          ((v - values).head(count).cwiseAbs().array() <=
                           1e-12 * (1.0 + v.head(count).cwiseAbs().array()))
                              .all();
        values = v;
        if (done) break;
    }
    return {values.head(count), X.leftCols(count)};
}

KernelReport kernel_report(const ProfileSpec& spec, int points_per_edge) {
    const auto op = assemble_operator_pair(spec, points_per_edge);
    const SparseMatrix& M = op.K1.Mmass;
    KernelReport r;
    r.tolerance = kernel_tolerance(op.grid);
    const double tau = r.tolerance;
    r.ker1_dim = negative_count(op.K1.K - tau * M) - negative_count(op.K1.K + tau * M);
    r.ker2_dim = negative_count(op.K2.K - tau * M) - negative_count(op.K2.K + tau * M);
    const int count = spec.params.N() + 1;
    const auto e1 = smallest_eigenpairs(op.K1.K, M, count);
    const auto e2 = smallest_eigenpairs(op.K2.K, M, count);
    r.smallest1.assign(e1.values.data(), e1.values.data() + count);
    r.smallest2.assign(e2.values.data(), e2.values.data() + count);
    const RealVector x = e2.vectors.col(0);
    const RealVector Mphi = M * op.phi;
    r.overlap2 = std::abs(x.dot(Mphi)) / std::sqrt(x.dot(M * x) * op.phi.dot(Mphi));
    return r;
}

double lambda_min(const ModelParams& params) {
    const double p = params.p();
    return -(1.0 + p * (p + 1.0) * params.omega() / 2.0);
}

namespace {

struct Pair {
    double u;
    double du;
};

// Decaying solution integrated from the tail back to x = a, then scaled to
// unit Euclidean norm (a positive multiple of the true solution).
Pair shoot_pair(double lambda, double a, double c, const ModelParams& m) {
    const double kappa = std::sqrt(m.omega() - lambda);
    const double depth = c * (m.p() + 1.0) * m.omega() / 2.0;
    const double xr = std::max(a, 0.0) + 40.0 / kappa;
    const double scale = std::sqrt(m.omega() - lambda + depth);
    const int steps = std::max(200, static_cast<int>(std::ceil((xr - a) * 40.0 * scale)));
    const double h = -(xr - a) / steps;
    const double q = (m.p() - 1.0) * std::sqrt(m.omega()) / 2.0;
    auto rhs = [&](double x, double u) {
        const double s = numerics::sech(q * x);
        return (m.omega() - lambda - depth * s * s) * u;
    };
    double u = 1.0;
    double du = -kappa;
    double x = xr;
    for (int i = 0; i < steps; ++i) {
        const double k1u = du;
        const double k1v = rhs(x, u);
        const double k2u = du + 0.5 * h * k1v;
        const double k2v = rhs(x + 0.5 * h, u + 0.5 * h * k1u);
        const double k3u = du + 0.5 * h * k2v;
        const double k3v = rhs(x + 0.5 * h, u + 0.5 * h * k2u);
        const double k4u = du + h * k3v;
        const double k4v = rhs(x + h, u + h * k3u);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        du += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        x = xr + (i + 1) * h;
        if ((i + 1) % 50 == 0) {
            const double nrm = std::hypot(u, du);
            u /= nrm;
            du /= nrm;
        }
    }
    const double nrm = std::hypot(u, du);
    return {u / nrm, du / nrm};
}

// Factors of the vertex determinant whose negative zeros are eigenvalues,
// evaluated from the shot pairs at the distinct offsets (a1, then aN).
struct Factor {
    std::function<double(const std::vector<Pair>&)> value;
    int multiplicity;
};

std::vector<Factor> determinant_factors(const ProfileSpec& spec) {
    const int N = spec.params.N();
    const double beta = spec.params.beta();
    std::vector<Factor> f;
    if (spec.kind.symmetric) {
        f.push_back({[](const std::vector<Pair>& s) { return s[0].du; }, N - 1});
        f.push_back({[=](const std::vector<Pair>& s) { return N * s[0].u - beta * s[0].du; }, 1});
        return f;
    }
    const int k = spec.kind.k;
    if (k > 1) f.push_back({[](const std::vector<Pair>& s) { return s[0].du; }, k - 1});
    if (N - k > 1) f.push_back({[](const std::vector<Pair>& s) { return s[1].du; }, N - k - 1});
    // numerator of k/F1 + (N-k)/FN - beta, free of poles
    f.push_back({[=](const std::vector<Pair>& s) {
                     return k * s[0].u * s[1].du + (N - k) * s[1].u * s[0].du - beta * s[0].du * s[1].du;
                 },
                 1});
    return f;
}

std::pair<int, std::vector<double>> scan(const ProfileSpec& spec, Which which) {
    const auto& m = spec.params;
    const double c = coupling(which, m.p());
    std::vector<double> offsets{spec.a1};
    if (!spec.kind.symmetric) offsets.push_back(spec.aN);
    auto pairs = [&](double l) {
        std::vector<Pair> s;
        for (double a : offsets) s.push_back(shoot_pair(l, a, c, m));
        return s;
    };
    const double lmin = lambda_min(m);
    constexpr int kPoints = 2000;
    std::vector<double> grid(kPoints + 1);
    for (int i = 0; i < kPoints; ++i) grid[i] = lmin * (1.0 - static_cast<double>(i) / kPoints);
    grid[kPoints] = 1e-8 * lmin;
    std::vector<std::vector<Pair>> shots;
    shots.reserve(grid.size());
    for (double l : grid) shots.push_back(pairs(l));
    int count = 0;
    std::vector<double> located;
    for (const auto& factor : determinant_factors(spec)) {
        double prev = factor.value(shots[0]);
        for (int i = 1; i <= kPoints; ++i) {
            const double cur = factor.value(shots[i]);
            if (!std::isfinite(cur)) throw UnresolvedError("shooting produced a non-finite factor");
            if ((cur > 0.0) != (prev > 0.0)) {
                double lo = grid[i - 1];
                double hi = grid[i];
                double flo = prev;
                while (hi - lo > 1e-10 * std::abs(lmin)) {
                    const double mid = 0.5 * (lo + hi);
                    const double fm = factor.value(pairs(mid));
                    if (!std::isfinite(fm)) throw UnresolvedError("shooting bisection failed");
                    if ((fm > 0.0) == (flo > 0.0)) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                for (int r = 0; r < factor.multiplicity; ++r) located.push_back(0.5 * (lo + hi));
                count += factor.multiplicity;
            }
            prev = cur;
        }
    }
    std::sort(located.begin(), located.end());
    return {count, located};
}

}  // namespace

ShootValue shoot_log_derivative(double lambda, double a, Which which, const ModelParams& params) {
    if (lambda > 0.0) throw PreconditionError("shooting requires lambda <= 0");
    const auto s = shoot_pair(lambda, a, coupling(which, params.p()), params);
    ShootValue v;
    v.u = s.u;
    v.du = s.du;
    if (std::abs(s.u) < 1e-13) {
        v.pole = true;
        return v;
    }
    v.F = s.du / s.u;
    return v;
}

SpectralReport morse_by_shooting(const ProfileSpec& spec) {
    SpectralReport r;
    r.method = "shooting";
    auto [n1, e1] = scan(spec, Which::L1);
    auto [n2, e2] = scan(spec, Which::L2);
    r.n1 = n1;
    r.n2 = n2;
    r.eigen1 = std::move(e1);
    r.eigen2 = std::move(e2);
    return r;
}

std::vector<Complex> linearization_mu(const ProfileSpec& spec, int points_per_edge) {
    if (points_per_edge > 512) throw PreconditionError("unstable_modes caps M at 512");
    const auto& m = spec.params;
    const Grid g = make_grid(m, points_per_edge);
    std::vector<Complex> out;
    auto solve_sector = [&](const std::vector<Block>& blocks, bool vertex, int copies) {
        const auto f1 = assemble_p2(m, g, blocks, m.p(), vertex);
        const auto f2 = assemble_p2(m, g, blocks, 1.0, vertex);
        const Eigen::MatrixXd M(f1.Mmass);
        Eigen::LLT<Eigen::MatrixXd> llt(M);
        const Eigen::MatrixXd B1 = llt.solve(Eigen::MatrixXd(f1.K));
        Eigen::MatrixXd K2(f2.K);
        if (vertex) {
            // make the profile an exact kernel vector of L2
            const int ne = 2 * (g.M() - 1);
            RealVector phi(f2.dof_count);
            for (std::size_t b = 0; b < blocks.size(); ++b) {
                for (int i = 0; i < ne; ++i) {
                    phi[static_cast<int>(b) * ne + i] =
                        soliton_value(m.p(), m.omega(), blocks[b].offset, 0.5 * i * g.h());
                }
            }
            const RealVector Mphi = M * phi;
            Eigen::MatrixXd P = Eigen::MatrixXd::Identity(f2.dof_count, f2.dof_count);
            P -= phi * Mphi.transpose() / phi.dot(Mphi);
            K2 = P.transpose() * K2 * P;
        }
        const Eigen::MatrixXd B2 = llt.solve(K2);
        Eigen::EigenSolver<Eigen::MatrixXd> es(B2 * B1, false);
        if (es.info() != Eigen::Success) throw UnresolvedError("linearization eigensolver failed");
        for (int c = 0; c < copies; ++c) {
            for (int i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()[i]);
        }
    };
    const auto gs = groups(spec);
    // group-constant sector carries the vertex coupling
    solve_sector(gs, true, 1);
    // zero-sum combinations within a group see no vertex term
    for (const auto& grp : gs) {
        const int copies = static_cast<int>(grp.weight) - 1;
        if (copies > 0) solve_sector({{grp.offset, 1.0}}, false, copies);
    }
    return out;
}

std::vector<UnstableMode> unstable_modes(const ProfileSpec& spec, int points_per_edge) {
    const auto& m = spec.params;
    const Grid g = make_grid(m, points_per_edge);
    const double tau = kernel_tolerance(g);
    std::vector<UnstableMode> modes;
    auto add = [&](Complex l) {
        for (auto& md : modes) {
            if (std::abs(md.lambda - l) <= tau * std::max(1.0, std::abs(l))) {
                ++md.multiplicity;
                return;
            }
        }
        modes.push_back({l, 1});
    };
    for (const Complex mu : linearization_mu(spec, points_per_edge)) {
        if (std::abs(mu.imag()) < tau) {
            if (mu.real() < -tau) add(Complex(std::sqrt(-mu.real()), 0.0));
        } else {
            const Complex l = std::sqrt(-mu);
            if (l.real() > tau) add(l);
        }
    }
    std::sort(modes.begin(), modes.end(),
              [](const UnstableMode& a, const UnstableMode& b) { return a.lambda.real() > b.lambda.real(); });
    return modes;
}

int count_modes(const std::vector<UnstableMode>& modes, double threshold) {
    int n = 0;
    for (const auto& md : modes) {
        if (md.lambda.real() > threshold) n += md.multiplicity;
    }
    return n;
}

int grillakis_lower_bound(const ProfileSpec& spec, int points_per_edge) {
    const auto op = assemble_operator_pair(spec, points_per_edge);
    const RealVector c = op.K1.Mmass * op.phi;
    // inertia on the M-orthogonal complement of phi via the Schur complement
    const int p1 = negative_count(op.K1.K) - (schur_negative(op.K1.K, c) ? 1 : 0);
    const int p2 = negative_count(op.K2.K) - (schur_negative(op.K2.K, c) ? 1 : 0);
    return p1 - p2;
}

}  // namespace graphwave
