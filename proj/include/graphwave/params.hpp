#pragma once

#include <stdexcept>
#include <string>

namespace graphwave {

/// Raised when an operation is called outside its documented domain.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A bracketed root search found no sign change.
class NoRootError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A spectral scan could not isolate a crossing.
class UnresolvedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Physical parameters of the focusing NLS on a star graph with
/// delta'_s coupling: nonlinearity exponent p, frequency omega,
/// coupling intensity beta and number of edges N.
class ModelParams {
public:
    /// Validates p > 1, omega > 0, beta != 0, N >= 2.
    static ModelParams make(double p, double omega, double beta, int N);

    double p() const { return p_; }
    double omega() const { return omega_; }
    double beta() const { return beta_; }
    int N() const { return N_; }

    /// N^2 / beta^2: bottom of the linear spectrum for beta < 0, and the
    /// floor above which the symmetric profile exists.
    double omega_floor() const;

    /// ((p+1)/(p-1)) N^2/beta^2: where asymmetric profiles branch off.
    double omega_star() const;

    /// Same physics at a different frequency.
    ModelParams with_omega(double omega) const { return make(p_, omega, beta_, N_); }
    ModelParams with_beta(double beta) const { return make(p_, omega_, beta, N_); }

    bool operator==(const ModelParams&) const = default;

private:
    ModelParams(double p, double omega, double beta, int N)
        : p_(p), omega_(omega), beta_(beta), N_(N) {}

    double p_;
    double omega_;
    double beta_;
    int N_;
};

std::string to_string(const ModelParams& params);

}  // namespace graphwave
