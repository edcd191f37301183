#include "graphwave/params.hpp"

#include <cmath>
#include <sstream>

namespace graphwave {

ModelParams ModelParams::make(double p, double omega, double beta, int N) {
    if (!(p > 1.0) || !std::isfinite(p)) {
        throw PreconditionError("p must be finite and > 1");
    }
    if (!(omega > 0.0) || !std::isfinite(omega)) {
        throw PreconditionError("omega must be finite and > 0");
    }
    if (beta == 0.0 || !std::isfinite(beta)) {
        throw PreconditionError("beta must be finite and nonzero");
    }
    if (N < 2) {
        throw PreconditionError("a star graph needs N >= 2 edges");
    }
    return ModelParams(p, omega, beta, N);
}

double ModelParams::omega_floor() const {
    return static_cast<double>(N_) * N_ / (beta_ * beta_);
}

double ModelParams::omega_star() const {
    return (p_ + 1.0) / (p_ - 1.0) * omega_floor();
}

std::string to_string(const ModelParams& params) {
    std::ostringstream os;
    os << "(p=" << params.p() << ", omega=" << params.omega()
       << ", beta=" << params.beta() << ", N=" << params.N() << ")";
    return os.str();
}

}  // namespace graphwave
