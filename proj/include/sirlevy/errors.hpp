#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sirlevy {

/// Input rejected by an invariant check (bad parameter, malformed atom, ...).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A config file could not be parsed.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The diffusion bound 1/(2(sigma2^-2 + sigma4^-2)) needs sigma2 > 0 and sigma4 > 0.
struct DegenerateDiffusion : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// chi2 = 2*mu1 - sigma1^2 - sum w*lam1^2 must be positive for the
/// extinction indicator and the second-moment limit to exist.
struct ChiTwoNonPositive : std::runtime_error {
    double chi2;
    explicit ChiTwoNonPositive(double value)
        : std::runtime_error("chi2 = " + std::to_string(value) +
                             " <= 0; parameters outside the admissible regime"),
          chi2(value) {}
};

/// Moment order must satisfy p > 2.
struct InvalidOrder : std::runtime_error {
    double p;
    explicit InvalidOrder(double order)
        : std::runtime_error("moment order p = " + std::to_string(order) + " must be > 2"),
          p(order) {}
};

/// vartheta = min(mu1, mu2+gamma-eta, eta) must be positive for the moment bound.
struct ThetaNonPositive : std::runtime_error {
    double vartheta;
    explicit ThetaNonPositive(double value)
        : std::runtime_error("vartheta = " + std::to_string(value) +
                             " <= 0 (requires mu2 + gamma > eta)"),
          vartheta(value) {}
};

/// A state component became NaN or infinite during integration.
struct NonFiniteState : std::runtime_error {
    double time;
    NonFiniteState()
        : std::runtime_error("non-finite state after one step (step size too large?)"),
          time(0.0) {}
    explicit NonFiniteState(double t)
        : std::runtime_error("non-finite state at t = " + std::to_string(t) +
                             " (step size too large?)"),
          time(t) {}
    NonFiniteState(double t, std::uint64_t seed)
        : std::runtime_error("non-finite state at t = " + std::to_string(t) +
                             " in member with seed " + std::to_string(seed)),
          time(t) {}
};

/// An averaging or regression window contains fewer than two grid points.
struct EmptyWindow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace sirlevy
