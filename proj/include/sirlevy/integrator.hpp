#pragma once

#include "sirlevy/model.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace sirlevy {

/// Time stepping controls shared by every integrator entry point.
struct SimConfig {
    double dt = 0.01;
    double horizon = 1000.0;       ///< final time T
    std::uint64_t seed = 1;
    std::size_t record_stride = 1; ///< store every k-th step (t = 0 and T always kept)
    double positivity_floor = 0.0; ///< components are clamped at this value
};

/// Standard normal draws consumed by one Euler-Maruyama step.
struct GaussianDraws {
    double z1 = 0.0; ///< S component
    double z2 = 0.0; ///< I component
    double z4 = 0.0; ///< D component
};

/// One jump event on the shared Poisson clock.
struct JumpEvent {
    double time = 0.0;
    std::size_t atom = 0; ///< index into NoiseSpec::atoms
};

/// Recorded path. `times` is strictly increasing and starts at 0; `psi` is
/// present only for runs with the auxiliary bound process attached.
/// `clamped` marks recorded points whose preceding un-recorded interval
/// applied at least one positivity clamp (such points sit on the floor, not
/// on the true path, and comparisons should skip them).
struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    std::optional<std::vector<double>> psi;
    std::vector<JumpEvent> jump_events;
    std::vector<char> clamped;
    std::size_t clamped_steps = 0; ///< total clamps applied, recorded or not
};

/// Scalar path of the auxiliary process.
struct PsiPath {
    std::vector<double> times;
    std::vector<double> values;
    std::size_t clamped_steps = 0;
};

/// One explicit Euler-Maruyama step of the jump-diffusion:
///
///   X' = X + f_X(state) dt + sigma_X X sqrt(dt) Z_X
///          + X * sum_{j in jumps} lam_X(j)      (events this step)
///          - X * dt * sum_k w_k lam_X(k)        (compensator)
///
/// followed by clamping each component at `floor`. `jumps` lists the atom
/// index of every event that fired during the step (an index may repeat).
/// dt = 0 isolates the jump part: only the events act. Throws NonFiniteState
/// when a component leaves the finite range (before clamping, so divergence
/// to -inf is an error rather than a clamp). When `clamps` is non-null it is
/// incremented once per clamped component.
State em_step(const State& x, const ModelParams& params, const NoiseSpec& noise,
              double dt, const GaussianDraws& z, std::span<const std::size_t> jumps,
              double floor = 0.0, std::size_t* clamps = nullptr);

/// Integrates the full jump-diffusion from `initial` to the horizon.
/// With couple_psi the auxiliary process dpsi = (A - mu1 psi) dt
/// + sigma1 psi dW1 + jumps(lam1), psi(0) = S(0), runs on the *same*
/// Brownian increments and jump events, so S(t) <= psi(t) pathwise.
/// Throws ValidationError on bad config/initial state and NonFiniteState
/// if a component leaves the finite range.
Trajectory simulate(const State& initial, const ModelParams& params,
                    const NoiseSpec& noise, const SimConfig& config,
                    bool couple_psi = false);

/// Classical RK4 on the noise-free drift, same recording rules. Accepts
/// boundary initial states (components >= 0), e.g. the disease-free
/// equilibrium (A/mu1, 0, 0), which it holds as a fixed point.
Trajectory simulate_deterministic(const State& initial, const ModelParams& params,
                                  const SimConfig& config);

/// Integrates the auxiliary process alone (S-type noise only).
PsiPath simulate_psi(double psi0, const ModelParams& params, const NoiseSpec& noise,
                     const SimConfig& config);

} // namespace sirlevy
