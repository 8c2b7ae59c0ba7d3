#include "sirlevy/integrator.hpp"

#include "sirlevy/errors.hpp"
#include "sirlevy/rng.hpp"

#include <cmath>
#include <random>
#include <string>

namespace sirlevy {

namespace {

void check_config(const SimConfig& c) {
    if (!(std::isfinite(c.dt) && c.dt > 0.0))
        throw ValidationError("sim.dt must be finite and > 0");
    if (!(std::isfinite(c.horizon) && c.horizon >= c.dt))
        throw ValidationError("sim.horizon must be finite and >= dt");
    if (c.record_stride < 1)
        throw ValidationError("sim.record_stride must be >= 1");
    if (!(std::isfinite(c.positivity_floor) && c.positivity_floor >= 0.0))
        throw ValidationError("sim.positivity_floor must be finite and >= 0");
}

void check_initial(const State& x) {
    if (!(std::isfinite(x.s) && x.s > 0.0 && std::isfinite(x.i) && x.i > 0.0 &&
          std::isfinite(x.d) && x.d > 0.0))
        throw ValidationError("initial state must be componentwise finite and > 0");
}

// The noise-free integrator also accepts boundary starts (e.g. the
// disease-free equilibrium (A/mu1, 0, 0)); the drift points inward there.
void check_initial_nonnegative(const State& x) {
    if (!(std::isfinite(x.s) && x.s >= 0.0 && std::isfinite(x.i) && x.i >= 0.0 &&
          std::isfinite(x.d) && x.d >= 0.0))
        throw ValidationError("initial state must be componentwise finite and >= 0");
}

double clamp_floor(double v, double floor, std::size_t& clamps) {
    if (v < floor) {
        ++clamps;
        return floor;
    }
    return v;
}

long long step_count(const SimConfig& c) {
    // Uniform grid t_i = i*dt with the step count nearest horizon/dt; the
    // presets and tests all use exactly divisible horizons.
    return std::llround(c.horizon / c.dt);
}

bool finite_state(const State& x) {
    return std::isfinite(x.s) && std::isfinite(x.i) && std::isfinite(x.d);
}

// Compensator rates dt * sum_k w_k lam_k per compartment.
struct Compensator {
    double c1 = 0.0, c2 = 0.0, c4 = 0.0;
    explicit Compensator(const NoiseSpec& n) {
        for (const auto& a : n.atoms) {
            c1 += a.weight * a.lam1;
            c2 += a.weight * a.lam2;
            c4 += a.weight * a.lam4;
        }
    }
};

} // namespace

State em_step(const State& x, const ModelParams& params, const NoiseSpec& noise,
              double dt, const GaussianDraws& z, std::span<const std::size_t> jumps,
              double floor, std::size_t* clamps) {
    if (!(std::isfinite(dt) && dt >= 0.0))
        throw ValidationError("em_step: dt must be finite and >= 0");
    for (std::size_t idx : jumps)
        if (idx >= noise.atoms.size())
            throw ValidationError("em_step: jump mark " + std::to_string(idx) +
                                  " out of range");

    const State f = drift_reduced(x, params);
    const double sq = std::sqrt(dt);

    double j1 = 0.0, j2 = 0.0, j4 = 0.0;
    for (std::size_t idx : jumps) {
        const auto& a = noise.atoms[idx];
        j1 += a.lam1;
        j2 += a.lam2;
        j4 += a.lam4;
    }
    const Compensator comp(noise);

    State out;
    out.s = x.s + f.s * dt + noise.sigma1 * x.s * sq * z.z1 + x.s * j1 - x.s * dt * comp.c1;
    out.i = x.i + f.i * dt + noise.sigma2 * x.i * sq * z.z2 + x.i * j2 - x.i * dt * comp.c2;
    out.d = x.d + f.d * dt + noise.sigma4 * x.d * sq * z.z4 + x.d * j4 - x.d * dt * comp.c4;
    // Checked before clamping so that a -inf excursion surfaces as an error
    // instead of being quietly projected back onto the floor.
    if (!finite_state(out)) throw NonFiniteState();

    std::size_t n_clamped = 0;
    out.s = clamp_floor(out.s, floor, n_clamped);
    out.i = clamp_floor(out.i, floor, n_clamped);
    out.d = clamp_floor(out.d, floor, n_clamped);
    if (clamps) *clamps += n_clamped;
    return out;
}

Trajectory simulate(const State& initial, const ModelParams& params,
                    const NoiseSpec& noise, const SimConfig& config, bool couple_psi) {
    validate(params);
    validate(noise);
    check_config(config);
    check_initial(initial);

    const long long n = step_count(config);
    const double dt = config.dt;
    const double sq = std::sqrt(dt);
    const double nu_total = noise.total_weight();
    const Compensator comp(noise);

    RngStreams rng(config.seed);
    std::normal_distribution<double> norm_s(0.0, 1.0);
    std::normal_distribution<double> norm_i(0.0, 1.0);
    std::normal_distribution<double> norm_d(0.0, 1.0);
    std::poisson_distribution<long> n_events(nu_total * dt);
    std::discrete_distribution<std::size_t> pick_mark;
    if (nu_total > 0.0) {
        std::vector<double> w;
        w.reserve(noise.atoms.size());
        for (const auto& a : noise.atoms) w.push_back(a.weight);
        pick_mark = std::discrete_distribution<std::size_t>(w.begin(), w.end());
    }

    Trajectory traj;
    const std::size_t cap = static_cast<std::size_t>(n / config.record_stride) + 2;
    traj.times.reserve(cap);
    traj.states.reserve(cap);
    traj.clamped.reserve(cap);
    if (couple_psi) traj.psi = std::vector<double>();
    if (couple_psi) traj.psi->reserve(cap);

    State x = initial;
    double psi = initial.s;
    traj.times.push_back(0.0);
    traj.states.push_back(x);
    traj.clamped.push_back(0);
    if (couple_psi) traj.psi->push_back(psi);

    std::vector<std::size_t> marks;
    bool clamp_pending = false;
    for (long long i = 0; i < n; ++i) {
        const double t_next = (i + 1) * dt;

        GaussianDraws z;
        z.z1 = norm_s(rng.gauss_s());
        z.z2 = norm_i(rng.gauss_i());
        z.z4 = norm_d(rng.gauss_d());

        marks.clear();
        if (nu_total > 0.0) {
            const long k = n_events(rng.jump_clock());
            for (long j = 0; j < k; ++j) {
                const std::size_t idx = pick_mark(rng.jump_mark());
                marks.push_back(idx);
                traj.jump_events.push_back({t_next, idx});
            }
        }

        const std::size_t clamps_before = traj.clamped_steps;
        try {
            x = em_step(x, params, noise, dt, z, marks, config.positivity_floor,
                        &traj.clamped_steps);
        } catch (const NonFiniteState&) {
            throw NonFiniteState(t_next);
        }
        if (couple_psi) {
            double j1 = 0.0;
            for (std::size_t idx : marks) j1 += noise.atoms[idx].lam1;
            psi = psi + (params.A - params.mu1 * psi) * dt +
                  noise.sigma1 * psi * sq * z.z1 + psi * j1 - psi * dt * comp.c1;
            if (!std::isfinite(psi)) throw NonFiniteState(t_next);
            psi = clamp_floor(psi, config.positivity_floor, traj.clamped_steps);
        }
        clamp_pending = clamp_pending || traj.clamped_steps != clamps_before;

        if ((i + 1) % static_cast<long long>(config.record_stride) == 0 || i + 1 == n) {
            traj.times.push_back(t_next);
            traj.states.push_back(x);
            traj.clamped.push_back(clamp_pending ? 1 : 0);
            if (couple_psi) traj.psi->push_back(psi);
            clamp_pending = false;
        }
    }
    return traj;
}

Trajectory simulate_deterministic(const State& initial, const ModelParams& params,
                                  const SimConfig& config) {
    validate(params);
    check_config(config);
    check_initial_nonnegative(initial);

    const long long n = step_count(config);
    const double dt = config.dt;

    Trajectory traj;
    const std::size_t cap = static_cast<std::size_t>(n / config.record_stride) + 2;
    traj.times.reserve(cap);
    traj.states.reserve(cap);
    traj.clamped.reserve(cap);

    State x = initial;
    traj.times.push_back(0.0);
    traj.states.push_back(x);
    traj.clamped.push_back(0);

    bool clamp_pending = false;
    for (long long i = 0; i < n; ++i) {
        const double t_next = (i + 1) * dt;

        const State k1 = drift_reduced(x, params);
        const State m2{x.s + 0.5 * dt * k1.s, x.i + 0.5 * dt * k1.i, x.d + 0.5 * dt * k1.d};
        const State k2 = drift_reduced(m2, params);
        const State m3{x.s + 0.5 * dt * k2.s, x.i + 0.5 * dt * k2.i, x.d + 0.5 * dt * k2.d};
        const State k3 = drift_reduced(m3, params);
        const State m4{x.s + dt * k3.s, x.i + dt * k3.i, x.d + dt * k3.d};
        const State k4 = drift_reduced(m4, params);

        x.s += dt / 6.0 * (k1.s + 2.0 * k2.s + 2.0 * k3.s + k4.s);
        x.i += dt / 6.0 * (k1.i + 2.0 * k2.i + 2.0 * k3.i + k4.i);
        x.d += dt / 6.0 * (k1.d + 2.0 * k2.d + 2.0 * k3.d + k4.d);
        if (!finite_state(x)) throw NonFiniteState(t_next);

        const std::size_t clamps_before = traj.clamped_steps;
        x.s = clamp_floor(x.s, config.positivity_floor, traj.clamped_steps);
        x.i = clamp_floor(x.i, config.positivity_floor, traj.clamped_steps);
        x.d = clamp_floor(x.d, config.positivity_floor, traj.clamped_steps);
        clamp_pending = clamp_pending || traj.clamped_steps != clamps_before;

        if ((i + 1) % static_cast<long long>(config.record_stride) == 0 || i + 1 == n) {
            traj.times.push_back(t_next);
            traj.states.push_back(x);
            traj.clamped.push_back(clamp_pending ? 1 : 0);
            clamp_pending = false;
        }
    }
    return traj;
}

PsiPath simulate_psi(double psi0, const ModelParams& params, const NoiseSpec& noise,
                     const SimConfig& config) {
    validate(params);
    validate(noise);
    check_config(config);
    if (!(std::isfinite(psi0) && psi0 > 0.0))
        throw ValidationError("psi0 must be finite and > 0");

    const long long n = step_count(config);
    const double dt = config.dt;
    const double sq = std::sqrt(dt);
    const double nu_total = noise.total_weight();
    const Compensator comp(noise);

    RngStreams rng(config.seed);
    std::normal_distribution<double> norm(0.0, 1.0);
    std::poisson_distribution<long> n_events(nu_total * dt);
    std::discrete_distribution<std::size_t> pick_mark;
    if (nu_total > 0.0) {
        std::vector<double> w;
        w.reserve(noise.atoms.size());
        for (const auto& a : noise.atoms) w.push_back(a.weight);
        pick_mark = std::discrete_distribution<std::size_t>(w.begin(), w.end());
    }

    PsiPath path;
    const std::size_t cap = static_cast<std::size_t>(n / config.record_stride) + 2;
    path.times.reserve(cap);
    path.values.reserve(cap);

    double psi = psi0;
    path.times.push_back(0.0);
    path.values.push_back(psi);

    for (long long i = 0; i < n; ++i) {
        const double t_next = (i + 1) * dt;
        const double z = norm(rng.gauss_psi());

        double j1 = 0.0;
        if (nu_total > 0.0) {
            const long k = n_events(rng.jump_clock());
            for (long j = 0; j < k; ++j) j1 += noise.atoms[pick_mark(rng.jump_mark())].lam1;
        }

        psi = psi + (params.A - params.mu1 * psi) * dt + noise.sigma1 * psi * sq * z +
              psi * j1 - psi * dt * comp.c1;
        if (!std::isfinite(psi)) throw NonFiniteState(t_next);
        psi = clamp_floor(psi, config.positivity_floor, path.clamped_steps);

        if ((i + 1) % static_cast<long long>(config.record_stride) == 0 || i + 1 == n) {
            path.times.push_back(t_next);
            path.values.push_back(psi);
        }
    }
    return path;
}

} // namespace sirlevy
