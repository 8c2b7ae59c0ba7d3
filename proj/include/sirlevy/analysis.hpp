#pragma once

#include "sirlevy/integrator.hpp"
#include "sirlevy/model.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace sirlevy {

enum class Component { S, I, D, Psi };

/// Running time-average series: running[k] approximates
/// (t_k - t_0)^-1 * int_{t_0}^{t_k} v(s)^power ds on the recorded grid
/// (trapezoidal rule), with running[0] = v(t_0)^power as the zero-length
/// limit. `value` is the final entry.
struct AverageSeries {
    std::vector<double> times;
    std::vector<double> running;
    double value = 0.0;
};

/// Time average of values^power over [burn_in * T, T]. power must be 1 or 2,
/// burn_in in [0, 1). Throws EmptyWindow when fewer than two grid points fall
/// inside the window.
AverageSeries time_average(std::span<const double> times, std::span<const double> values,
                           int power, double burn_in);

/// Same, selecting a trajectory component (Psi requires a coupled run).
AverageSeries time_average(const Trajectory& traj, Component component, int power,
                           double burn_in);

/// Least-squares slope of ln(w1*I + w2*D) against t over the final
/// tail_fraction of the horizon. Returns -infinity as soon as the weighted
/// sum is <= 0 anywhere in the window (the path was clamped to the floor;
/// decay is then faster than any exponential we could fit).
double weighted_log_slope(const Trajectory& traj, double w1, double w2,
                          double tail_fraction);

/// weighted_log_slope with the canonical weights w1 = 1/(mu2+gamma),
/// w2 = sqrt(t_star)/eta, which make the slope comparable to the extinction
/// indicator theta.
double lyapunov_slope(const Trajectory& traj, const ModelParams& params,
                      double tail_fraction);

struct ExtinctionVerdict {
    bool extinct = false;
    double final_i = 0.0;
    double slope = 0.0;
};

/// Extinct iff final I < epsilon and the Lyapunov slope is negative
/// (-infinity from a clamped path qualifies).
ExtinctionVerdict extinction_verdict(const Trajectory& traj, const ModelParams& params,
                                     double epsilon, double tail_fraction);

/// Absolute time window [start, end].
struct Window {
    double start = 0.0;
    double end = 0.0;
};

struct PersistenceVerdict {
    bool persistent = false;
    double tail_mean_i = 0.0;
    double bound = 0.0; ///< threshold the mean was compared against
};

/// Persistent iff the trapezoidal time average of I over the window exceeds
/// max(bound, 1e-6). The window must lie within the recorded horizon.
PersistenceVerdict persistence_verdict(const Trajectory& traj, Window window, double bound);

/// Knobs for the verdict layer. `window` defaults to the last half of the
/// horizon when unset.
struct AnalysisSettings {
    double epsilon = 1e-3;        ///< extinction cutoff on final I
    double tail_fraction = 0.5;   ///< slope regression window
    std::optional<Window> window; ///< persistence averaging window
    std::size_t n_seeds = 50;     ///< default ensemble size
    double mean_tolerance = 0.05; ///< relative tolerance on <psi>
    double square_tolerance = 0.10;
};

Window effective_window(const AnalysisSettings& settings, double horizon);

/// Per-member outcome of an ensemble run.
struct RunRecord {
    std::uint64_t seed = 0;
    State final_state;
    double tail_mean_i = 0.0;
    double slope = 0.0;
    bool extinct = false;
    bool persistent = false;
    std::size_t clamped_steps = 0;
};

/// Mean / sample standard deviation / 5%, 50%, 95% quantiles of one statistic.
struct Aggregate {
    double mean = 0.0;
    double sd = 0.0;
    double q05 = 0.0;
    double q50 = 0.0;
    double q95 = 0.0;
};

Aggregate aggregate(std::span<const double> values);

struct EnsembleSummary {
    std::size_t n_runs = 0;
    std::vector<RunRecord> records; ///< sorted by seed
    Aggregate final_s;
    Aggregate final_i;
    Aggregate final_d;
    Aggregate tail_mean_i;
    Aggregate slope;
    double fraction_extinct = 0.0;
    double fraction_persistent = 0.0;
    double persistence_bound = 0.0; ///< bound used for the persistent verdicts
};

/// Deterministic fold of per-member records (sorted by seed) into a summary.
/// Exposed so that aggregates can be recomputed and checked externally.
EnsembleSummary summarize(std::vector<RunRecord> records, double persistence_bound);

/// Runs members with seeds base.seed .. base.seed + n_seeds - 1 and folds the
/// records. The persistence bound comes from persistence_report. The parallel
/// variant distributes members over OpenMP threads; per-member streams make
/// its records identical to the serial variant's, and the fold order is fixed
/// by seed, so both produce bitwise-equal summaries.
EnsembleSummary run_ensemble(const ModelParams& params, const NoiseSpec& noise,
                             const State& initial, const SimConfig& base,
                             std::size_t n_seeds, const AnalysisSettings& settings);

EnsembleSummary run_ensemble_serial(const ModelParams& params, const NoiseSpec& noise,
                                    const State& initial, const SimConfig& base,
                                    std::size_t n_seeds, const AnalysisSettings& settings);

/// Monte Carlo check of the auxiliary-process time-average limits.
struct LemmaVerdict {
    double mean_estimate = 0.0;
    double mean_target = 0.0; ///< A / mu1
    double mean_rel_error = 0.0;
    bool mean_ok = false;
    double square_estimate = 0.0;
    double square_target = 0.0; ///< 2 A^2 / (mu1 chi2)
    double square_rel_error = 0.0;
    bool square_ok = false;
    bool passed = false;
};

/// Simulates psi alone for n_seeds seeds (base.seed + i), time-averages each
/// path from t = 0, averages across seeds and compares with the closed forms.
/// Throws ChiTwoNonPositive when chi2 <= 0 (no finite second-moment limit).
LemmaVerdict verify_lemma2(const ModelParams& params, const NoiseSpec& noise,
                           const SimConfig& base, double psi0, std::size_t n_seeds,
                           double mean_tolerance = 0.05, double square_tolerance = 0.10);

} // namespace sirlevy
