#include "sirlevy/analysis.hpp"

#include "sirlevy/errors.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>

namespace sirlevy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t first_index_at_or_after(std::span<const double> times, double t0) {
    return static_cast<std::size_t>(
        std::lower_bound(times.begin(), times.end(), t0) - times.begin());
}

std::vector<double> component_values(const Trajectory& traj, Component c) {
    if (c == Component::Psi) {
        if (!traj.psi)
            throw ValidationError("time_average: trajectory has no psi component");
        return *traj.psi;
    }
    std::vector<double> v;
    v.reserve(traj.states.size());
    for (const auto& x : traj.states)
        v.push_back(c == Component::S ? x.s : c == Component::I ? x.i : x.d);
    return v;
}

} // namespace

AverageSeries time_average(std::span<const double> times, std::span<const double> values,
                           int power, double burn_in) {
    if (power != 1 && power != 2)
        throw ValidationError("time_average: power must be 1 or 2");
    if (!(burn_in >= 0.0 && burn_in < 1.0))
        throw ValidationError("time_average: burn_in must be in [0, 1)");
    if (times.size() != values.size())
        throw ValidationError("time_average: times/values size mismatch");
    if (times.size() < 2) throw EmptyWindow("time_average: need at least two points");

    const double t0 = burn_in * times.back();
    const std::size_t first = first_index_at_or_after(times, t0);
    if (times.size() - first < 2)
        throw EmptyWindow("time_average: fewer than two points past burn-in");

    const auto f = [power](double v) { return power == 1 ? v : v * v; };

    AverageSeries out;
    out.times.reserve(times.size() - first);
    out.running.reserve(times.size() - first);
    out.times.push_back(times[first]);
    out.running.push_back(f(values[first]));

    double acc = 0.0;
    for (std::size_t i = first + 1; i < times.size(); ++i) {
        acc += 0.5 * (f(values[i]) + f(values[i - 1])) * (times[i] - times[i - 1]);
        out.times.push_back(times[i]);
        out.running.push_back(acc / (times[i] - times[first]));
    }
    out.value = out.running.back();
    return out;
}

AverageSeries time_average(const Trajectory& traj, Component component, int power,
                           double burn_in) {
    const std::vector<double> v = component_values(traj, component);
    return time_average(traj.times, v, power, burn_in);
}

double weighted_log_slope(const Trajectory& traj, double w1, double w2,
                          double tail_fraction) {
    if (!(tail_fraction > 0.0 && tail_fraction < 1.0))
        throw ValidationError("lyapunov_slope: tail_fraction must be in (0, 1)");
    if (!(w1 > 0.0 && w2 > 0.0))
        throw ValidationError("lyapunov_slope: weights must be > 0");
    if (traj.times.size() < 2) throw EmptyWindow("lyapunov_slope: trajectory too short");

    const double t0 = (1.0 - tail_fraction) * traj.times.back();
    const std::size_t first = first_index_at_or_after(traj.times, t0);
    const std::size_t n = traj.times.size() - first;
    if (n < 2) throw EmptyWindow("lyapunov_slope: fewer than two points in tail");

    double mean_t = 0.0, mean_y = 0.0;
    std::vector<double> ys(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto& x = traj.states[first + k];
        const double m = w1 * x.i + w2 * x.d;
        if (!(m > 0.0)) return -kInf;
        ys[k] = std::log(m);
        mean_t += traj.times[first + k];
        mean_y += ys[k];
    }
    mean_t /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);

    double sty = 0.0, stt = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double dt = traj.times[first + k] - mean_t;
        sty += dt * (ys[k] - mean_y);
        stt += dt * dt;
    }
    if (stt == 0.0) throw EmptyWindow("lyapunov_slope: degenerate time window");
    return sty / stt;
}

double lyapunov_slope(const Trajectory& traj, const ModelParams& params,
                      double tail_fraction) {
    validate(params);
    const double w1 = 1.0 / (params.mu2 + params.gamma);
    const double w2 = std::sqrt(basic_reproduction_number(params)) / params.eta;
    return weighted_log_slope(traj, w1, w2, tail_fraction);
}

ExtinctionVerdict extinction_verdict(const Trajectory& traj, const ModelParams& params,
                                     double epsilon, double tail_fraction) {
    if (!(epsilon > 0.0)) throw ValidationError("extinction_verdict: epsilon must be > 0");
    ExtinctionVerdict v;
    v.final_i = traj.states.back().i;
    v.slope = lyapunov_slope(traj, params, tail_fraction);
    v.extinct = v.final_i < epsilon && v.slope < 0.0;
    return v;
}

PersistenceVerdict persistence_verdict(const Trajectory& traj, Window window, double bound) {
    if (!(window.end > window.start && window.start >= 0.0))
        throw ValidationError("persistence_verdict: window must satisfy 0 <= start < end");
    if (window.end > traj.times.back() * (1.0 + 1e-12))
        throw ValidationError("persistence_verdict: window extends past the horizon");

    const std::size_t first = first_index_at_or_after(traj.times, window.start);
    std::size_t last = first_index_at_or_after(traj.times, window.end);
    if (last < traj.times.size() && traj.times[last] <= window.end) ++last;
    if (last - first < 2) throw EmptyWindow("persistence_verdict: window has < 2 points");

    double acc = 0.0;
    for (std::size_t i = first + 1; i < last; ++i)
        acc += 0.5 * (traj.states[i].i + traj.states[i - 1].i) *
               (traj.times[i] - traj.times[i - 1]);

    PersistenceVerdict v;
    v.bound = std::max(bound, 1e-6);
    v.tail_mean_i = acc / (traj.times[last - 1] - traj.times[first]);
    v.persistent = v.tail_mean_i > v.bound;
    return v;
}

Window effective_window(const AnalysisSettings& settings, double horizon) {
    if (settings.window) return *settings.window;
    return Window{0.5 * horizon, horizon};
}

Aggregate aggregate(std::span<const double> values) {
    Aggregate a;
    if (values.empty()) return a;
    const double n = static_cast<double>(values.size());

    double sum = 0.0;
    for (double v : values) sum += v;
    a.mean = sum / n;

    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - a.mean) * (v - a.mean);
        a.sd = std::sqrt(ss / (n - 1.0));
    }

    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const auto quantile = [&sorted](double q) {
        const double h = q * static_cast<double>(sorted.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(h);
        const double frac = h - static_cast<double>(lo);
        if (frac == 0.0 || lo + 1 == sorted.size()) return sorted[lo];
        const double a0 = sorted[lo], a1 = sorted[lo + 1];
        if (!std::isfinite(a0) || !std::isfinite(a1))
            return frac <= 0.5 ? a0 : a1; // nearest rank when a sentinel is involved
        return a0 + frac * (a1 - a0);
    };
    a.q05 = quantile(0.05);
    a.q50 = quantile(0.50);
    a.q95 = quantile(0.95);
    return a;
}

EnsembleSummary summarize(std::vector<RunRecord> records, double persistence_bound) {
    std::sort(records.begin(), records.end(),
              [](const RunRecord& a, const RunRecord& b) { return a.seed < b.seed; });

    EnsembleSummary s;
    s.n_runs = records.size();
    s.persistence_bound = persistence_bound;

    std::vector<double> fs, fi, fd, tm, sl;
    fs.reserve(records.size());
    fi.reserve(records.size());
    fd.reserve(records.size());
    tm.reserve(records.size());
    sl.reserve(records.size());
    std::size_t n_ext = 0, n_per = 0;
    for (const auto& r : records) {
        fs.push_back(r.final_state.s);
        fi.push_back(r.final_state.i);
        fd.push_back(r.final_state.d);
        tm.push_back(r.tail_mean_i);
        sl.push_back(r.slope);
        n_ext += r.extinct ? 1 : 0;
        n_per += r.persistent ? 1 : 0;
    }
    s.final_s = aggregate(fs);
    s.final_i = aggregate(fi);
    s.final_d = aggregate(fd);
    s.tail_mean_i = aggregate(tm);
    s.slope = aggregate(sl);
    if (!records.empty()) {
        s.fraction_extinct = static_cast<double>(n_ext) / static_cast<double>(records.size());
        s.fraction_persistent =
            static_cast<double>(n_per) / static_cast<double>(records.size());
    }
    s.records = std::move(records);
    return s;
}

namespace {

RunRecord run_member(const ModelParams& params, const NoiseSpec& noise,
                     const State& initial, SimConfig cfg, std::uint64_t seed,
                     const AnalysisSettings& st, Window window, double bound) {
    cfg.seed = seed;
    Trajectory traj;
    try {
        traj = simulate(initial, params, noise, cfg);
    } catch (const NonFiniteState& e) {
        throw NonFiniteState(e.time, seed);
    }

    RunRecord r;
    r.seed = seed;
    r.final_state = traj.states.back();
    r.clamped_steps = traj.clamped_steps;
    const ExtinctionVerdict ext = extinction_verdict(traj, params, st.epsilon, st.tail_fraction);
    r.slope = ext.slope;
    r.extinct = ext.extinct;
    const PersistenceVerdict per = persistence_verdict(traj, window, bound);
    r.tail_mean_i = per.tail_mean_i;
    r.persistent = per.persistent;
    return r;
}

EnsembleSummary run_ensemble_impl(const ModelParams& params, const NoiseSpec& noise,
                                  const State& initial, const SimConfig& base,
                                  std::size_t n_seeds, const AnalysisSettings& settings,
                                  bool parallel) {
    validate(params);
    validate(noise);
    if (n_seeds < 1) throw ValidationError("ensemble: n_seeds must be >= 1");

    const Window window = effective_window(settings, base.horizon);
    const double bound = persistence_report(params, noise).persistence_lower_bound;

    std::vector<RunRecord> records(n_seeds);
    std::vector<std::exception_ptr> errors(n_seeds);

    const long long n = static_cast<long long>(n_seeds);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
    for (long long i = 0; i < n; ++i) {
        try {
            records[static_cast<std::size_t>(i)] =
                run_member(params, noise, initial, base,
                           base.seed + static_cast<std::uint64_t>(i), settings, window,
                           bound);
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    (void)parallel;
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    return summarize(std::move(records), bound);
}

} // namespace

EnsembleSummary run_ensemble(const ModelParams& params, const NoiseSpec& noise,
                             const State& initial, const SimConfig& base,
                             std::size_t n_seeds, const AnalysisSettings& settings) {
    return run_ensemble_impl(params, noise, initial, base, n_seeds, settings, true);
}

EnsembleSummary run_ensemble_serial(const ModelParams& params, const NoiseSpec& noise,
                                    const State& initial, const SimConfig& base,
                                    std::size_t n_seeds, const AnalysisSettings& settings) {
    return run_ensemble_impl(params, noise, initial, base, n_seeds, settings, false);
}

LemmaVerdict verify_lemma2(const ModelParams& params, const NoiseSpec& noise,
                           const SimConfig& base, double psi0, std::size_t n_seeds,
                           double mean_tolerance, double square_tolerance) {
    validate(params);
    validate(noise);
    if (n_seeds < 1) throw ValidationError("verify_lemma2: n_seeds must be >= 1");
    if (!(mean_tolerance > 0.0 && square_tolerance > 0.0))
        throw ValidationError("verify_lemma2: tolerances must be > 0");
    const double x2 = chi2(params, noise);
    if (x2 <= 0.0) throw ChiTwoNonPositive(x2);

    std::vector<double> means(n_seeds), squares(n_seeds);
    std::vector<std::exception_ptr> errors(n_seeds);
    const long long n = static_cast<long long>(n_seeds);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long long i = 0; i < n; ++i) {
        try {
            SimConfig cfg = base;
            cfg.seed = base.seed + static_cast<std::uint64_t>(i);
            const PsiPath path = simulate_psi(psi0, params, noise, cfg);
            means[static_cast<std::size_t>(i)] =
                time_average(path.times, path.values, 1, 0.0).value;
            squares[static_cast<std::size_t>(i)] =
                time_average(path.times, path.values, 2, 0.0).value;
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    LemmaVerdict v;
    double sum1 = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < n_seeds; ++i) {
        sum1 += means[i];
        sum2 += squares[i];
    }
    v.mean_estimate = sum1 / static_cast<double>(n_seeds);
    v.square_estimate = sum2 / static_cast<double>(n_seeds);
    v.mean_target = params.A / params.mu1;
    v.square_target = 2.0 * params.A * params.A / (params.mu1 * x2);
    v.mean_rel_error = std::abs(v.mean_estimate - v.mean_target) / v.mean_target;
    v.square_rel_error = std::abs(v.square_estimate - v.square_target) / v.square_target;
    v.mean_ok = v.mean_rel_error <= mean_tolerance;
    v.square_ok = v.square_rel_error <= square_tolerance;
    v.passed = v.mean_ok && v.square_ok;
    return v;
}

} // namespace sirlevy
