#include "sirlevy/config.hpp"

#include "sirlevy/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <limits>

namespace sirlevy {

using nlohmann::json;

const char* to_string(Mode m) {
    switch (m) {
        case Mode::Full: return "full";
        case Mode::Deterministic: return "deterministic";
        case Mode::DegenerateDiffusion: return "degenerate-diffusion";
    }
    return "full";
}

namespace {

Mode mode_from_string(const std::string& s) {
    if (s == "full") return Mode::Full;
    if (s == "deterministic") return Mode::Deterministic;
    if (s == "degenerate-diffusion") return Mode::DegenerateDiffusion;
    throw ParseError("mode must be \"full\", \"deterministic\" or \"degenerate-diffusion\", got \"" +
                     s + "\"");
}

Regime regime_from_string(const std::string& s) {
    if (s == "ExtinctionPredicted") return Regime::ExtinctionPredicted;
    if (s == "PersistencePredicted") return Regime::PersistencePredicted;
    if (s == "Indeterminate") return Regime::Indeterminate;
    throw ParseError("unknown regime \"" + s + "\"");
}

// Non-finite doubles (the -inf slope sentinel, NaN diagnostics) would dump as
// null; encode them as strings instead so reports round-trip losslessly.
json dnum(double v) {
    return std::isfinite(v) ? json(v) : json(format_double(v));
}

double get_dnum(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    throw ParseError(std::string("field \"") + key + "\" must be a number");
}

// Typed field access with the key name in every error message.
double get_number(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number()) throw ParseError(std::string("field \"") + key + "\" must be a number");
    return v.get<double>();
}

std::uint64_t get_uint(const json& j, const char* key, std::uint64_t fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number_unsigned() && !v.is_number_integer())
        throw ParseError(std::string("field \"") + key + "\" must be a nonnegative integer");
    if (v.is_number_integer() && v.get<std::int64_t>() < 0)
        throw ParseError(std::string("field \"") + key + "\" must be a nonnegative integer");
    return v.get<std::uint64_t>();
}

} // namespace

void to_json(json& j, const ModelParams& v) {
    j = json{{"A", v.A},       {"mu1", v.mu1},   {"mu2", v.mu2},
             {"gamma", v.gamma}, {"beta", v.beta}, {"eta", v.eta}};
}

void from_json(const json& j, ModelParams& v) {
    v.A = get_number(j, "A", v.A);
    v.mu1 = get_number(j, "mu1", v.mu1);
    v.mu2 = get_number(j, "mu2", v.mu2);
    v.gamma = get_number(j, "gamma", v.gamma);
    v.beta = get_number(j, "beta", v.beta);
    v.eta = get_number(j, "eta", v.eta);
}

void to_json(json& j, const LevyAtom& v) {
    j = json{{"weight", v.weight}, {"lam1", v.lam1}, {"lam2", v.lam2}, {"lam4", v.lam4}};
}

void from_json(const json& j, LevyAtom& v) {
    v.weight = get_number(j, "weight", v.weight);
    v.lam1 = get_number(j, "lam1", v.lam1);
    v.lam2 = get_number(j, "lam2", v.lam2);
    v.lam4 = get_number(j, "lam4", v.lam4);
}

void to_json(json& j, const NoiseSpec& v) {
    j = json{{"sigma1", v.sigma1}, {"sigma2", v.sigma2}, {"sigma4", v.sigma4},
             {"atoms", v.atoms}};
}

void from_json(const json& j, NoiseSpec& v) {
    v.sigma1 = get_number(j, "sigma1", v.sigma1);
    v.sigma2 = get_number(j, "sigma2", v.sigma2);
    v.sigma4 = get_number(j, "sigma4", v.sigma4);
    v.atoms.clear();
    if (j.contains("atoms")) {
        const auto& a = j.at("atoms");
        if (!a.is_array()) throw ParseError("field \"atoms\" must be an array");
        v.atoms = a.get<std::vector<LevyAtom>>();
    }
}

void to_json(json& j, const SimConfig& v) {
    j = json{{"dt", v.dt},
             {"horizon", v.horizon},
             {"seed", v.seed},
             {"record_stride", v.record_stride},
             {"positivity_floor", v.positivity_floor}};
}

void from_json(const json& j, SimConfig& v) {
    v.dt = get_number(j, "dt", v.dt);
    v.horizon = get_number(j, "horizon", v.horizon);
    v.seed = get_uint(j, "seed", v.seed);
    v.record_stride = static_cast<std::size_t>(get_uint(j, "record_stride", v.record_stride));
    v.positivity_floor = get_number(j, "positivity_floor", v.positivity_floor);
}

void to_json(json& j, const State& v) {
    j = json{{"s", v.s}, {"i", v.i}, {"d", v.d}};
}

void from_json(const json& j, State& v) {
    v.s = get_number(j, "s", v.s);
    v.i = get_number(j, "i", v.i);
    v.d = get_number(j, "d", v.d);
}

void to_json(json& j, const AnalysisSettings& v) {
    j = json{{"epsilon", v.epsilon},
             {"tail_fraction", v.tail_fraction},
             {"n_seeds", v.n_seeds},
             {"mean_tolerance", v.mean_tolerance},
             {"square_tolerance", v.square_tolerance}};
    if (v.window)
        j["window"] = json::array({v.window->start, v.window->end});
    else
        j["window"] = nullptr;
}

void from_json(const json& j, AnalysisSettings& v) {
    v.epsilon = get_number(j, "epsilon", v.epsilon);
    v.tail_fraction = get_number(j, "tail_fraction", v.tail_fraction);
    v.n_seeds = static_cast<std::size_t>(get_uint(j, "n_seeds", v.n_seeds));
    v.mean_tolerance = get_number(j, "mean_tolerance", v.mean_tolerance);
    v.square_tolerance = get_number(j, "square_tolerance", v.square_tolerance);
    v.window.reset();
    if (j.contains("window") && !j.at("window").is_null()) {
        const auto& w = j.at("window");
        if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number())
            throw ParseError("field \"window\" must be [start, end]");
        v.window = Window{w[0].get<double>(), w[1].get<double>()};
    }
}

void to_json(json& j, const ScenarioConfig& v) {
    j = json{{"model", v.model},       {"noise", v.noise},
             {"sim", v.sim},           {"initial", v.initial},
             {"analysis", v.analysis}, {"mode", to_string(v.mode)}};
}

void from_json(const json& j, ScenarioConfig& v) {
    if (j.contains("model")) v.model = j.at("model").get<ModelParams>();
    if (j.contains("noise")) v.noise = j.at("noise").get<NoiseSpec>();
    if (j.contains("sim")) v.sim = j.at("sim").get<SimConfig>();
    if (j.contains("initial")) v.initial = j.at("initial").get<State>();
    if (j.contains("analysis")) v.analysis = j.at("analysis").get<AnalysisSettings>();
    if (j.contains("mode")) {
        const auto& m = j.at("mode");
        if (!m.is_string()) throw ParseError("field \"mode\" must be a string");
        v.mode = mode_from_string(m.get<std::string>());
    }
}

void to_json(json& j, const ExtinctionThresholds& v) {
    j = json{{"t_star", v.t_star},         {"upsilon", v.upsilon},
             {"pi_term", v.pi_term},       {"sigma_term", v.sigma_term},
             {"lambda_term", v.lambda_term}, {"chi2", v.chi2},
             {"theta", v.theta}};
}

void from_json(const json& j, ExtinctionThresholds& v) {
    v.t_star = j.at("t_star").get<double>();
    v.upsilon = j.at("upsilon").get<double>();
    v.pi_term = j.at("pi_term").get<double>();
    v.sigma_term = j.at("sigma_term").get<double>();
    v.lambda_term = j.at("lambda_term").get<double>();
    v.chi2 = j.at("chi2").get<double>();
    v.theta = j.at("theta").get<double>();
}

void to_json(json& j, const PersistenceThresholds& v) {
    j = json{{"sbar1", v.sbar1},
             {"sbar2", v.sbar2},
             {"sbar4", v.sbar4},
             {"t_tilde", v.t_tilde},
             {"c1", v.c1},
             {"c2", v.c2},
             {"c3", v.c3},
             {"persistence_lower_bound", v.persistence_lower_bound}};
}

void from_json(const json& j, PersistenceThresholds& v) {
    v.sbar1 = j.at("sbar1").get<double>();
    v.sbar2 = j.at("sbar2").get<double>();
    v.sbar4 = j.at("sbar4").get<double>();
    v.t_tilde = j.at("t_tilde").get<double>();
    v.c1 = j.at("c1").get<double>();
    v.c2 = j.at("c2").get<double>();
    v.c3 = j.at("c3").get<double>();
    v.persistence_lower_bound = j.at("persistence_lower_bound").get<double>();
}

void to_json(json& j, const FullThresholdReport& v) {
    j = json{{"persistence", v.persistence}, {"regime", to_string(v.regime)}};
    if (v.extinction)
        j["extinction"] = *v.extinction;
    else
        j["extinction"] = nullptr;
    j["extinction_error"] = v.extinction_error;
}

void from_json(const json& j, FullThresholdReport& v) {
    v.persistence = j.at("persistence").get<PersistenceThresholds>();
    v.regime = regime_from_string(j.at("regime").get<std::string>());
    v.extinction.reset();
    if (!j.at("extinction").is_null())
        v.extinction = j.at("extinction").get<ExtinctionThresholds>();
    v.extinction_error = j.at("extinction_error").get<std::string>();
}

void to_json(json& j, const HypothesisVerdict& v) {
    j = json{{"name", v.name},
             {"satisfied", v.satisfied},
             {"quantity", dnum(v.quantity)},
             {"detail", v.detail}};
}

void from_json(const json& j, HypothesisVerdict& v) {
    v.name = j.at("name").get<std::string>();
    v.satisfied = j.at("satisfied").get<bool>();
    v.quantity = get_dnum(j, "quantity");
    v.detail = j.at("detail").get<std::string>();
}

void to_json(json& j, const MomentCheck& v) {
    j = json{{"p", v.p},
             {"vartheta", v.vartheta},
             {"sigma_bar", v.sigma_bar},
             {"ell_p", v.ell_p},
             {"chi1p", v.chi1p}};
}

void from_json(const json& j, MomentCheck& v) {
    v.p = j.at("p").get<double>();
    v.vartheta = j.at("vartheta").get<double>();
    v.sigma_bar = j.at("sigma_bar").get<double>();
    v.ell_p = j.at("ell_p").get<double>();
    v.chi1p = j.at("chi1p").get<double>();
}

void to_json(json& j, const ExtinctionVerdict& v) {
    j = json{{"extinct", v.extinct}, {"final_i", v.final_i}, {"slope", dnum(v.slope)}};
}

void from_json(const json& j, ExtinctionVerdict& v) {
    v.extinct = j.at("extinct").get<bool>();
    v.final_i = j.at("final_i").get<double>();
    v.slope = get_dnum(j, "slope");
}

void to_json(json& j, const PersistenceVerdict& v) {
    j = json{{"persistent", v.persistent},
             {"tail_mean_i", v.tail_mean_i},
             {"bound", v.bound}};
}

void from_json(const json& j, PersistenceVerdict& v) {
    v.persistent = j.at("persistent").get<bool>();
    v.tail_mean_i = j.at("tail_mean_i").get<double>();
    v.bound = j.at("bound").get<double>();
}

void to_json(json& j, const RunRecord& v) {
    j = json{{"seed", v.seed},
             {"final_state", v.final_state},
             {"tail_mean_i", v.tail_mean_i},
             {"slope", dnum(v.slope)},
             {"extinct", v.extinct},
             {"persistent", v.persistent},
             {"clamped_steps", v.clamped_steps}};
}

void from_json(const json& j, RunRecord& v) {
    v.seed = j.at("seed").get<std::uint64_t>();
    v.final_state = j.at("final_state").get<State>();
    v.tail_mean_i = j.at("tail_mean_i").get<double>();
    v.slope = get_dnum(j, "slope");
    v.extinct = j.at("extinct").get<bool>();
    v.persistent = j.at("persistent").get<bool>();
    v.clamped_steps = j.at("clamped_steps").get<std::size_t>();
}

void to_json(json& j, const Aggregate& v) {
    j = json{{"mean", dnum(v.mean)},
             {"sd", dnum(v.sd)},
             {"q05", dnum(v.q05)},
             {"q50", dnum(v.q50)},
             {"q95", dnum(v.q95)}};
}

void from_json(const json& j, Aggregate& v) {
    v.mean = get_dnum(j, "mean");
    v.sd = get_dnum(j, "sd");
    v.q05 = get_dnum(j, "q05");
    v.q50 = get_dnum(j, "q50");
    v.q95 = get_dnum(j, "q95");
}

void to_json(json& j, const EnsembleSummary& v) {
    j = json{{"n_runs", v.n_runs},
             {"records", v.records},
             {"final_s", v.final_s},
             {"final_i", v.final_i},
             {"final_d", v.final_d},
             {"tail_mean_i", v.tail_mean_i},
             {"slope", v.slope},
             {"fraction_extinct", v.fraction_extinct},
             {"fraction_persistent", v.fraction_persistent},
             {"persistence_bound", v.persistence_bound}};
}

void from_json(const json& j, EnsembleSummary& v) {
    v.n_runs = j.at("n_runs").get<std::size_t>();
    v.records = j.at("records").get<std::vector<RunRecord>>();
    v.final_s = j.at("final_s").get<Aggregate>();
    v.final_i = j.at("final_i").get<Aggregate>();
    v.final_d = j.at("final_d").get<Aggregate>();
    v.tail_mean_i = j.at("tail_mean_i").get<Aggregate>();
    v.slope = j.at("slope").get<Aggregate>();
    v.fraction_extinct = j.at("fraction_extinct").get<double>();
    v.fraction_persistent = j.at("fraction_persistent").get<double>();
    v.persistence_bound = j.at("persistence_bound").get<double>();
}

void to_json(json& j, const LemmaVerdict& v) {
    j = json{{"mean_estimate", v.mean_estimate},
             {"mean_target", v.mean_target},
             {"mean_rel_error", v.mean_rel_error},
             {"mean_ok", v.mean_ok},
             {"square_estimate", v.square_estimate},
             {"square_target", v.square_target},
             {"square_rel_error", v.square_rel_error},
             {"square_ok", v.square_ok},
             {"passed", v.passed}};
}

void from_json(const json& j, LemmaVerdict& v) {
    v.mean_estimate = j.at("mean_estimate").get<double>();
    v.mean_target = j.at("mean_target").get<double>();
    v.mean_rel_error = j.at("mean_rel_error").get<double>();
    v.mean_ok = j.at("mean_ok").get<bool>();
    v.square_estimate = j.at("square_estimate").get<double>();
    v.square_target = j.at("square_target").get<double>();
    v.square_rel_error = j.at("square_rel_error").get<double>();
    v.square_ok = j.at("square_ok").get<bool>();
    v.passed = j.at("passed").get<bool>();
}

void to_json(json& j, const Provenance& v) {
    j = json{{"tool_version", v.tool_version}, {"seed", v.seed}, {"timestamp", v.timestamp}};
}

void from_json(const json& j, Provenance& v) {
    v.tool_version = j.at("tool_version").get<std::string>();
    v.seed = j.at("seed").get<std::uint64_t>();
    v.timestamp = j.at("timestamp").get<std::string>();
}

namespace {

template <typename T>
void optional_to_json(json& j, const char* key, const std::optional<T>& v) {
    if (v)
        j[key] = *v;
    else
        j[key] = nullptr;
}

template <typename T>
void optional_from_json(const json& j, const char* key, std::optional<T>& v) {
    v.reset();
    if (j.contains(key) && !j.at(key).is_null()) v = j.at(key).get<T>();
}

} // namespace

void to_json(json& j, const RunReport& v) {
    j = json{{"config", v.config},
             {"thresholds", v.thresholds},
             {"hypotheses", v.hypotheses},
             {"provenance", v.provenance}};
    optional_to_json(j, "extinction_verdict", v.extinction);
    optional_to_json(j, "persistence_verdict", v.persistence);
    optional_to_json(j, "ensemble", v.ensemble);
    optional_to_json(j, "lemma2", v.lemma2);
}

void from_json(const json& j, RunReport& v) {
    v.config = j.at("config").get<ScenarioConfig>();
    v.thresholds = j.at("thresholds").get<FullThresholdReport>();
    v.hypotheses = j.at("hypotheses").get<std::vector<HypothesisVerdict>>();
    v.provenance = j.at("provenance").get<Provenance>();
    optional_from_json(j, "extinction_verdict", v.extinction);
    optional_from_json(j, "persistence_verdict", v.persistence);
    optional_from_json(j, "ensemble", v.ensemble);
    optional_from_json(j, "lemma2", v.lemma2);
}

void validate(const ScenarioConfig& c) {
    validate(c.model);
    validate(c.noise);
    if (!(std::isfinite(c.sim.dt) && c.sim.dt > 0.0))
        throw ValidationError("sim.dt must be finite and > 0");
    if (!(std::isfinite(c.sim.horizon) && c.sim.horizon >= c.sim.dt))
        throw ValidationError("sim.horizon must be finite and >= dt");
    if (c.sim.record_stride < 1) throw ValidationError("sim.record_stride must be >= 1");
    if (!(std::isfinite(c.sim.positivity_floor) && c.sim.positivity_floor >= 0.0))
        throw ValidationError("sim.positivity_floor must be finite and >= 0");
    if (!(std::isfinite(c.initial.s) && c.initial.s > 0.0 && std::isfinite(c.initial.i) &&
          c.initial.i > 0.0 && std::isfinite(c.initial.d) && c.initial.d > 0.0))
        throw ValidationError("initial state must be componentwise finite and > 0");
    if (!(c.analysis.epsilon > 0.0))
        throw ValidationError("analysis.epsilon must be > 0");
    if (!(c.analysis.tail_fraction > 0.0 && c.analysis.tail_fraction < 1.0))
        throw ValidationError("analysis.tail_fraction must be in (0, 1)");
    if (c.analysis.n_seeds < 1) throw ValidationError("analysis.n_seeds must be >= 1");
    if (!(c.analysis.mean_tolerance > 0.0 && c.analysis.square_tolerance > 0.0))
        throw ValidationError("analysis tolerances must be > 0");
    if (c.analysis.window) {
        const Window& w = *c.analysis.window;
        if (!(w.start >= 0.0 && w.end > w.start))
            throw ValidationError("analysis.window must satisfy 0 <= start < end");
        if (w.end > c.sim.horizon * (1.0 + 1e-12))
            throw ValidationError("analysis.window must lie within the horizon");
    }

    if (c.mode == Mode::Deterministic) {
        if (c.noise.sigma1 != 0.0 || c.noise.sigma2 != 0.0 || c.noise.sigma4 != 0.0 ||
            !c.noise.atoms.empty())
            throw ValidationError("deterministic mode requires all noise off "
                                  "(sigma1 = sigma2 = sigma4 = 0, no atoms)");
    } else if (c.mode == Mode::DegenerateDiffusion) {
        if (c.noise.sigma2 != 0.0 || c.noise.sigma4 != 0.0)
            throw ValidationError("degenerate-diffusion mode requires sigma2 = sigma4 = 0");
        for (std::size_t k = 0; k < c.noise.atoms.size(); ++k)
            if (c.noise.atoms[k].lam2 != 0.0 || c.noise.atoms[k].lam4 != 0.0)
                throw ValidationError("degenerate-diffusion mode requires atom " +
                                      std::to_string(k) + " to have lam2 = lam4 = 0");
    }
}

ScenarioConfig apply_mode(const ScenarioConfig& base, Mode mode) {
    ScenarioConfig c = base;
    c.mode = mode;
    switch (mode) {
        case Mode::Full:
            break;
        case Mode::Deterministic:
            c.noise = NoiseSpec{};
            break;
        case Mode::DegenerateDiffusion:
            c.noise.sigma2 = 0.0;
            c.noise.sigma4 = 0.0;
            c.noise.atoms.clear();
            break;
    }
    return c;
}

std::optional<ScenarioConfig> preset(const std::string& name) {
    ScenarioConfig c;
    c.sim.dt = 0.01;
    c.sim.horizon = 1000.0;
    c.sim.record_stride = 10;
    c.analysis.window = Window{500.0, 1000.0};

    if (name == "fig1") {
        c.model = {0.9, 0.3, 0.5, 0.05, 0.07, 0.09};
        c.noise = {0.15, 0.25, 0.27, {{1.0, 0.2, 0.23, 0.1}}};
        c.initial = {0.6, 0.3, 0.05};
        c.sim.seed = 101;
        return c;
    }
    if (name == "fig2") {
        c.model = {0.3, 0.3, 0.5, 0.05, 1.3, 0.09};
        c.noise = {0.15, 0.25, 0.27, {{1.0, 0.2, 0.23, 0.1}}};
        c.initial = {0.6, 0.3, 0.05};
        c.sim.seed = 202;
        return c;
    }
    if (name == "fig3") {
        c.model = {0.6, 0.4, 0.3, 0.2, 0.35, 0.7};
        c.noise = {0.2, 0.15, 0.13, {{1.0, 0.5, 0.3, 0.7}}};
        c.initial = {0.2, 0.3, 0.4};
        c.sim.seed = 303;
        return c;
    }
    if (name == "fig4") {
        c.model = {0.6, 0.4, 0.3, 0.3, 0.8, 0.2};
        c.noise = {0.169, 0.15, 0.13, {{1.0, 0.5, 0.3, 0.7}}};
        c.initial = {0.2, 0.3, 0.4};
        c.sim.seed = 404;
        return c;
    }
    return std::nullopt;
}

std::vector<std::string> preset_names() { return {"fig1", "fig2", "fig3", "fig4"}; }

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file: " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        const std::size_t upto = std::min(e.byte, text.size());
        for (std::size_t i = 0; i < upto; ++i)
            if (text[i] == '\n') ++line;
        throw ParseError(path.string() + ":" + std::to_string(line) + ": " + e.what());
    }

    ScenarioConfig cfg;
    try {
        cfg = j.get<ScenarioConfig>();
    } catch (const ParseError&) {
        throw;
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    validate(cfg);
    return cfg;
}

void save_config(const std::filesystem::path& path, const ScenarioConfig& config) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << json(config).dump(2) << "\n";
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    const bool with_psi = traj.psi.has_value();
    out << (with_psi ? "t,S,I,D,psi\n" : "t,S,I,D\n");
    std::string row;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        row.clear();
        row += format_double(traj.times[k]);
        row += ',';
        row += format_double(traj.states[k].s);
        row += ',';
        row += format_double(traj.states[k].i);
        row += ',';
        row += format_double(traj.states[k].d);
        if (with_psi) {
            row += ',';
            row += format_double((*traj.psi)[k]);
        }
        row += '\n';
        out << row;
    }
}

std::vector<ScanRow> scan_param(const ScenarioConfig& base, const std::string& param,
                                double from, double to, int steps) {
    if (steps < 1) throw ValidationError("scan: steps must be >= 1");
    if (!(std::isfinite(from) && std::isfinite(to)))
        throw ValidationError("scan: from/to must be finite");

    std::vector<ScanRow> rows;
    rows.reserve(static_cast<std::size_t>(steps));
    for (int k = 0; k < steps; ++k) {
        const double value =
            steps == 1 ? from : from + (to - from) * static_cast<double>(k) /
                                           static_cast<double>(steps - 1);
        ScenarioConfig c = base;
        if (param == "A") c.model.A = value;
        else if (param == "mu1") c.model.mu1 = value;
        else if (param == "mu2") c.model.mu2 = value;
        else if (param == "gamma") c.model.gamma = value;
        else if (param == "beta") c.model.beta = value;
        else if (param == "eta") c.model.eta = value;
        else if (param == "sigma1") c.noise.sigma1 = value;
        else if (param == "sigma2") c.noise.sigma2 = value;
        else if (param == "sigma4") c.noise.sigma4 = value;
        else
            throw ValidationError("scan: unknown parameter \"" + param +
                                  "\" (expected A, mu1, mu2, gamma, beta, eta, "
                                  "sigma1, sigma2 or sigma4)");

        const FullThresholdReport rep = threshold_report(c.model, c.noise);
        ScanRow row;
        row.value = value;
        row.t_star = basic_reproduction_number(c.model);
        if (rep.extinction) row.theta = rep.extinction->theta;
        row.t_tilde = rep.persistence.t_tilde;
        row.regime = rep.regime;
        rows.push_back(row);
    }
    return rows;
}

void write_scan_csv(const std::filesystem::path& path, const std::vector<ScanRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "value,t_star,theta,t_tilde,regime\n";
    for (const auto& r : rows) {
        out << format_double(r.value) << ',' << format_double(r.t_star) << ','
            << (r.theta ? format_double(*r.theta) : "nan") << ','
            << format_double(r.t_tilde) << ',' << to_string(r.regime) << '\n';
    }
}

Provenance make_provenance(std::uint64_t seed) {
    Provenance p;
    p.tool_version = kToolVersion;
    p.seed = seed;
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    p.timestamp = buf;
    return p;
}

void write_report(const std::filesystem::path& path, const RunReport& report) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << json(report).dump(2) << "\n";
}

RunReport read_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open report file: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    try {
        return j.get<RunReport>();
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

std::filesystem::path resolve_output_dir(const std::string& override_dir) {
    std::filesystem::path dir = ".";
    if (!override_dir.empty()) {
        dir = override_dir;
    } else if (const char* env = std::getenv("SIRLEVY_OUTPUT_DIR")) {
        if (*env) dir = env;
    }
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace sirlevy
