#pragma once

#include "sirlevy/analysis.hpp"
#include "sirlevy/integrator.hpp"
#include "sirlevy/model.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sirlevy {

inline constexpr const char* kToolVersion = "0.1.0";

/// Which variant of the model a scenario runs.
enum class Mode {
    Full,                ///< diffusion + jumps as configured
    Deterministic,       ///< all noise off (pure drift, RK4)
    DegenerateDiffusion, ///< noise on S only: sigma1 kept, sigma2 = sigma4 = 0
};

const char* to_string(Mode mode);

/// Complete description of one runnable scenario.
struct ScenarioConfig {
    ModelParams model;
    NoiseSpec noise;
    SimConfig sim;
    State initial{0.6, 0.3, 0.05};
    AnalysisSettings analysis;
    Mode mode = Mode::Full;
};

/// Checks every cross-field invariant: model/noise/sim validity, initial
/// positivity, analysis ranges, window within horizon, and mode consistency
/// (deterministic: all noise zero and no atoms; degenerate-diffusion:
/// sigma2 = sigma4 = 0 and every atom's lam2 = lam4 = 0).
void validate(const ScenarioConfig& config);

/// Returns a copy of `config` with the noise reduced to what `mode` allows:
/// Deterministic clears everything, DegenerateDiffusion keeps sigma1 only
/// (atoms dropped), Full keeps the noise as-is.
ScenarioConfig apply_mode(const ScenarioConfig& config, Mode mode);

/// Named scenarios fig1..fig4 (full mode). Returns nullopt for unknown names.
std::optional<ScenarioConfig> preset(const std::string& name);
std::vector<std::string> preset_names();

/// Parses and validates a JSON config file. ParseError carries file:line on
/// syntax errors and the offending key on type errors; ValidationError names
/// the violated invariant.
ScenarioConfig load_config(const std::filesystem::path& path);

/// Writes a config back out; save_config(load_config(p)) is field-identical.
void save_config(const std::filesystem::path& path, const ScenarioConfig& config);

/// CSV with header t,S,I,D (plus ,psi when the trajectory carries it),
/// one row per recorded step, '.' decimal separator regardless of locale.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);

/// One row of a parameter scan.
struct ScanRow {
    double value = 0.0;
    double t_star = 0.0;
    std::optional<double> theta; ///< absent when the extinction side is undefined
    double t_tilde = 0.0;
    Regime regime = Regime::Indeterminate;
};

/// Sweeps one parameter (A, mu1, mu2, gamma, beta, eta, sigma1, sigma2,
/// sigma4) across `steps` equally spaced values in [from, to] and reports the
/// thresholds at each point.
std::vector<ScanRow> scan_param(const ScenarioConfig& base, const std::string& param,
                                double from, double to, int steps);

/// CSV with header value,t_star,theta,t_tilde,regime ("nan" for absent theta).
void write_scan_csv(const std::filesystem::path& path, const std::vector<ScanRow>& rows);

struct Provenance {
    std::string tool_version;
    std::uint64_t seed = 0;
    std::string timestamp; ///< ISO 8601 UTC
};

Provenance make_provenance(std::uint64_t seed);

/// Everything a run may want to report; optional blocks are filled per
/// subcommand. Serializes to/from JSON losslessly.
struct RunReport {
    ScenarioConfig config;
    FullThresholdReport thresholds;
    std::vector<HypothesisVerdict> hypotheses;
    std::optional<ExtinctionVerdict> extinction;
    std::optional<PersistenceVerdict> persistence;
    std::optional<EnsembleSummary> ensemble;
    std::optional<LemmaVerdict> lemma2;
    Provenance provenance;
};

void write_report(const std::filesystem::path& path, const RunReport& report);
RunReport read_report(const std::filesystem::path& path);

/// Output directory resolution: explicit override, else $SIRLEVY_OUTPUT_DIR,
/// else the current directory. Created if missing.
std::filesystem::path resolve_output_dir(const std::string& override_dir);

/// Locale-independent shortest-round-trip formatting of a double.
std::string format_double(double v);

// JSON bindings (keys mirror the field names).
void to_json(nlohmann::json& j, const ModelParams& v);
void from_json(const nlohmann::json& j, ModelParams& v);
void to_json(nlohmann::json& j, const LevyAtom& v);
void from_json(const nlohmann::json& j, LevyAtom& v);
void to_json(nlohmann::json& j, const NoiseSpec& v);
void from_json(const nlohmann::json& j, NoiseSpec& v);
void to_json(nlohmann::json& j, const SimConfig& v);
void from_json(const nlohmann::json& j, SimConfig& v);
void to_json(nlohmann::json& j, const State& v);
void from_json(const nlohmann::json& j, State& v);
void to_json(nlohmann::json& j, const AnalysisSettings& v);
void from_json(const nlohmann::json& j, AnalysisSettings& v);
void to_json(nlohmann::json& j, const ScenarioConfig& v);
void from_json(const nlohmann::json& j, ScenarioConfig& v);
void to_json(nlohmann::json& j, const ExtinctionThresholds& v);
void from_json(const nlohmann::json& j, ExtinctionThresholds& v);
void to_json(nlohmann::json& j, const PersistenceThresholds& v);
void from_json(const nlohmann::json& j, PersistenceThresholds& v);
void to_json(nlohmann::json& j, const FullThresholdReport& v);
void from_json(const nlohmann::json& j, FullThresholdReport& v);
void to_json(nlohmann::json& j, const HypothesisVerdict& v);
void from_json(const nlohmann::json& j, HypothesisVerdict& v);
void to_json(nlohmann::json& j, const MomentCheck& v);
void from_json(const nlohmann::json& j, MomentCheck& v);
void to_json(nlohmann::json& j, const ExtinctionVerdict& v);
void from_json(const nlohmann::json& j, ExtinctionVerdict& v);
void to_json(nlohmann::json& j, const PersistenceVerdict& v);
void from_json(const nlohmann::json& j, PersistenceVerdict& v);
void to_json(nlohmann::json& j, const RunRecord& v);
void from_json(const nlohmann::json& j, RunRecord& v);
void to_json(nlohmann::json& j, const Aggregate& v);
void from_json(const nlohmann::json& j, Aggregate& v);
void to_json(nlohmann::json& j, const EnsembleSummary& v);
void from_json(const nlohmann::json& j, EnsembleSummary& v);
void to_json(nlohmann::json& j, const LemmaVerdict& v);
void from_json(const nlohmann::json& j, LemmaVerdict& v);
void to_json(nlohmann::json& j, const Provenance& v);
void from_json(const nlohmann::json& j, Provenance& v);
void to_json(nlohmann::json& j, const RunReport& v);
void from_json(const nlohmann::json& j, RunReport& v);

} // namespace sirlevy
