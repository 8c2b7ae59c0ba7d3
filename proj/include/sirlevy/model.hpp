#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace sirlevy {

/// Deterministic rate constants of the epidemic model
///
///   dS = (A - mu1*S - beta*S*D) dt
///   dI = (beta*S*D - (mu2+gamma)*I) dt
///   dD = eta*(I - D) dt
///
/// where D is the distributed-delay stage fed by I (linear-chain closure of a
/// Gamma survival kernel with shape 1 and rate eta).
struct ModelParams {
    double A = 0.0;     ///< recruitment rate into S
    double mu1 = 0.0;   ///< natural death rate of S
    double mu2 = 0.0;   ///< death rate of I
    double gamma = 0.0; ///< recovery rate
    double beta = 0.0;  ///< transmission coefficient
    double eta = 0.0;   ///< delay-stage relaxation rate
};

/// One atom of the (finite) jump measure. A jump event with mark k rescales
/// the compartments multiplicatively: X -> X * (1 + lamX_k).
struct LevyAtom {
    double weight = 0.0; ///< intensity nu({u_k}) >= 0
    double lam1 = 0.0;   ///< relative jump applied to S
    double lam2 = 0.0;   ///< relative jump applied to I
    double lam4 = 0.0;   ///< relative jump applied to D
};

/// Environmental noise: multiplicative Brownian volatilities per compartment
/// plus the jump atoms. All three compartments share one Poisson clock; a
/// single event moves S, I and D together with its atom's lam values.
struct NoiseSpec {
    double sigma1 = 0.0;
    double sigma2 = 0.0;
    double sigma4 = 0.0;
    std::vector<LevyAtom> atoms;

    bool has_jumps() const;       ///< true iff total atom weight > 0
    double total_weight() const;  ///< sum of atom weights
};

/// Current compartment values.
struct State {
    double s = 0.0;
    double i = 0.0;
    double d = 0.0;
};

/// Which extinction/persistence regime the thresholds predict.
enum class Regime {
    ExtinctionPredicted,   ///< theta < 0
    PersistencePredicted,  ///< t_tilde > 1 and theta >= 0
    Indeterminate,         ///< neither criterion triggers
};

/// Quantities entering the extinction indicator theta.
struct ExtinctionThresholds {
    double t_star = 0.0;      ///< beta*A / (mu1*(mu2+gamma))
    double upsilon = 0.0;     ///< threshold gap term, sign tied to sqrt(t_star)-1
    double pi_term = 0.0;     ///< jump correction sum, always <= 0
    double sigma_term = 0.0;  ///< 1 / (2*(sigma2^-2 + sigma4^-2))
    double lambda_term = 0.0; ///< sigma1^2 + sum w*lam1^2
    double chi2 = 0.0;        ///< 2*mu1 - lambda_term
    double theta = 0.0;       ///< upsilon + pi_term - sigma_term + eta*sqrt(t_star*lambda_term/chi2)
};

/// Quantities entering the noise-adjusted reproduction number t_tilde and the
/// persistence lower bound.
struct PersistenceThresholds {
    double sbar1 = 0.0; ///< effective extra decay on S from noise
    double sbar2 = 0.0;
    double sbar4 = 0.0;
    double t_tilde = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
    /// (1/c1) * (A/(mu1+sbar1)) * (1 - 1/t_tilde) when t_tilde > 1, else 0.
    double persistence_lower_bound = 0.0;
};

/// Everything `thresholds` reports for a scenario.
struct ThresholdReport {
    ExtinctionThresholds extinction;
    PersistenceThresholds persistence;
    Regime regime = Regime::Indeterminate;
};

/// Result of the p-th moment growth condition chi_{1,p} > 0.
struct MomentCheck {
    double p = 0.0;
    double vartheta = 0.0;  ///< min(mu1, mu2+gamma-eta, eta)
    double sigma_bar = 0.0; ///< max(sigma1^2, sigma2^2, sigma4^2)
    double ell_p = 0.0;     ///< jump contribution sum
    double chi1p = 0.0;     ///< vartheta - (p-1)/2*sigma_bar - ell_p/p
};

/// One structural hypothesis verdict (H1..H5).
struct HypothesisVerdict {
    std::string name;
    bool satisfied = false;
    double quantity = 0.0; ///< the number the check evaluated
    std::string detail;    ///< what was checked / why it failed
};

/// Throws ValidationError unless all rates are finite and positive.
void validate(const ModelParams& params);

/// Throws ValidationError unless volatilities are finite and >= 0 and every
/// atom has finite entries, weight >= 0 and 1 + lam_i > 0 per component
/// (a jump cannot annihilate or flip the sign of a compartment).
void validate(const NoiseSpec& noise);

/// Basic reproduction number of the noise-free model.
double basic_reproduction_number(const ModelParams& params);

/// Gap term of the extinction indicator:
///   min(mu2+gamma, eta)*(sqrt(t_star)-1)  if t_star <= 1
///   max(mu2+gamma, eta)*(sqrt(t_star)-1)  otherwise.
double upsilon(const ModelParams& params);

/// Jump correction Pi = sum_k w_k * aleph_k with
///   aleph = [ln(1+lmin)-lmin]*1{lmin>0} + [ln(1+lmax)-lmax]*1{lmax<=0},
/// lmin/lmax the min/max of (lam2, lam4) per atom. Always <= 0.
double pi_term(const NoiseSpec& noise);

/// Diffusion floor 1/(2*(sigma2^-2 + sigma4^-2)). Throws DegenerateDiffusion
/// when sigma2 == 0 or sigma4 == 0.
double sigma_term(const NoiseSpec& noise);

/// Quadratic S-noise load: sigma1^2 + sum w*lam1^2.
double lambda_term(const NoiseSpec& noise);

/// chi2 = 2*mu1 - sigma1^2 - sum w*lam1^2. May be <= 0; callers decide.
double chi2(const ModelParams& params, const NoiseSpec& noise);

/// Effective extra decay rate the noise adds to compartment i:
///   0.5*sigma_i^2 + sum w*(lam_i - ln(1+lam_i)). Component is 1, 2 or 4.
double noise_decay(const NoiseSpec& noise, int component);

/// Assembles the extinction side. Throws DegenerateDiffusion or
/// ChiTwoNonPositive when those preconditions fail.
ExtinctionThresholds extinction_report(const ModelParams& params, const NoiseSpec& noise);

/// Assembles the persistence side (always well defined for valid inputs).
PersistenceThresholds persistence_report(const ModelParams& params, const NoiseSpec& noise);

/// Full report with regime classification. Parts that cannot be computed for
/// this noise (degenerate diffusion, chi2 <= 0) are reported as absent.
struct FullThresholdReport {
    std::optional<ExtinctionThresholds> extinction;
    std::string extinction_error; ///< empty when extinction is present
    PersistenceThresholds persistence;
    Regime regime = Regime::Indeterminate;
};
FullThresholdReport threshold_report(const ModelParams& params, const NoiseSpec& noise);

/// p-th moment growth condition. Throws InvalidOrder (p <= 2) or
/// ThetaNonPositive (vartheta <= 0).
MomentCheck moment_condition(const ModelParams& params, const NoiseSpec& noise, double p);

/// Scans p = 2 + step, 2 + 2*step, ... <= p_max and returns the check with
/// the largest chi1p among those with chi1p > 0 (smallest such p on ties).
/// Returns nullopt when no grid point yields chi1p > 0; never throws for
/// vartheta <= 0 (that simply means no admissible p exists).
std::optional<MomentCheck> find_p(const ModelParams& params, const NoiseSpec& noise,
                                  double p_max = 4.0, double step = 0.1);

/// Evaluates the five structural hypotheses H1..H5 and returns one verdict
/// each, in order.
std::vector<HypothesisVerdict> validate_hypotheses(const ModelParams& params,
                                                   const NoiseSpec& noise);

/// Drift field of the reduced three-compartment system.
State drift_reduced(const State& x, const ModelParams& params);

/// Gamma delay kernel s^n * eta^(n+1) * exp(-eta*s) / n!.
double gamma_kernel(double s, int n, double eta);

const char* to_string(Regime regime);

} // namespace sirlevy
