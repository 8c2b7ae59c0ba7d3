#include "sirlevy/model.hpp"

#include "sirlevy/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sirlevy {

namespace {

bool finite(double x) { return std::isfinite(x); }

void require(bool ok, const std::string& what) {
    if (!ok) throw ValidationError(what);
}

} // namespace

bool NoiseSpec::has_jumps() const { return total_weight() > 0.0; }

double NoiseSpec::total_weight() const {
    double w = 0.0;
    for (const auto& a : atoms) w += a.weight;
    return w;
}

void validate(const ModelParams& p) {
    require(finite(p.A) && p.A > 0.0, "model.A must be finite and > 0");
    require(finite(p.mu1) && p.mu1 > 0.0, "model.mu1 must be finite and > 0");
    require(finite(p.mu2) && p.mu2 > 0.0, "model.mu2 must be finite and > 0");
    require(finite(p.gamma) && p.gamma > 0.0, "model.gamma must be finite and > 0");
    require(finite(p.beta) && p.beta > 0.0, "model.beta must be finite and > 0");
    require(finite(p.eta) && p.eta > 0.0, "model.eta must be finite and > 0");
}

void validate(const NoiseSpec& n) {
    require(finite(n.sigma1) && n.sigma1 >= 0.0, "noise.sigma1 must be finite and >= 0");
    require(finite(n.sigma2) && n.sigma2 >= 0.0, "noise.sigma2 must be finite and >= 0");
    require(finite(n.sigma4) && n.sigma4 >= 0.0, "noise.sigma4 must be finite and >= 0");
    for (std::size_t k = 0; k < n.atoms.size(); ++k) {
        const auto& a = n.atoms[k];
        const std::string tag = "noise.atoms[" + std::to_string(k) + "]";
        require(finite(a.weight) && a.weight >= 0.0, tag + ".weight must be finite and >= 0");
        require(finite(a.lam1) && 1.0 + a.lam1 > 0.0, tag + ".lam1 must satisfy 1 + lam1 > 0");
        require(finite(a.lam2) && 1.0 + a.lam2 > 0.0, tag + ".lam2 must satisfy 1 + lam2 > 0");
        require(finite(a.lam4) && 1.0 + a.lam4 > 0.0, tag + ".lam4 must satisfy 1 + lam4 > 0");
    }
}

double basic_reproduction_number(const ModelParams& p) {
    return p.beta * p.A / (p.mu1 * (p.mu2 + p.gamma));
}

double upsilon(const ModelParams& p) {
    const double ts = basic_reproduction_number(p);
    const double gap = std::sqrt(ts) - 1.0;
    const double rate = ts <= 1.0 ? std::min(p.mu2 + p.gamma, p.eta)
                                  : std::max(p.mu2 + p.gamma, p.eta);
    return rate * gap;
}

double pi_term(const NoiseSpec& n) {
    double sum = 0.0;
    for (const auto& a : n.atoms) {
        const double lmin = std::min(a.lam2, a.lam4);
        const double lmax = std::max(a.lam2, a.lam4);
        double aleph = 0.0;
        if (lmin > 0.0) aleph += std::log1p(lmin) - lmin;
        if (lmax <= 0.0) aleph += std::log1p(lmax) - lmax;
        sum += a.weight * aleph;
    }
    return sum;
}

double sigma_term(const NoiseSpec& n) {
    if (n.sigma2 <= 0.0 || n.sigma4 <= 0.0)
        throw DegenerateDiffusion("sigma_term needs sigma2 > 0 and sigma4 > 0");
    return 1.0 / (2.0 * (1.0 / (n.sigma2 * n.sigma2) + 1.0 / (n.sigma4 * n.sigma4)));
}

double lambda_term(const NoiseSpec& n) {
    double sum = n.sigma1 * n.sigma1;
    for (const auto& a : n.atoms) sum += a.weight * a.lam1 * a.lam1;
    return sum;
}

double chi2(const ModelParams& p, const NoiseSpec& n) {
    return 2.0 * p.mu1 - lambda_term(n);
}

double noise_decay(const NoiseSpec& n, int component) {
    double sigma = 0.0;
    switch (component) {
        case 1: sigma = n.sigma1; break;
        case 2: sigma = n.sigma2; break;
        case 4: sigma = n.sigma4; break;
        default: throw ValidationError("noise_decay: component must be 1, 2 or 4");
    }
    double sum = 0.5 * sigma * sigma;
    for (const auto& a : n.atoms) {
        const double lam = component == 1 ? a.lam1 : component == 2 ? a.lam2 : a.lam4;
        sum += a.weight * (lam - std::log1p(lam));
    }
    return sum;
}

ExtinctionThresholds extinction_report(const ModelParams& p, const NoiseSpec& n) {
    validate(p);
    validate(n);
    ExtinctionThresholds r;
    r.t_star = basic_reproduction_number(p);
    r.upsilon = upsilon(p);
    r.pi_term = pi_term(n);
    r.sigma_term = sigma_term(n);
    r.lambda_term = lambda_term(n);
    r.chi2 = chi2(p, n);
    if (r.chi2 <= 0.0) throw ChiTwoNonPositive(r.chi2);
    r.theta = r.upsilon + r.pi_term - r.sigma_term +
              p.eta * std::sqrt(r.t_star * r.lambda_term / r.chi2);
    return r;
}

PersistenceThresholds persistence_report(const ModelParams& p, const NoiseSpec& n) {
    validate(p);
    validate(n);
    PersistenceThresholds r;
    r.sbar1 = noise_decay(n, 1);
    r.sbar2 = noise_decay(n, 2);
    r.sbar4 = noise_decay(n, 4);
    const double s_cap = p.A / (p.mu1 + r.sbar1); // noise-adjusted carrying level of S
    r.t_tilde = p.beta * s_cap /
                ((p.mu2 + p.gamma + r.sbar2) + p.beta * s_cap * r.sbar4 / p.eta);
    r.c1 = p.beta * s_cap * s_cap * (p.eta + r.sbar4) / (p.A * p.eta);
    r.c2 = p.beta * s_cap / (p.eta + r.sbar4);
    r.c3 = r.c1 * p.beta / p.eta;
    r.persistence_lower_bound =
        r.t_tilde > 1.0 ? (1.0 / r.c1) * s_cap * (1.0 - 1.0 / r.t_tilde) : 0.0;
    return r;
}

FullThresholdReport threshold_report(const ModelParams& p, const NoiseSpec& n) {
    FullThresholdReport rep;
    rep.persistence = persistence_report(p, n);
    try {
        rep.extinction = extinction_report(p, n);
    } catch (const DegenerateDiffusion& e) {
        rep.extinction_error = e.what();
    } catch (const ChiTwoNonPositive& e) {
        rep.extinction_error = e.what();
    }
    if (rep.extinction && rep.extinction->theta < 0.0)
        rep.regime = Regime::ExtinctionPredicted;
    else if (rep.persistence.t_tilde > 1.0)
        rep.regime = Regime::PersistencePredicted;
    else
        rep.regime = Regime::Indeterminate;
    return rep;
}

namespace {

// chi1p for a given p, assuming inputs already validated. Shared by
// moment_condition (which enforces the preconditions) and find_p (which
// treats violations as "no admissible p").
MomentCheck moment_core(const ModelParams& p, const NoiseSpec& n, double order) {
    MomentCheck c;
    c.p = order;
    c.vartheta = std::min({p.mu1, p.mu2 + p.gamma - p.eta, p.eta});
    c.sigma_bar = std::max({n.sigma1 * n.sigma1, n.sigma2 * n.sigma2, n.sigma4 * n.sigma4});
    double ell = 0.0;
    for (const auto& a : n.atoms) {
        const double lmax = std::max({a.lam1, a.lam2, a.lam4});
        const double lmin = std::min({a.lam1, a.lam2, a.lam4});
        const double zhat = std::pow(1.0 + lmax, order) - 1.0 - order * lmax;
        const double zchk = std::pow(1.0 + lmin, order) - 1.0 - order * lmin;
        ell += a.weight * std::max(zhat, zchk);
    }
    c.ell_p = ell;
    c.chi1p = c.vartheta - 0.5 * (order - 1.0) * c.sigma_bar - ell / order;
    return c;
}

} // namespace

MomentCheck moment_condition(const ModelParams& p, const NoiseSpec& n, double order) {
    validate(p);
    validate(n);
    if (!(order > 2.0)) throw InvalidOrder(order);
    MomentCheck c = moment_core(p, n, order);
    if (c.vartheta <= 0.0) throw ThetaNonPositive(c.vartheta);
    return c;
}

std::optional<MomentCheck> find_p(const ModelParams& p, const NoiseSpec& n,
                                  double p_max, double step) {
    validate(p);
    validate(n);
    require(finite(p_max) && p_max > 2.0, "find_p: p_max must be > 2");
    require(finite(step) && step > 0.0, "find_p: step must be > 0");
    std::optional<MomentCheck> best;
    for (int i = 1;; ++i) {
        const double order = 2.0 + i * step;
        if (order > p_max * (1.0 + 1e-12)) break;
        const MomentCheck c = moment_core(p, n, order);
        if (c.chi1p > 0.0 && (!best || c.chi1p > best->chi1p)) best = c;
    }
    return best;
}

std::vector<HypothesisVerdict> validate_hypotheses(const ModelParams& p, const NoiseSpec& n) {
    validate(p);
    // Deliberately *not* validate(n): the hypotheses are exactly the checks a
    // caller runs to find out whether a noise spec is admissible.
    std::vector<HypothesisVerdict> out;

    // H1: finite quadratic jump load.
    {
        double q = 0.0;
        for (const auto& a : n.atoms)
            q += a.weight * (a.lam1 * a.lam1 + a.lam2 * a.lam2 + a.lam4 * a.lam4);
        out.push_back({"H1", std::isfinite(q), q, "sum w*(lam1^2+lam2^2+lam4^2) finite"});
    }

    // H2: every relative jump keeps compartments positive.
    bool h2 = true;
    {
        double worst = std::numeric_limits<double>::infinity();
        std::string detail = "1 + lam_i > 0 for every atom and component";
        for (std::size_t k = 0; k < n.atoms.size() && h2; ++k) {
            for (double lam : {n.atoms[k].lam1, n.atoms[k].lam2, n.atoms[k].lam4}) {
                worst = std::min(worst, 1.0 + lam);
                if (!(1.0 + lam > 0.0) || !std::isfinite(lam)) {
                    h2 = false;
                    detail = "atom " + std::to_string(k) + " has 1 + lam <= 0";
                    break;
                }
            }
        }
        if (n.atoms.empty()) worst = 1.0;
        out.push_back({"H2", h2, worst, detail});
    }

    // H3: finite logarithmic jump load (needs H2 for the logs to exist).
    {
        if (h2) {
            double q = 0.0;
            for (const auto& a : n.atoms) {
                for (double lam : {a.lam1, a.lam2, a.lam4}) {
                    const double l = std::log1p(lam);
                    q += a.weight * l * l;
                }
            }
            out.push_back({"H3", std::isfinite(q), q, "sum w*ln(1+lam)^2 finite"});
        } else {
            out.push_back({"H3", false, std::numeric_limits<double>::quiet_NaN(),
                           "requires H2 (logs of 1+lam undefined)"});
        }
    }

    // H4: finite fourth-order load of the largest relative jump.
    {
        double q = 0.0;
        for (const auto& a : n.atoms) {
            const double lmax = std::max({a.lam1, a.lam2, a.lam4});
            const double g = (1.0 + lmax) * (1.0 + lmax) - 1.0;
            q += a.weight * g * g;
        }
        out.push_back({"H4", std::isfinite(q), q, "sum w*((1+lmax)^2-1)^2 finite"});
    }

    // H5: some moment order p > 2 with chi1p > 0 exists on the default grid
    // (same grid find_p uses: p = 2.1, 2.2, ..., 4.0).
    {
        if (h2) {
            std::optional<MomentCheck> found;
            double least_bad = -std::numeric_limits<double>::infinity();
            for (int i = 1; i <= 20; ++i) {
                const MomentCheck c = moment_core(p, n, 2.0 + 0.1 * i);
                least_bad = std::max(least_bad, c.chi1p);
                if (c.chi1p > 0.0 && (!found || c.chi1p > found->chi1p)) found = c;
            }
            if (found) {
                out.push_back({"H5", true, found->chi1p,
                               "chi1p > 0 at p = " + std::to_string(found->p)});
            } else {
                out.push_back({"H5", false, least_bad, "chi1p <= 0 for all p in (2, 4]"});
            }
        } else {
            out.push_back({"H5", false, std::numeric_limits<double>::quiet_NaN(),
                           "requires H2"});
        }
    }

    return out;
}

State drift_reduced(const State& x, const ModelParams& p) {
    State f;
    f.s = p.A - p.mu1 * x.s - p.beta * x.s * x.d;
    f.i = p.beta * x.s * x.d - (p.mu2 + p.gamma) * x.i;
    f.d = p.eta * (x.i - x.d);
    return f;
}

double gamma_kernel(double s, int n, double eta) {
    if (n < 0) throw ValidationError("gamma_kernel: n must be >= 0");
    if (!(eta > 0.0)) throw ValidationError("gamma_kernel: eta must be > 0");
    if (s < 0.0) return 0.0;
    return std::pow(s, n) * std::pow(eta, n + 1) * std::exp(-eta * s) / std::tgamma(n + 1.0);
}

const char* to_string(Regime r) {
    switch (r) {
        case Regime::ExtinctionPredicted: return "ExtinctionPredicted";
        case Regime::PersistencePredicted: return "PersistencePredicted";
        case Regime::Indeterminate: return "Indeterminate";
    }
    return "Indeterminate";
}

} // namespace sirlevy
