#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "sirlevy/errors.hpp"
#include "sirlevy/model.hpp"

using namespace sirlevy;

namespace {
// Relative tolerance for values cross-checked against an independent
// implementation of the same closed forms.
constexpr double kTight = 1e-10;
}  // namespace

TEST_CASE("basic reproduction number matches hand computation") {
  // beta*A / (mu1*(mu2+gamma)) with simple numbers: 2*3/(1*(2+1)) = 2.
  ModelParams p{3.0, 1.0, 2.0, 1.0, 2.0, 0.5};
  CHECK(basic_reproduction_number(p) == doctest::Approx(2.0).epsilon(1e-14));

  ModelParams p1 = fixtures::params1();
  CHECK(basic_reproduction_number(p1) ==
        doctest::Approx(0.3818181818181819).epsilon(kTight));
  ModelParams p2 = fixtures::params2();
  CHECK(basic_reproduction_number(p2) ==
        doctest::Approx(2.3636363636363638).epsilon(kTight));
  ModelParams p4 = fixtures::params4();
  CHECK(basic_reproduction_number(p4) == doctest::Approx(2.0).epsilon(kTight));
}

TEST_CASE("extinction thresholds, scenario 1") {
  auto r = extinction_report(fixtures::params1(), fixtures::noise1());
  CHECK(r.t_star == doctest::Approx(0.3818181818181819).epsilon(kTight));
  CHECK(r.upsilon == doctest::Approx(-0.03438770574120077).epsilon(kTight));
  CHECK(r.pi_term == doctest::Approx(-0.00468982019567514).epsilon(kTight));
  CHECK(r.sigma_term == doctest::Approx(0.016825147710487445).epsilon(kTight));
  CHECK(r.lambda_term == doctest::Approx(0.0625).epsilon(kTight));
  CHECK(r.chi2 == doctest::Approx(0.5375).epsilon(kTight));
  CHECK(r.theta == doctest::Approx(-0.03693903870262967).epsilon(kTight));
}

TEST_CASE("extinction thresholds, scenario 2") {
  auto r = extinction_report(fixtures::params2(), fixtures::noise2());
  CHECK(r.t_star == doctest::Approx(2.3636363636363638).epsilon(kTight));
  CHECK(r.upsilon == doctest::Approx(0.2955767262643882).epsilon(kTight));
  // Noise-only pieces are shared with scenario 1.
  CHECK(r.pi_term == doctest::Approx(-0.00468982019567514).epsilon(kTight));
  CHECK(r.sigma_term == doctest::Approx(0.016825147710487445).epsilon(kTight));
  CHECK(r.lambda_term == doctest::Approx(0.0625).epsilon(kTight));
  CHECK(r.chi2 == doctest::Approx(0.5375).epsilon(kTight));
  CHECK(r.theta == doctest::Approx(0.3212445480682491).epsilon(kTight));
}

TEST_CASE("extinction thresholds, scenarios 3 and 4") {
  auto r3 = extinction_report(fixtures::params3(), fixtures::noise3());
  CHECK(r3.t_star == doctest::Approx(1.0499999999999998).epsilon(kTight));
  CHECK(r3.theta == doctest::Approx(0.5157123814283453).epsilon(kTight));
  CHECK(r3.chi2 == doctest::Approx(0.51).epsilon(kTight));

  auto r4 = extinction_report(fixtures::params4(), fixtures::noise4());
  CHECK(r4.t_star == doctest::Approx(2.0).epsilon(kTight));
  CHECK(r4.theta == doctest::Approx(0.4127968419914698).epsilon(kTight));
  CHECK(r4.chi2 == doctest::Approx(0.521439).epsilon(kTight));
}

TEST_CASE("theta decomposes into its four pieces") {
  for (auto [p, n] : {std::pair{fixtures::params1(), fixtures::noise1()},
                      std::pair{fixtures::params2(), fixtures::noise2()},
                      std::pair{fixtures::params3(), fixtures::noise3()}}) {
    auto r = extinction_report(p, n);
    double rebuilt = r.upsilon + r.pi_term - r.sigma_term +
                     p.eta * std::sqrt(r.t_star * r.lambda_term / r.chi2);
    CHECK(r.theta == doctest::Approx(rebuilt).epsilon(1e-13));
  }
}

TEST_CASE("upsilon uses the min branch below threshold and max above") {
  ModelParams p = fixtures::params1();  // t_star < 1
  double u = upsilon(p);
  double min_branch = std::min(p.mu2 + p.gamma, p.eta) *
                      (std::sqrt(basic_reproduction_number(p)) - 1.0);
  CHECK(u == doctest::Approx(min_branch).epsilon(1e-13));
  CHECK(u < 0.0);

  ModelParams q = fixtures::params2();  // t_star > 1
  double u2 = upsilon(q);
  double max_branch = std::max(q.mu2 + q.gamma, q.eta) *
                      (std::sqrt(basic_reproduction_number(q)) - 1.0);
  CHECK(u2 == doctest::Approx(max_branch).epsilon(1e-13));
  CHECK(u2 > 0.0);
}

TEST_CASE("jump correction term handles sign mixtures") {
  NoiseSpec equal;  // both marks positive
  equal.atoms = {{1.0, 0.0, 0.1, 0.1}};
  CHECK(pi_term(equal) == doctest::Approx(-0.00468982019567514).epsilon(kTight));

  NoiseSpec mixed;  // opposite signs: no indicator fires, term vanishes
  mixed.atoms = {{1.0, 0.0, 0.2, -0.1}};
  CHECK(pi_term(mixed) == 0.0);

  NoiseSpec negative;  // both marks negative
  negative.atoms = {{1.0, 0.0, -0.2, -0.1}};
  CHECK(pi_term(negative) ==
        doctest::Approx(-0.005360515657826304).epsilon(kTight));

  // The correction is a penalty: never positive, for any admissible marks.
  CHECK(pi_term(equal) <= 0.0);
  CHECK(pi_term(negative) <= 0.0);
}

TEST_CASE("noise-free model collapses the stochastic thresholds") {
  ModelParams p = fixtures::params2();
  // The die-out criterion divides by the I/D diffusion strengths, so exact
  // zero is rejected; the collapse is a limit, checked at vanishing sigma.
  NoiseSpec tiny;
  tiny.sigma2 = 1e-8;
  tiny.sigma4 = 1e-8;
  auto r = extinction_report(p, tiny);
  CHECK(r.pi_term == 0.0);
  CHECK(r.lambda_term == 0.0);
  CHECK(r.sigma_term == doctest::Approx(0.0).epsilon(1e-15).scale(1.0));
  CHECK(r.chi2 == doctest::Approx(2.0 * p.mu1).epsilon(1e-14));
  CHECK(r.theta == doctest::Approx(r.upsilon).epsilon(1e-13));

  NoiseSpec none;  // all sigmas zero, no atoms
  auto pr = persistence_report(p, none);
  // Without noise the persistence threshold reduces to the reproduction
  // number itself.
  CHECK(pr.t_tilde ==
        doctest::Approx(basic_reproduction_number(p)).epsilon(1e-13));
  CHECK(pr.sbar1 == 0.0);
  CHECK(pr.sbar2 == 0.0);
  CHECK(pr.sbar4 == 0.0);
}

TEST_CASE("persistence thresholds, scenario 1") {
  auto r = persistence_report(fixtures::params1(), fixtures::noise1());
  CHECK(r.sbar1 == doctest::Approx(0.02892844320604539).epsilon(kTight));
  CHECK(r.sbar2 == doctest::Approx(0.05423583061567386).epsilon(kTight));
  CHECK(r.sbar4 == doctest::Approx(0.04113982019567514).epsilon(kTight));
  CHECK(r.t_tilde == doctest::Approx(0.2768643874771072).epsilon(kTight));
  CHECK(r.c1 == doctest::Approx(0.8484568587649857).epsilon(kTight));
  CHECK(r.c2 == doctest::Approx(1.4605100037654857).epsilon(kTight));
  CHECK(r.c3 == doctest::Approx(0.6599108901505445).epsilon(kTight));
  // Below threshold the lower bound degenerates to zero.
  CHECK(r.persistence_lower_bound == 0.0);
}

TEST_CASE("persistence thresholds, scenario 2") {
  auto r = persistence_report(fixtures::params2(), fixtures::noise2());
  CHECK(r.t_tilde == doctest::Approx(1.034419910683015).epsilon(kTight));
  CHECK(r.c1 == doctest::Approx(5.252351982830864).epsilon(kTight));
  CHECK(r.c2 == doctest::Approx(9.04125240426253).epsilon(kTight));
  CHECK(r.c3 == doctest::Approx(75.86730641866804).epsilon(kTight));
  CHECK(r.persistence_lower_bound ==
        doctest::Approx(0.005778017734934802).epsilon(kTight));
  CHECK(r.persistence_lower_bound > 0.0);
}

TEST_CASE("persistence thresholds, scenarios 3 and 4") {
  auto r3 = persistence_report(fixtures::params3(), fixtures::noise3());
  CHECK(r3.t_tilde == doctest::Approx(0.6254329871182343).epsilon(kTight));
  CHECK(r3.persistence_lower_bound == 0.0);

  auto r4 = persistence_report(fixtures::params4(), fixtures::noise4());
  CHECK(r4.t_tilde == doctest::Approx(0.6341361453730173).epsilon(kTight));
  CHECK(r4.persistence_lower_bound == 0.0);
}

TEST_CASE("noise decay rate is nonnegative and additive in the pieces") {
  NoiseSpec n = fixtures::noise1();
  double s1 = noise_decay(n, 1);
  double s2 = noise_decay(n, 2);
  double s4 = noise_decay(n, 4);
  CHECK(s1 == doctest::Approx(0.02892844320604539).epsilon(kTight));
  CHECK(s2 == doctest::Approx(0.05423583061567386).epsilon(kTight));
  CHECK(s4 == doctest::Approx(0.04113982019567514).epsilon(kTight));
  CHECK(s1 >= 0.0);
  CHECK(s2 >= 0.0);
  CHECK(s4 >= 0.0);
  CHECK_THROWS_AS(noise_decay(n, 3), ValidationError);
}

TEST_CASE("regime classification across the four scenarios") {
  auto fr1 = threshold_report(fixtures::params1(), fixtures::noise1());
  CHECK(fr1.regime == Regime::ExtinctionPredicted);
  auto fr2 = threshold_report(fixtures::params2(), fixtures::noise2());
  CHECK(fr2.regime == Regime::PersistencePredicted);
  auto fr3 = threshold_report(fixtures::params3(), fixtures::noise3());
  CHECK(fr3.regime == Regime::Indeterminate);
  auto fr4 = threshold_report(fixtures::params4(), fixtures::noise4());
  CHECK(fr4.regime == Regime::Indeterminate);
}

TEST_CASE("threshold report survives a non-positive chi2") {
  ModelParams p = fixtures::params1();
  NoiseSpec loud = fixtures::noise1();
  loud.sigma1 = 1.0;  // sigma1^2 + sum w lam1^2 > 2 mu1
  auto fr = threshold_report(p, loud);
  CHECK(!fr.extinction.has_value());
  CHECK(!fr.extinction_error.empty());
  // Persistence side does not involve chi2 and must still be present.
  CHECK(fr.persistence.t_tilde > 0.0);
  CHECK(fr.regime == Regime::Indeterminate);
}

TEST_CASE("extinction report throws on non-positive chi2 or missing diffusion") {
  ModelParams p = fixtures::params1();
  NoiseSpec loud = fixtures::noise1();
  loud.sigma1 = 1.0;
  CHECK_THROWS_AS(extinction_report(p, loud), ChiTwoNonPositive);

  NoiseSpec flat = fixtures::noise1();
  flat.sigma2 = 0.0;
  CHECK_THROWS_AS(extinction_report(p, flat), DegenerateDiffusion);
  flat = fixtures::noise1();
  flat.sigma4 = 0.0;
  CHECK_THROWS_AS(extinction_report(p, flat), DegenerateDiffusion);
}

TEST_CASE("moment condition at p = 2.1, scenario 1") {
  auto c = moment_condition(fixtures::params1(), fixtures::noise1(), 2.1);
  CHECK(c.p == doctest::Approx(2.1));
  CHECK(c.vartheta == doctest::Approx(0.09).epsilon(kTight));
  CHECK(c.sigma_bar == doctest::Approx(0.0729).epsilon(kTight));
  CHECK(c.ell_p == doctest::Approx(0.061545597912664285).epsilon(kTight));
  CHECK(c.chi1p == doctest::Approx(0.02059757242254081).epsilon(kTight));
  CHECK(c.chi1p > 0.0);
}

TEST_CASE("moment condition rejects p outside (2, inf)") {
  CHECK_THROWS_AS(moment_condition(fixtures::params1(), fixtures::noise1(), 2.0),
                  InvalidOrder);
  CHECK_THROWS_AS(moment_condition(fixtures::params1(), fixtures::noise1(), 1.5),
                  InvalidOrder);
}

TEST_CASE("moment condition requires a positive decay gap") {
  // eta > mu2 + gamma makes vartheta <= 0.
  ModelParams p = fixtures::params1();
  p.eta = 2.0;
  CHECK_THROWS_AS(moment_condition(p, fixtures::noise1(), 2.5),
                  ThetaNonPositive);
}

TEST_CASE("find_p picks the admissible order with the best margin") {
  auto best = find_p(fixtures::params1(), fixtures::noise1());
  REQUIRE(best.has_value());
  CHECK(best->chi1p > 0.0);
  // Scenario 1's margin decreases in p, so the first grid point wins.
  CHECK(best->p == doctest::Approx(2.1).epsilon(1e-12));

  // With no noise at all, chi1p = vartheta for every p; ties break toward
  // the smallest order.
  NoiseSpec none;
  auto flat = find_p(fixtures::params1(), none);
  REQUIRE(flat.has_value());
  CHECK(flat->p == doctest::Approx(2.1).epsilon(1e-12));
  CHECK(flat->chi1p == doctest::Approx(0.09).epsilon(kTight));

  // Impossible decay gap: no admissible order exists.
  ModelParams p = fixtures::params1();
  p.eta = 2.0;
  CHECK(!find_p(p, fixtures::noise1()).has_value());
}

TEST_CASE("hypothesis checks pass on scenario 1") {
  auto hs = validate_hypotheses(fixtures::params1(), fixtures::noise1());
  REQUIRE(hs.size() == 5);
  for (const auto& h : hs) {
    CAPTURE(h.name);
    CAPTURE(h.detail);
    CHECK(h.satisfied);
  }
}

TEST_CASE("hypothesis checks: noise-free chi1p equals the decay gap") {
  NoiseSpec none;
  auto hs = validate_hypotheses(fixtures::params1(), none);
  REQUIRE(hs.size() == 5);
  // H5 is the moment condition; with no noise its margin is exactly the gap
  // min(mu1, mu2+gamma-eta, eta) = 0.09.
  CHECK(hs[4].satisfied);
  CHECK(hs[4].quantity == doctest::Approx(0.09).epsilon(kTight));
}

TEST_CASE("hypothesis checks: an inadmissible mark fails H2 and cascades") {
  NoiseSpec bad = fixtures::noise1();
  bad.atoms.push_back({0.5, -1.5, 0.1, 0.1});  // 1 + lam1 < 0
  auto hs = validate_hypotheses(fixtures::params1(), bad);
  REQUIRE(hs.size() == 5);
  CHECK(hs[0].satisfied);        // weights are still finite
  CHECK(!hs[1].satisfied);       // mark admissibility
  CHECK(!hs[2].satisfied);       // log-moment needs H2
  CHECK(std::isnan(hs[2].quantity));
  CHECK(!hs[4].satisfied);       // moment condition needs H2
  CHECK(std::isnan(hs[4].quantity));
}

TEST_CASE("memory kernel: value at zero, normalization, and mean") {
  double eta = 0.7;
  // Exponential case n = 0: g(0) = eta.
  CHECK(gamma_kernel(0.0, 0, eta) == doctest::Approx(eta).epsilon(1e-14));
  // Larger shapes vanish at the origin.
  CHECK(gamma_kernel(0.0, 1, eta) == 0.0);
  CHECK(gamma_kernel(0.0, 3, eta) == 0.0);
  // Negative arguments are outside the support.
  CHECK(gamma_kernel(-1.0, 1, eta) == 0.0);

  // Composite Simpson on [0, 200]: total mass 1, mean (n+1)/eta.
  for (int n : {0, 1, 3}) {
    double h = 0.001;
    long m = 200000;  // 200 / h, even
    double mass = 0.0, mean = 0.0;
    for (long k = 0; k <= m; ++k) {
      double s = k * h;
      double w = (k == 0 || k == m) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
      double g = gamma_kernel(s, n, eta);
      mass += w * g;
      mean += w * s * g;
    }
    mass *= h / 3.0;
    mean *= h / 3.0;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(mean == doctest::Approx((n + 1) / eta).epsilon(1e-6));
  }

  CHECK_THROWS_AS(gamma_kernel(1.0, -1, eta), ValidationError);
  CHECK_THROWS_AS(gamma_kernel(1.0, 0, 0.0), ValidationError);
}

TEST_CASE("reduced drift vanishes at the disease-free equilibrium") {
  ModelParams p = fixtures::params1();
  State dfe{p.A / p.mu1, 0.0, 0.0};
  State f = drift_reduced(dfe, p);
  CHECK(f.s == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(f.i == 0.0);
  CHECK(f.d == 0.0);
}

TEST_CASE("parameter validation rejects bad inputs") {
  ModelParams p = fixtures::params1();
  CHECK_NOTHROW(validate(p));
  p.mu1 = 0.0;
  CHECK_THROWS_AS(validate(p), ValidationError);
  p = fixtures::params1();
  p.A = -1.0;
  CHECK_THROWS_AS(validate(p), ValidationError);
  p = fixtures::params1();
  p.beta = 0.0;
  CHECK_THROWS_AS(validate(p), ValidationError);
  p = fixtures::params1();
  p.eta = -0.1;
  CHECK_THROWS_AS(validate(p), ValidationError);

  NoiseSpec n = fixtures::noise1();
  CHECK_NOTHROW(validate(n));
  n.sigma1 = -0.1;
  CHECK_THROWS_AS(validate(n), ValidationError);
  n = fixtures::noise1();
  n.atoms[0].weight = -1.0;
  CHECK_THROWS_AS(validate(n), ValidationError);
  n = fixtures::noise1();
  n.atoms[0].lam2 = -1.0;  // 1 + lam must stay positive
  CHECK_THROWS_AS(validate(n), ValidationError);
  n = fixtures::noise1();
  n.atoms[0].lam4 = -1.5;
  CHECK_THROWS_AS(validate(n), ValidationError);
}

TEST_CASE("randomized noise specs keep the structural inequalities") {
  // Property check: for any admissible spec, the jump correction term is
  // never positive and each decay rate is never negative.
  std::mt19937 gen(12345);
  std::uniform_int_distribution<int> n_atoms(0, 5);
  std::uniform_real_distribution<double> weight(0.0, 5.0);
  std::uniform_real_distribution<double> mark(-0.99, 3.0);
  std::uniform_real_distribution<double> sig(0.0, 2.0);

  for (int trial = 0; trial < 1000; ++trial) {
    NoiseSpec n;
    n.sigma1 = sig(gen);
    n.sigma2 = sig(gen);
    n.sigma4 = sig(gen);
    int k = n_atoms(gen);
    for (int j = 0; j < k; ++j) {
      n.atoms.push_back({weight(gen), mark(gen), mark(gen), mark(gen)});
    }
    CAPTURE(trial);
    CHECK(pi_term(n) <= 1e-15);
    CHECK(noise_decay(n, 1) >= -1e-15);
    CHECK(noise_decay(n, 2) >= -1e-15);
    CHECK(noise_decay(n, 4) >= -1e-15);
  }
}
