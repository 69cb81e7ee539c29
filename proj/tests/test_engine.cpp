#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "drexp/engine.hpp"
#include "drexp/harness.hpp"

using namespace drexp;

namespace {

const ModelFamily kIntegrable = ModelFamily::pareto(ParetoDomain::above_one());
const ModelFamily kPositive = ModelFamily::pareto(ParetoDomain::positive());

/// Observations with theta-hat exactly n / (n * log(e)) = 1: n copies of e.
Observations unit_mle_obs(std::size_t n) {
  return Observations(std::vector<double>(n, std::exp(1.0)));
}

/// Test-local bisector for the lower root of alpha(theta) = level, kept
/// independent of the engine's root finder.
double independent_lower_root(const DivergenceProfile& profile, double level) {
  double hi = profile.reference().theta();
  double lo = 0.5 * hi;
  while (profile.divergence_pareto(lo) < level) lo *= 0.5;
  for (int i = 0; i < 500 && (hi - lo) > 1e-14 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (profile.divergence_pareto(mid) >= level ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

DRQuery make_query(FunctionalId id, double level, double k, double gamma,
                   std::optional<double> delta) {
  DRQuery q;
  q.functional = RiskFunctional{id, level};
  q.k = k;
  q.gamma = gamma;
  q.delta = delta;
  return q;
}

}  // namespace

TEST_CASE("admissible set: bound rules and level roots") {
  const Observations obs = unit_mle_obs(100);
  const DivergenceProfile profile = DivergenceProfile::fit(kPositive, obs);
  REQUIRE(profile.reference().theta() == doctest::Approx(1.0).epsilon(1e-13));

  SUBCASE("delta truncation, gamma finite") {
    const DRQuery q = make_query(FunctionalId::ProbLoss, 2.0, 1.0, 1.0, 0.0);
    const AdmissibleSet adm = admissible_set(profile, q);
    CHECK(adm.bound == doctest::Approx(1.0));  // n^0
    CHECK_FALSE(adm.touches_lo_edge);
    CHECK_FALSE(adm.touches_hi_edge);
    // The level equation 100(theta - 1 - log theta) = 1 pins both endpoints.
    CHECK(profile.divergence_pareto(adm.lo) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(profile.divergence_pareto(adm.hi) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::fabs(adm.lo - 0.8677) < 5e-3);
    CHECK(std::fabs(adm.hi - 1.1517) < 5e-3);
    CHECK(adm.lo < 1.0);
    CHECK(adm.hi > 1.0);  // MLE inside
  }

  SUBCASE("gamma = inf uses k, monotone in the bound") {
    const DRQuery q1 = make_query(FunctionalId::ProbLoss, 2.0, 1.0, 1.0, 0.0);
    const DRQuery q2 = make_query(FunctionalId::ProbLoss, 2.0, 2.0, kGammaInfinity, {});
    const AdmissibleSet a1 = admissible_set(profile, q1);
    const AdmissibleSet a2 = admissible_set(profile, q2);
    CHECK(a2.bound == doctest::Approx(2.0));
    CHECK(a2.lo < a1.lo);
    CHECK(a2.hi > a1.hi);
    CHECK(profile.divergence_pareto(a2.lo) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(profile.divergence_pareto(a2.hi) == doctest::Approx(2.0).epsilon(1e-9));
  }

  SUBCASE("gamma = inf combined with truncation takes the minimum") {
    const DRQuery q = make_query(FunctionalId::ProbLoss, 2.0, 5.0, kGammaInfinity, 0.0);
    CHECK(admissible_set(profile, q).bound == doctest::Approx(1.0));  // min(5, 100^0)
    const DRQuery q2 = make_query(FunctionalId::ProbLoss, 2.0, 0.5, kGammaInfinity, 0.5);
    CHECK(admissible_set(profile, q2).bound == doctest::Approx(0.5));
  }

  SUBCASE("untruncated finite gamma spans the whole domain") {
    const DRQuery q = make_query(FunctionalId::ProbLoss, 2.0, 1.0, 1.0, {});
    const AdmissibleSet adm = admissible_set(profile, q);
    CHECK(std::isinf(adm.bound));
    CHECK(adm.lo == doctest::Approx(kDomainMargin));
    CHECK(std::isinf(adm.hi));
    CHECK(adm.touches_lo_edge);
    CHECK(adm.touches_hi_edge);
  }

  SUBCASE("domain edge cuts the interval on a restricted domain") {
    const ModelFamily restricted = ModelFamily::pareto(ParetoDomain::above(0.99));
    const DivergenceProfile p = DivergenceProfile::fit(restricted, obs);
    const DRQuery q = make_query(FunctionalId::ProbLoss, 2.0, 1.0, 1.0, 0.5);  // bound = 10
    const AdmissibleSet adm = admissible_set(p, q);
    CHECK(adm.touches_lo_edge);
    CHECK(adm.lo == doctest::Approx(0.99 + kDomainMargin));
    CHECK(profile.divergence_pareto(adm.hi) == doctest::Approx(10.0).epsilon(1e-9));
  }
}

TEST_CASE("untruncated DR risk measures blow up") {
  // 50 random samples; k in {0.5, 1, 2}; gamma in {1, 2}.
  for (int rep = 0; rep < 50; ++rep) {
    const std::uint64_t seed = replication_seed(424242, 60, static_cast<std::size_t>(rep));
    const Observations obs_i = sample(kIntegrable, ParamPoint::pareto(2.0), 60, seed);
    const Observations obs_p = sample(kPositive, ParamPoint::pareto(2.0), 60, seed);
    const DivergenceProfile prof_i = DivergenceProfile::fit(kIntegrable, obs_i);
    const DivergenceProfile prof_p = DivergenceProfile::fit(kPositive, obs_p);
    for (double k : {0.5, 1.0, 2.0}) {
      for (double gamma : {1.0, 2.0}) {
        const DREstimate es = dr_estimate(
            prof_i, make_query(FunctionalId::ExpectedShortfall, 0.1, k, gamma, {}), obs_i);
        REQUIRE(es.verdict == Verdict::Unbounded);
        REQUIRE(es.value.infinite());
        const DREstimate var = dr_estimate(
            prof_p, make_query(FunctionalId::ValueAtRisk, 0.1, k, gamma, {}), obs_p);
        REQUIRE(var.verdict == Verdict::Unbounded);
        const DREstimate it = dr_estimate(
            prof_i, make_query(FunctionalId::IntegratedTail, 3.0, k, gamma, {}), obs_i);
        REQUIRE(it.verdict == Verdict::Unbounded);
        const DREstimate mmv = dr_estimate(
            prof_i, make_query(FunctionalId::MinMaxVar, 0.8, k, gamma, {}), obs_i);
        REQUIRE(mmv.verdict == Verdict::Unbounded);
      }
    }
  }
}

TEST_CASE("gamma = inf expected shortfall sits at the admissible endpoint") {
  for (int rep = 0; rep < 50; ++rep) {
    const std::uint64_t seed = replication_seed(51515, 100, static_cast<std::size_t>(rep));
    const Observations obs = sample(kIntegrable, ParamPoint::pareto(2.0), 100, seed);
    const DivergenceProfile profile = DivergenceProfile::fit(kIntegrable, obs);
    const double theta_star = independent_lower_root(profile, 1.0);
    REQUIRE(theta_star > 1.0);
    const DRQuery q = make_query(FunctionalId::ExpectedShortfall, 0.05, 1.0, kGammaInfinity, {});
    const DREstimate est = dr_estimate(profile, q, obs);
    REQUIRE(est.value.finite());
    const double expected = theta_star / (theta_star - 1.0) * std::pow(0.05, -1.0 / theta_star);
    REQUIRE(std::fabs(est.value.value() - expected) <= 1e-8 * expected);
    REQUIRE(est.argmax);
    REQUIRE(std::fabs(est.argmax->theta() - theta_star) <= 1e-7 * theta_star);
    // Untruncated: regularity is referenced against +inf, so this is Regular.
    CHECK(est.verdict == Verdict::Regular);
  }
}

TEST_CASE("bounded functional: DR prob-loss is regular and truncation is idle") {
  const Observations obs = sample(kPositive, ParamPoint::pareto(2.0), 50, 977);
  const DivergenceProfile profile = DivergenceProfile::fit(kPositive, obs);
  for (double beta : {2.0, 10.0, 1e6}) {
    for (double gamma : {1.0, 2.0, kGammaInfinity}) {
      const DREstimate plain =
          dr_estimate(profile, make_query(FunctionalId::ProbLoss, beta, 1.0, gamma, {}), obs);
      REQUIRE(plain.verdict == Verdict::Regular);
      for (double delta : {0.0, 0.5}) {
        const DREstimate trunc = dr_estimate(
            profile, make_query(FunctionalId::ProbLoss, beta, 1.0, gamma, delta), obs);
        // Truncation with n^delta >= 1 never changes the value of a bounded
        // payoff (at k = 1).
        REQUIRE(trunc.value.finite());
        REQUIRE(std::fabs(trunc.value.value() - plain.value.value()) <=
                1e-10 * std::fmax(1.0, std::fabs(plain.value.value())));
        if (std::isinf(gamma) && delta == 0.0) {
          // n^0 = k: the flat-penalty optimum sits exactly on the truncation
          // boundary, which the verdict contract calls BoundaryAttained.
          REQUIRE(trunc.verdict == Verdict::BoundaryAttained);
        } else {
          REQUIRE(trunc.verdict == Verdict::Regular);
        }
      }
    }
  }
}

TEST_CASE("penalty scaling limits in k") {
  const Observations obs = sample(kIntegrable, ParamPoint::pareto(2.0), 200, 31337);
  const DivergenceProfile profile = DivergenceProfile::fit(kIntegrable, obs);
  const double theta_hat = profile.reference().theta();
  const RiskFunctional es{FunctionalId::ExpectedShortfall, 0.1};

  // k -> 0: the penalty forces the best-fitting admissible point (the MLE).
  const DREstimate tight =
      dr_estimate(profile, make_query(es.id, es.level, 1e-8, 1.0, 0.5), obs);
  REQUIRE(tight.argmax);
  CHECK(std::fabs(tight.argmax->theta() - theta_hat) < 1e-3);
  const double at_mle = risk_value(es, kIntegrable, profile.reference()).value();
  CHECK(std::fabs(tight.value.value() - at_mle) < 1e-5 * at_mle);

  // k -> inf: the penalty vanishes and the worst admissible point wins.
  const DREstimate loose =
      dr_estimate(profile, make_query(es.id, es.level, 1e8, 1.0, 0.5), obs);
  const AdmissibleSet adm = admissible_set(profile, make_query(es.id, es.level, 1e8, 1.0, 0.5));
  REQUIRE(loose.argmax);
  CHECK(std::fabs(loose.argmax->theta() - adm.lo) < 1e-3);
  const double worst = risk_value(es, kIntegrable, ParamPoint::pareto(adm.lo)).value();
  CHECK(std::fabs(loose.value.value() - worst) < 1e-6 * worst);
  CHECK(loose.verdict == Verdict::BoundaryAttained);
}

TEST_CASE("penalty correctness against an independent recomputation") {
  const Observations obs = sample(kIntegrable, ParamPoint::pareto(2.0), 150, 808);
  const DivergenceProfile profile = DivergenceProfile::fit(kIntegrable, obs);
  for (double gamma : {1.0, 1.7, 2.0, 4.0}) {
    const DRQuery q = make_query(FunctionalId::ExpectedShortfall, 0.2, 1.3, gamma, 0.5);
    const AdmissibleSet adm = admissible_set(profile, q);
    for (int i = 0; i <= 64; ++i) {
      const double theta = adm.lo + (adm.hi - adm.lo) * i / 64.0;
      const ExtendedReal obj = dr_objective(profile, q, theta);
      const double expected =
          risk_value(q.functional, kIntegrable, ParamPoint::pareto(theta)).value() -
          std::pow(profile.divergence_pareto(theta) / q.k, gamma);
      REQUIRE(obj.finite());
      REQUIRE(std::fabs(obj.value() - expected) <=
              1e-10 * std::fmax(1.0, std::fabs(expected)));
    }
  }
}

TEST_CASE("value is monotone in k and in the truncation bound") {
  for (int rep = 0; rep < 20; ++rep) {
    const std::uint64_t seed = replication_seed(112233, 400, static_cast<std::size_t>(rep));
    const Observations obs = sample(kIntegrable, ParamPoint::pareto(2.0), 400, seed);
    const DivergenceProfile profile = DivergenceProfile::fit(kIntegrable, obs);
    for (double gamma : {1.0, 2.0}) {
      double prev = -1e300;
      for (double k : {0.5, 1.0, 2.0, 4.0}) {
        const DREstimate est = dr_estimate(
            profile, make_query(FunctionalId::ExpectedShortfall, 0.1, k, gamma, 0.4), obs);
        REQUIRE(est.value.finite());
        REQUIRE(est.value.value() >= prev - 1e-9);
        prev = est.value.value();
      }
    }
    // Enlarging delta never decreases the value; once the widening set
    // reaches the domain edge the estimate turns (and stays) unbounded.
    ExtendedReal prev(-1e300);
    for (double delta : {0.1, 0.3, 0.5, 0.8}) {
      const DREstimate est = dr_estimate(
          profile, make_query(FunctionalId::ExpectedShortfall, 0.1, 1.0, 1.0, delta), obs);
      const ExtendedReal slack = prev.finite() ? ExtendedReal(prev.value() - 1e-9) : prev;
      REQUIRE_FALSE(est.value < slack);
      prev = est.value;
    }
  }
}

TEST_CASE("value dominates the plug-in estimate when the MLE is admissible") {
  for (int rep = 0; rep < 20; ++rep) {
    const std::uint64_t seed = replication_seed(77, 120, static_cast<std::size_t>(rep));
    const Observations obs = sample(kIntegrable, ParamPoint::pareto(2.0), 120, seed);
    const DivergenceProfile profile = DivergenceProfile::fit(kIntegrable, obs);
    const struct {
      FunctionalId id;
      double level;
    } cases[] = {{FunctionalId::ExpectedShortfall, 0.2},
                 {FunctionalId::ProbLoss, 4.0},
                 {FunctionalId::CramerLundberg, 3.0}};
    for (const auto& c : cases) {
      const DREstimate est =
          dr_estimate(profile, make_query(c.id, c.level, 1.0, 1.0, 0.5), obs);
      const double plug_in =
          risk_value({c.id, c.level}, kIntegrable, profile.reference()).value();
      REQUIRE(est.value.finite());
      REQUIRE(est.value.value() >= plug_in - 1e-12 * std::fabs(plug_in));
    }
  }
}

TEST_CASE("gamma = inf flatness: monotone functionals end at an endpoint") {
  const Observations obs = sample(kIntegrable, ParamPoint::pareto(2.5), 120, 5150);
  const DivergenceProfile profile = DivergenceProfile::fit(kIntegrable, obs);
  const struct {
    FunctionalId id;
    double level;
  } cases[] = {{FunctionalId::ExpectedShortfall, 0.1},
               {FunctionalId::ProbLoss, 5.0},
               {FunctionalId::IntegratedTail, 2.0}};
  for (const auto& c : cases) {
    const DRQuery q = make_query(c.id, c.level, 1.5, kGammaInfinity, {});
    const AdmissibleSet adm = admissible_set(profile, q);
    const DREstimate est = dr_estimate(profile, q, obs);
    REQUIRE(est.value.finite());
    const double at_lo = risk_value({c.id, c.level}, kIntegrable, ParamPoint::pareto(adm.lo)).value();
    const double at_hi = risk_value({c.id, c.level}, kIntegrable, ParamPoint::pareto(adm.hi)).value();
    const double endpoint_max = std::fmax(at_lo, at_hi);
    REQUIRE(std::fabs(est.value.value() - endpoint_max) <=
            1e-10 * std::fmax(1.0, endpoint_max));
  }
}

TEST_CASE("grid refinement stability") {
  const Observations obs = sample(kIntegrable, ParamPoint::pareto(2.0), 100, 999);
  const DivergenceProfile profile = DivergenceProfile::fit(kIntegrable, obs);
  const Observations obs_p = sample(kPositive, ParamPoint::pareto(2.0), 100, 999);
  const DivergenceProfile profile_p = DivergenceProfile::fit(kPositive, obs_p);
  const std::vector<std::pair<const DivergenceProfile*, DRQuery>> cases = {
      {&profile, make_query(FunctionalId::ExpectedShortfall, 0.1, 1.0, 1.0, 0.5)},
      {&profile, make_query(FunctionalId::ExpectedShortfall, 0.05, 2.0, 2.0, 0.3)},
      {&profile, make_query(FunctionalId::ExpectedShortfall, 0.05, 1.0, kGammaInfinity, {})},
      {&profile, make_query(FunctionalId::MinMaxVar, 0.9, 1.0, 1.0, 0.4)},
      {&profile, make_query(FunctionalId::CramerLundberg, 2.0, 1.0, 1.0, {})},
      {&profile_p, make_query(FunctionalId::ProbLoss, 10.0, 1.0, 1.0, {})},
      {&profile_p, make_query(FunctionalId::ValueAtRisk, 0.05, 1.0, 1.0, 0.5)},
  };
  const Observations* obs_for[] = {&obs, &obs, &obs, &obs, &obs, &obs_p, &obs_p};
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const DREstimate coarse =
        dr_estimate(*cases[i].first, cases[i].second, *obs_for[i], EngineOptions{512});
    const DREstimate fine =
        dr_estimate(*cases[i].first, cases[i].second, *obs_for[i], EngineOptions{1024});
    REQUIRE(coarse.value.finite());
    REQUIRE(fine.value.finite());
    REQUIRE(std::fabs(coarse.value.value() - fine.value.value()) <=
            1e-8 * std::fmax(1.0, std::fabs(fine.value.value())));
  }
}

TEST_CASE("verdicts and regularity explanations") {
  SUBCASE("boundary attainment on a deep tail") {
    const Observations obs = sample(kIntegrable, ParamPoint::pareto(2.0), 50, 2024);
    const DivergenceProfile profile = DivergenceProfile::fit(kIntegrable, obs);
    const DREstimate est = dr_estimate(
        profile, make_query(FunctionalId::ExpectedShortfall, 1e-9, 1.0, 1.0, 0.25), obs);
    REQUIRE(est.value.finite());
    CHECK(est.verdict == Verdict::BoundaryAttained);
    const RegularityReport rep = regularity_check(est);
    CHECK_FALSE(rep.regular);
    CHECK(rep.explanation.find("boundary") != std::string::npos);
  }
  SUBCASE("unbounded explanation") {
    const Observations obs = sample(kIntegrable, ParamPoint::pareto(2.0), 50, 2025);
    const DivergenceProfile profile = DivergenceProfile::fit(kIntegrable, obs);
    const DREstimate est = dr_estimate(
        profile, make_query(FunctionalId::ExpectedShortfall, 0.1, 1.0, 1.0, {}), obs);
    CHECK(est.verdict == Verdict::Unbounded);
    const RegularityReport rep = regularity_check(est);
    CHECK_FALSE(rep.regular);
    CHECK(rep.explanation == "value not finite");
  }
  SUBCASE("domain edge attraction on a restricted domain") {
    const ModelFamily restricted = ModelFamily::pareto(ParetoDomain::above(1.5));
    const Observations obs = sample(restricted, ParamPoint::pareto(2.0), 100, 2026);
    const DivergenceProfile profile = DivergenceProfile::fit(restricted, obs);
    // Huge k: the likelihood interval swallows the whole domain and the
    // monotone functional walks to the domain edge.
    const DREstimate est = dr_estimate(
        profile, make_query(FunctionalId::ExpectedShortfall, 0.1, 1e6, kGammaInfinity, {}),
        obs);
    REQUIRE(est.value.finite());
    CHECK(est.verdict == Verdict::DomainEdgeDivergence);
    CHECK_FALSE(regularity_check(est).regular);
  }
  SUBCASE("finite divergence basin at a restricted-domain edge") {
    // Untruncated finite gamma on theta > 0.5: VaR stays finite at the edge,
    // but the edge basin beats the interior one, pinning the argmax there.
    const ModelFamily restricted = ModelFamily::pareto(ParetoDomain::above(0.5));
    const Observations obs = sample(restricted, ParamPoint::pareto(2.0), 100, 2028);
    const DivergenceProfile profile = DivergenceProfile::fit(restricted, obs);
    const DREstimate est = dr_estimate(
        profile, make_query(FunctionalId::ValueAtRisk, 0.1, 1.0, 1.0, {}), obs);
    REQUIRE(est.value.finite());
    CHECK(est.verdict == Verdict::DomainEdgeDivergence);
    REQUIRE(est.argmax);
    CHECK(est.argmax->theta() == doctest::Approx(0.5).epsilon(1e-6));
  }
  SUBCASE("interior maximizer is regular") {
    const Observations obs = sample(kPositive, ParamPoint::pareto(2.0), 200, 2027);
    const DivergenceProfile profile = DivergenceProfile::fit(kPositive, obs);
    const DREstimate est = dr_estimate(
        profile, make_query(FunctionalId::ProbLoss, 5.0, 1.0, 1.0, 0.5), obs);
    CHECK(est.verdict == Verdict::Regular);
    CHECK(regularity_check(est).regular);
  }
}

TEST_CASE("gamma transfer of interior maximizers") {
  const std::vector<double> gammas = {2.0, 4.0};
  SUBCASE("small alpha ratio transfers") {
    const Observations obs = sample(kIntegrable, ParamPoint::pareto(2.0), 400, 600);
    const DivergenceProfile profile = DivergenceProfile::fit(kIntegrable, obs);
    const DRQuery q = make_query(FunctionalId::ExpectedShortfall, 0.1, 1.0, 1.0, 0.5);
    const GammaTransferReport rep = gamma_transfer_check(profile, q, gammas, obs);
    REQUIRE_FALSE(rep.skipped);
    CHECK(rep.base_alpha_over_k < 1.0);
    CHECK(rep.violations == 0);
    for (const auto& e : rep.entries) CHECK(e.alpha_over_k < 1.0);
  }
  SUBCASE("precondition failure skips the check") {
    const Observations obs = sample(kIntegrable, ParamPoint::pareto(2.0), 50, 601);
    const DivergenceProfile profile = DivergenceProfile::fit(kIntegrable, obs);
    // Deep tail slams the boundary: alpha/k at the argmax is the bound, >> 1.
    const DRQuery q = make_query(FunctionalId::ExpectedShortfall, 1e-9, 1.0, 1.0, 0.25);
    const GammaTransferReport rep = gamma_transfer_check(profile, q, gammas, obs);
    CHECK(rep.skipped);
    CHECK_FALSE(rep.reason.empty());
  }
  SUBCASE("constant functional transfers trivially") {
    const Observations obs = sample(kPositive, ParamPoint::pareto(2.0), 100, 602);
    const DivergenceProfile profile = DivergenceProfile::fit(kPositive, obs);
    const DRQuery q = make_query(FunctionalId::ProbLoss, 1.0, 1.0, 1.0, 0.5);
    const GammaTransferReport rep = gamma_transfer_check(profile, q, gammas, obs);
    REQUIRE_FALSE(rep.skipped);
    CHECK(rep.base_alpha_over_k == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(rep.violations == 0);
  }
}

TEST_CASE("normal family engine") {
  const ModelFamily normal = ModelFamily::normal();
  const Observations obs = sample(normal, ParamPoint::normal(0.0, 1.0), 1000, 4096);
  const DivergenceProfile profile = DivergenceProfile::fit(normal, obs);

  SUBCASE("untruncated finite gamma diverges through sigma2") {
    const DREstimate est = dr_estimate(
        profile, make_query(FunctionalId::LinearPayoff, 1.0, 1.0, 1.0, {}), obs);
    CHECK(est.verdict == Verdict::Unbounded);
    CHECK(est.diagnostics.count("divergence_at_domain_edge") == 1);
  }
  SUBCASE("zero payoff is exactly the plug-in") {
    const DREstimate est = dr_estimate(
        profile, make_query(FunctionalId::LinearPayoff, 0.0, 1.0, 1.0, {}), obs);
    CHECK(est.verdict == Verdict::Regular);
    CHECK(est.value.value() == 0.0);
  }
  SUBCASE("gamma = inf is a finite likelihood-interval bound") {
    const DREstimate est = dr_estimate(
        profile, make_query(FunctionalId::LinearPayoff, 1.0, 1.0, kGammaInfinity, {}), obs);
    REQUIRE(est.value.finite());
    CHECK(est.verdict == Verdict::Regular);
    CHECK(est.value.value() > profile.xbar());
    REQUIRE(est.alpha_at_argmax);
    CHECK(*est.alpha_at_argmax == doctest::Approx(1.0).epsilon(1e-6));  // alpha = k
  }
  SUBCASE("truncated gamma = 1 stays near the MLE") {
    const DREstimate est = dr_estimate(
        profile, make_query(FunctionalId::LinearPayoff, 1.0, 1.0, 1.0, 0.5), obs);
    REQUIRE(est.value.finite());
    CHECK(est.verdict == Verdict::Regular);
    REQUIRE(est.argmax);
    CHECK(std::fabs(est.argmax->normal_params().mu - profile.xbar()) < 0.01);
    CHECK(std::fabs(est.argmax->normal_params().sigma2 - profile.sigma2_hat()) < 0.01);
  }
}

TEST_CASE("optimizer agrees with a dense brute-force scan") {
  std::mt19937_64 rng(20101);
  const auto u01 = [&] { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
  const FunctionalId ids[] = {FunctionalId::ExpectedShortfall, FunctionalId::ProbLoss,
                              FunctionalId::IntegratedTail, FunctionalId::CramerLundberg,
                              FunctionalId::MinMaxVar, FunctionalId::ValueAtRisk};
  for (int trial = 0; trial < 30; ++trial) {
    const FunctionalId id = ids[trial % 6];
    const bool positive_domain =
        id == FunctionalId::ValueAtRisk || id == FunctionalId::ProbLoss;
    const ModelFamily& fam = positive_domain ? kPositive : kIntegrable;
    const std::size_t n = 150 + static_cast<std::size_t>(u01() * 400);
    const Observations obs = sample(fam, ParamPoint::pareto(2.0), n, rng());
    const DivergenceProfile profile = DivergenceProfile::fit(fam, obs);
    double level = 0.0;
    switch (id) {
      case FunctionalId::ExpectedShortfall:
      case FunctionalId::ValueAtRisk: level = 0.05 + u01() * 0.4; break;
      case FunctionalId::MinMaxVar: level = 0.85 + u01() * 0.15; break;
      default: level = 1.5 + u01() * 10.0; break;
    }
    const double k = 0.5 + u01() * 2.0;
    const double gamma = 1.0 + u01() * 2.0;
    const DRQuery q = make_query(id, level, k, gamma, 0.25 + u01() * 0.15);
    const DREstimate est = dr_estimate(profile, q, obs);
    if (!est.value.finite()) continue;  // edge-reaching draws are legitimate

    const AdmissibleSet adm = admissible_set(profile, q);
    double brute = -1e300;
    const int m = 200000;
    for (int i = 0; i < m; ++i) {
      const double theta = adm.lo + (adm.hi - adm.lo) * i / (m - 1);
      const ExtendedReal g = dr_objective(profile, q, theta);
      if (g.finite() && g.value() > brute) brute = g.value();
    }
    CAPTURE(functional_name(id));
    CAPTURE(level);
    CAPTURE(k);
    CAPTURE(gamma);
    const double scale = std::fmax(1.0, std::fabs(brute));
    REQUIRE(est.value.value() >= brute - 1e-10 * scale);
    REQUIRE(std::fabs(est.value.value() - brute) <= 1e-5 * scale);
  }
}

TEST_CASE("query validation") {
  CHECK_THROWS_AS(validate_query(make_query(FunctionalId::ProbLoss, 2.0, 0.0, 1.0, {})),
                  InvalidParameterError);
  CHECK_THROWS_AS(validate_query(make_query(FunctionalId::ProbLoss, 2.0, 1.0, 0.5, {})),
                  InvalidParameterError);
  CHECK_THROWS_AS(validate_query(make_query(FunctionalId::ProbLoss, 2.0, 1.0, 1.0, -0.5)),
                  InvalidParameterError);
  CHECK_NOTHROW(validate_query(make_query(FunctionalId::ProbLoss, 2.0, 1.0, 1.5, 0.0)));
}
