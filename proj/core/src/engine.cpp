#include "drexp/engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "drexp/scalar_search.hpp"

namespace drexp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kUnboundedThreshold = 1e12;
constexpr double kBoundaryMargin = 1e-3;  // interior means alpha < (1 - margin) * bound
constexpr double kLevelRootTol = 1e-12;

double theta_tol(double x) { return 1e-10 * (1.0 + std::fabs(x)); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double penalty_of(double alpha, double k, double gamma) {
  if (std::isinf(gamma)) return 0.0;  // callers restrict to alpha <= k first
  if (gamma == 1.0) return alpha / k;
  return std::pow(alpha / k, gamma);
}

/// Root of alpha(x) = level on the increasing branch right of ref (side > 0)
/// or the decreasing branch down to floor (side < 0). seed is the quadratic
/// half-width estimate sqrt(2 * level / curvature).
double alpha_level_root(const std::function<double(double)>& alpha, double ref,
                        double level, double seed, int side, double floor_x) {
  if (side > 0) {
    double hi = ref + seed;
    while (alpha(hi) < level) {
      hi = ref + 2.0 * (hi - ref);
      if (hi > 1e300) return kInf;  // bound unreachable within doubles
    }
    return bisect_to_level(alpha, level, ref, hi, kLevelRootTol);
  }
  double lo = std::max(floor_x, ref - seed);
  while (alpha(lo) < level) {
    lo = std::max(floor_x, ref - 2.0 * (ref - lo));
    if (lo == floor_x) break;
  }
  if (alpha(lo) < level) return floor_x;  // domain edge cuts before the level
  return bisect_to_level(alpha, level, lo, ref, kLevelRootTol);
}

struct SearchOutcome {
  bool unbounded = false;
  bool at_threshold = false;      // objective passed 1e12 rather than a true +inf
  bool blowup_near_lo_edge = false;
  double x = 0.0;
  double fx = 0.0;
};

/// Grid-then-golden maximization of f over [lo, hi]. The grid separates
/// basins (local maximum near the MLE vs growth toward a domain edge); the
/// best few brackets are refined. ref is always evaluated so a flat objective
/// resolves to the zero-divergence point.
SearchOutcome maximize_on_interval(const std::function<double(double)>& f, double lo,
                                   double hi, double ref, bool geometric,
                                   double edge_value, int grid_points) {
  SearchOutcome out;
  const std::vector<double> grid = geometric
                                       ? edge_geometric_grid(lo, hi, edge_value, grid_points)
                                       : uniform_grid(lo, hi, grid_points);
  const double clamped_ref = std::clamp(ref, lo, hi);
  double best_x = clamped_ref;
  double best_f = f(clamped_ref);
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = f(grid[i]);
    values[i] = v;
    if (!std::isfinite(v) || v > kUnboundedThreshold) {
      out.unbounded = true;
      out.at_threshold = std::isfinite(v);
      out.blowup_near_lo_edge = i < 8;
      out.x = grid[i];
      out.fx = v;
      return out;
    }
    if (v > best_f) {
      best_f = v;
      best_x = grid[i];
    }
  }
  if (!std::isfinite(best_f) || best_f > kUnboundedThreshold) {
    out.unbounded = true;
    out.at_threshold = std::isfinite(best_f);
    out.x = best_x;
    out.fx = best_f;
    return out;
  }

  // Candidate brackets: interior local maxima of the grid plus the bracket
  // holding ref.
  std::vector<std::pair<double, std::size_t>> cands;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const bool up_ok = i == 0 || values[i] >= values[i - 1];
    const bool down_ok = i + 1 == grid.size() || values[i] >= values[i + 1];
    if (up_ok && down_ok) cands.emplace_back(values[i], i);
  }
  std::sort(cands.begin(), cands.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  if (cands.size() > 4) cands.resize(4);
  const auto ref_it = std::upper_bound(grid.begin(), grid.end(), clamped_ref);
  cands.emplace_back(best_f,
                     static_cast<std::size_t>(std::max<std::ptrdiff_t>(
                         0, std::distance(grid.begin(), ref_it) - 1)));

  ScalarPoint best{best_x, best_f};
  for (const auto& [val, i] : cands) {
    const double a = grid[i == 0 ? 0 : i - 1];
    const double b = grid[std::min(grid.size() - 1, i + 1)];
    if (!(b > a)) continue;
    const ScalarPoint p = golden_section_max(f, a, b, theta_tol);
    if (p.fx > best.fx) best = p;
  }
  if (!std::isfinite(best.fx) || best.fx > kUnboundedThreshold) {
    out.unbounded = true;
    out.at_threshold = std::isfinite(best.fx);
    out.x = best.x;
    out.fx = best.fx;
    return out;
  }
  out.x = best.x;
  out.fx = best.fx;
  return out;
}

Verdict classify(double alpha_star, bool at_domain_edge, double bound_used) {
  if (at_domain_edge) return Verdict::DomainEdgeDivergence;
  if (std::isfinite(bound_used) && alpha_star >= (1.0 - kBoundaryMargin) * bound_used) {
    return Verdict::BoundaryAttained;
  }
  return Verdict::Regular;
}

struct NormalInner {
  double mu = 0.0;
  double value = 0.0;
};

/// Best mu for a fixed sigma2, constrained to alpha <= bound. The gamma = 1
/// sub-problem is closed form (mu = xbar + k*beta*sigma2/n); gamma = inf
/// takes the admissible boundary; other gammas do a concave 1D refinement.
NormalInner normal_inner_max(const DivergenceProfile& profile, const DRQuery& q,
                             double sigma2, double bound) {
  const double n = static_cast<double>(profile.sample_size());
  const double beta = q.functional.level;
  const double xbar = profile.xbar();
  const double a = profile.divergence_normal_profiled(sigma2);
  const double b = 0.5 * n / sigma2;
  const double w = std::sqrt(std::max(0.0, (bound - a)) / b);
  const auto value_at = [&](double u) {
    return beta * (xbar + u) - penalty_of(a + b * u * u, q.k, q.gamma);
  };
  if (q.gamma_infinite()) {
    const double u = beta >= 0.0 ? w : -w;
    return {xbar + u, beta * (xbar + u)};
  }
  if (q.gamma == 1.0) {
    const double u = std::clamp(q.k * beta * sigma2 / n, -w, w);
    return {xbar + u, value_at(u)};
  }
  const ScalarPoint p = golden_section_max(value_at, -w, w, [&](double) {
    return 1e-12 * (1.0 + std::fabs(xbar) + w);
  });
  return {xbar + p.x, p.fx};
}

}  // namespace

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Regular: return "Regular";
    case Verdict::BoundaryAttained: return "BoundaryAttained";
    case Verdict::Unbounded: return "Unbounded";
    case Verdict::DomainEdgeDivergence: return "DomainEdgeDivergence";
  }
  return "?";
}

void validate_query(const DRQuery& q) {
  if (!(q.k > 0.0) || !std::isfinite(q.k)) throw InvalidParameterError("k must be positive");
  if (!(q.gamma >= 1.0)) throw InvalidParameterError("gamma must be >= 1 (or infinity)");
  if (q.delta && (!(*q.delta >= 0.0) || !std::isfinite(*q.delta))) {
    throw InvalidParameterError("delta must be >= 0");
  }
}

AdmissibleSet admissible_set(const DivergenceProfile& profile, const DRQuery& query) {
  validate_query(query);
  const double n = static_cast<double>(profile.sample_size());

  AdmissibleSet adm;
  if (query.gamma_infinite()) {
    adm.bound = query.delta ? std::min(query.k, std::pow(n, *query.delta)) : query.k;
  } else if (query.delta) {
    adm.bound = std::pow(n, *query.delta);
  } else {
    adm.bound = kInf;
  }

  const bool pareto = profile.family().is_pareto();
  const double edge = pareto ? profile.family().pareto_domain().lower : 0.0;
  const double dom_lo = domain_floor(edge);
  const double ref = pareto ? profile.reference().theta() : profile.sigma2_hat();

  if (std::isinf(adm.bound)) {
    adm.lo = dom_lo;
    adm.hi = kInf;
    adm.touches_lo_edge = true;
    adm.touches_hi_edge = true;
    return adm;
  }

  const auto alpha = [&](double x) {
    return pareto ? profile.divergence_pareto(x) : profile.divergence_normal_profiled(x);
  };
  const double curvature = pareto ? n / (ref * ref) : 0.5 * n / (ref * ref);
  const double seed = std::sqrt(2.0 * adm.bound / curvature);

  if (alpha(dom_lo) <= adm.bound) {
    adm.lo = dom_lo;
    adm.touches_lo_edge = true;
  } else {
    adm.lo = alpha_level_root(alpha, ref, adm.bound, seed, -1, dom_lo);
  }
  adm.hi = alpha_level_root(alpha, ref, adm.bound, seed, +1, dom_lo);
  adm.touches_hi_edge = std::isinf(adm.hi);
  if (adm.touches_hi_edge) {
    // The level is unreachable within doubles (the Normal profiled divergence
    // grows only logarithmically in sigma2); fall back to the representable
    // range.
    adm.hi = 1e300;
  }
  if (adm.lo > adm.hi) throw EmptyAdmissibleSetError("no parameter satisfies the bound");
  return adm;
}

ExtendedReal dr_objective(const DivergenceProfile& profile, const DRQuery& query,
                          double theta) {
  validate_query(query);
  if (profile.family().is_pareto()) {
    const ExtendedReal r =
        risk_value(query.functional, profile.family(), ParamPoint::pareto(theta));
    if (r.infinite()) return r;
    return ExtendedReal(r.value() -
                        penalty_of(profile.divergence_pareto(theta), query.k, query.gamma));
  }
  // theta read as sigma2, mu profiled at the gamma = 1 optimum.
  const double n = static_cast<double>(profile.sample_size());
  const double mu = profile.xbar() + query.k * query.functional.level * theta / n;
  const double alpha = profile.divergence(ParamPoint::normal(mu, theta));
  return ExtendedReal(query.functional.level * mu - penalty_of(alpha, query.k, query.gamma));
}

DREstimate dr_estimate(const DivergenceProfile& profile, const DRQuery& query,
                       const Observations& obs, const EngineOptions& opts) {
  validate_query(query);
  validate_functional(query.functional, profile.family());
  if (obs.size() != profile.sample_size()) {
    throw InvalidDataError("observations do not match the fitted profile");
  }

  const double n = static_cast<double>(profile.sample_size());
  DREstimate est;
  est.bound_used = query.delta ? std::pow(n, *query.delta) : kInf;
  est.admissible = admissible_set(profile, query);
  if (profile.constrained_reference()) {
    est.diagnostics["constrained_reference"] = fmt(profile.unconstrained_theta());
  }
  if (query.gamma_infinite() && query.delta) {
    est.diagnostics["gamma_inf_bound_convention"] = "min(k, n^delta)";
  }

  const bool pareto = profile.family().is_pareto();
  const double edge = pareto ? profile.family().pareto_domain().lower : 0.0;

  const auto finish_unbounded = [&](const std::string& key, const std::string& detail) {
    est.value = ExtendedReal::infinity();
    est.verdict = Verdict::Unbounded;
    est.diagnostics[key] = detail;
    return est;
  };

  if (pareto) {
    const RiskFunctional& f = query.functional;
    if (est.admissible.touches_lo_edge && diverges_at_edge(f, edge)) {
      return finish_unbounded("divergence_at_domain_edge", "theta -> " + fmt(edge));
    }
    if (f.id == FunctionalId::MinMaxVar && f.level * est.admissible.lo <= 1.0) {
      return finish_unbounded("infinite_risk_value_in_admissible_set",
                              "minmaxvar infinite for theta <= " + fmt(1.0 / f.level));
    }

    const double ref = profile.reference().theta();
    double lo = est.admissible.lo;
    double hi = est.admissible.hi;
    bool lo_is_search_edge = est.admissible.touches_lo_edge;

    if (std::isinf(est.admissible.bound)) {
      // Untruncated finite gamma: the penalty caps how far the optimizer can
      // wander; restrict the scan to where (alpha/k)^gamma could still beat
      // the value at the reference.
      const ExtendedReal r_lo = risk_value(f, profile.family(), ParamPoint::pareto(lo));
      const ExtendedReal r_ref = risk_value(f, profile.family(), ParamPoint::pareto(ref));
      if (r_lo.infinite() || r_ref.infinite()) {
        return finish_unbounded("infinite_risk_value_in_admissible_set", "");
      }
      const double gain = std::max(1.0, r_lo.value() - r_ref.value() + 1.0);
      const double alpha_cap = query.k * std::pow(gain, 1.0 / query.gamma);
      const auto alpha = [&](double x) { return profile.divergence_pareto(x); };
      const double seed = std::sqrt(2.0 * alpha_cap * ref * ref / n);
      hi = alpha_level_root(alpha, ref, alpha_cap, seed, +1, lo);
      if (alpha(lo) > alpha_cap) {
        lo = alpha_level_root(alpha, ref, alpha_cap, seed, -1, lo);
        lo_is_search_edge = false;
      }
    }

    const auto objective = [&](double th) -> double {
      const ExtendedReal r = risk_value(f, profile.family(), ParamPoint::pareto(th));
      if (r.infinite()) return kInf;
      if (query.gamma_infinite()) return r.value();
      return r.value() - penalty_of(profile.divergence_pareto(th), query.k, query.gamma);
    };
    const SearchOutcome s =
        maximize_on_interval(objective, lo, hi, ref, lo_is_search_edge, edge, opts.grid_points);
    if (s.unbounded) {
      return finish_unbounded(s.at_threshold ? "objective_threshold_exceeded"
                                             : "infinite_risk_value_in_admissible_set",
                              s.blowup_near_lo_edge && lo_is_search_edge
                                  ? "blow-up at theta -> " + fmt(edge)
                                  : "at theta = " + fmt(s.x));
    }

    const double alpha_star = profile.divergence_pareto(s.x);
    est.value = ExtendedReal(s.fx);
    est.argmax = ParamPoint::pareto(s.x);
    est.alpha_at_argmax = alpha_star;
    est.penalty_at_argmax =
        query.gamma_infinite() ? 0.0 : penalty_of(alpha_star, query.k, query.gamma);
    const double edge_window =
        std::max(4.0 * theta_tol(s.x), (hi - lo) * 1e-9);
    const bool at_edge = lo_is_search_edge && (s.x - lo) <= edge_window;
    est.verdict = classify(alpha_star, at_edge, est.bound_used);
    return est;
  }

  // Normal family, linear payoff.
  const double beta = query.functional.level;
  if (beta == 0.0) {
    est.value = ExtendedReal(0.0);
    est.argmax = profile.reference();
    est.alpha_at_argmax = 0.0;
    est.penalty_at_argmax = 0.0;
    est.verdict = Verdict::Regular;
    return est;
  }
  if (std::isinf(est.admissible.bound)) {
    return finish_unbounded("divergence_at_domain_edge", "sigma2 -> infinity");
  }

  const double bound = est.admissible.bound;
  const auto outer = [&](double s2) { return normal_inner_max(profile, query, s2, bound).value; };
  const SearchOutcome s = maximize_on_interval(outer, est.admissible.lo, est.admissible.hi,
                                               profile.sigma2_hat(), false, 0.0,
                                               opts.grid_points);
  if (s.unbounded) {
    return finish_unbounded(s.at_threshold ? "objective_threshold_exceeded"
                                           : "infinite_risk_value_in_admissible_set",
                            "at sigma2 = " + fmt(s.x));
  }
  const NormalInner inner = normal_inner_max(profile, query, s.x, bound);
  const ParamPoint argmax = ParamPoint::normal(inner.mu, s.x);
  const double alpha_star = profile.divergence(argmax);
  est.value = ExtendedReal(inner.value);
  est.argmax = argmax;
  est.alpha_at_argmax = alpha_star;
  est.penalty_at_argmax =
      query.gamma_infinite() ? 0.0 : penalty_of(alpha_star, query.k, query.gamma);
  est.verdict = classify(alpha_star, false, est.bound_used);
  return est;
}

RegularityReport regularity_check(const DREstimate& estimate) {
  switch (estimate.verdict) {
    case Verdict::Regular:
      return {true, "finite interior maximizer with divergence strictly below the bound"};
    case Verdict::Unbounded:
      return {false, "value not finite"};
    case Verdict::BoundaryAttained:
      return {false, "maximizer within boundary tolerance of the truncation bound"};
    case Verdict::DomainEdgeDivergence:
      return {false, "maximizer pinned at the family-domain edge"};
  }
  return {false, "?"};
}

GammaTransferReport gamma_transfer_check(const DivergenceProfile& profile,
                                         const DRQuery& query_gamma1,
                                         std::span<const double> gamma_list,
                                         const Observations& obs,
                                         const EngineOptions& opts) {
  if (query_gamma1.gamma != 1.0) {
    throw InvalidParameterError("gamma_transfer_check expects a gamma = 1 base query");
  }
  GammaTransferReport report;
  const DREstimate base = dr_estimate(profile, query_gamma1, obs, opts);
  if (base.value.infinite() || !base.alpha_at_argmax) {
    report.skipped = true;
    report.reason = "gamma = 1 estimate is unbounded";
    return report;
  }
  report.base_alpha_over_k = *base.alpha_at_argmax / query_gamma1.k;
  if (!(report.base_alpha_over_k < 1.0)) {
    report.skipped = true;
    report.reason = "gamma = 1 argmax has alpha/k >= 1";
    return report;
  }
  for (double g : gamma_list) {
    if (!(g > 1.0)) throw InvalidParameterError("gamma list entries must exceed 1");
    DRQuery q = query_gamma1;
    q.gamma = g;
    const DREstimate est = dr_estimate(profile, q, obs, opts);
    GammaTransferEntry entry;
    entry.gamma = g;
    if (est.value.finite() && est.alpha_at_argmax) {
      entry.alpha_over_k = *est.alpha_at_argmax / q.k;
      entry.ok = entry.alpha_over_k < 1.0;
    } else {
      entry.alpha_over_k = kInf;
      entry.ok = false;
    }
    if (!entry.ok) ++report.violations;
    report.entries.push_back(entry);
  }
  return report;
}

}  // namespace drexp
