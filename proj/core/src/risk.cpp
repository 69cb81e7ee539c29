#include "drexp/risk.hpp"

#include <cmath>
#include <sstream>

namespace drexp {

const char* functional_name(FunctionalId id) {
  switch (id) {
    case FunctionalId::ExpectedShortfall: return "expected_shortfall";
    case FunctionalId::ValueAtRisk: return "value_at_risk";
    case FunctionalId::ProbLoss: return "prob_loss";
    case FunctionalId::IntegratedTail: return "integrated_tail";
    case FunctionalId::CramerLundberg: return "cramer_lundberg";
    case FunctionalId::MinMaxVar: return "minmaxvar";
    case FunctionalId::LinearPayoff: return "linear_payoff";
  }
  return "?";
}

FunctionalId functional_from_name(const std::string& name) {
  if (name == "expected_shortfall" || name == "es") return FunctionalId::ExpectedShortfall;
  if (name == "value_at_risk" || name == "var") return FunctionalId::ValueAtRisk;
  if (name == "prob_loss" || name == "pl") return FunctionalId::ProbLoss;
  if (name == "integrated_tail" || name == "it") return FunctionalId::IntegratedTail;
  if (name == "cramer_lundberg" || name == "cl") return FunctionalId::CramerLundberg;
  if (name == "minmaxvar" || name == "mmv") return FunctionalId::MinMaxVar;
  if (name == "linear_payoff" || name == "linpay") return FunctionalId::LinearPayoff;
  throw InputError("unknown risk functional: " + name);
}

void validate_functional(const RiskFunctional& f, const ModelFamily& family) {
  const double b = f.level;
  if (!std::isfinite(b)) throw InvalidParameterError("non-finite level");
  switch (f.id) {
    case FunctionalId::LinearPayoff:
      if (!family.is_normal()) {
        throw UnsupportedCombinationError("linear_payoff requires the Normal family");
      }
      return;
    case FunctionalId::ExpectedShortfall:
    case FunctionalId::ValueAtRisk:
      if (!(b > 0.0 && b < 1.0)) {
        throw InvalidParameterError("tail probability must lie in (0,1)");
      }
      break;
    case FunctionalId::ProbLoss:
    case FunctionalId::IntegratedTail:
    case FunctionalId::CramerLundberg:
      if (!(b >= 1.0)) throw InvalidParameterError("loss threshold must be >= 1");
      break;
    case FunctionalId::MinMaxVar:
      if (!(b > 0.0 && b <= 1.0)) {
        throw InvalidParameterError("distortion exponent must lie in (0,1]");
      }
      break;
  }
  if (!family.is_pareto()) {
    throw UnsupportedCombinationError(std::string(functional_name(f.id)) +
                                      " requires the Pareto family");
  }
  const bool needs_integrability =
      f.id == FunctionalId::ExpectedShortfall || f.id == FunctionalId::IntegratedTail ||
      f.id == FunctionalId::CramerLundberg || f.id == FunctionalId::MinMaxVar;
  if (needs_integrability && family.pareto_domain().lower < 1.0) {
    std::ostringstream os;
    os << functional_name(f.id) << " needs the integrable domain theta > 1 or stricter";
    throw UnsupportedCombinationError(os.str());
  }
}

ExtendedReal risk_value(const RiskFunctional& f, const ModelFamily& family,
                        const ParamPoint& params) {
  validate_functional(f, family);
  family.require_in_domain(params);
  if (f.id == FunctionalId::LinearPayoff) {
    return ExtendedReal(f.level * params.normal_params().mu);
  }
  const double theta = params.theta();
  const double L = std::log(f.level);
  double v = 0.0;
  switch (f.id) {
    case FunctionalId::ExpectedShortfall:
      v = theta / (theta - 1.0) * std::exp(-L / theta);
      break;
    case FunctionalId::ValueAtRisk:
      v = std::exp(-L / theta);
      break;
    case FunctionalId::ProbLoss:
      v = std::exp(-theta * L);
      break;
    case FunctionalId::IntegratedTail:
      v = std::exp((1.0 - theta) * L) / (theta - 1.0);
      break;
    case FunctionalId::CramerLundberg:
      v = std::exp((1.0 - theta) * L) / theta;
      break;
    case FunctionalId::MinMaxVar: {
      const double w = f.level * theta - 1.0;
      if (w <= 0.0) return ExtendedReal::infinity();
      v = f.level * theta / w;
      break;
    }
    case FunctionalId::LinearPayoff:
      break;  // handled above
  }
  if (!std::isfinite(v)) return ExtendedReal::infinity();
  return ExtendedReal(v);
}

double risk_derivative(const RiskFunctional& f, const ModelFamily& family,
                       const ParamPoint& params, int order) {
  validate_functional(f, family);
  family.require_in_domain(params);
  if (order < 1 || order > 3) throw InvalidParameterError("derivative order must be 1..3");
  if (f.id == FunctionalId::LinearPayoff) {
    return order == 1 ? f.level : 0.0;
  }
  const ExtendedReal at = risk_value(f, family, params);
  if (at.infinite()) throw InvalidParameterError("derivative requested at a divergence point");
  const double theta = params.theta();
  const double L = std::log(f.level);
  switch (f.id) {
    case FunctionalId::ExpectedShortfall: {
      const double p = std::exp(-L / theta);
      const double s = theta - 1.0;
      if (order == 1) return p * (L / (theta * s) - 1.0 / (s * s));
      if (order == 2) {
        return p * (2.0 / (s * s * s) - 2.0 * L / (theta * s * s) +
                    L * L / (theta * theta * theta * s));
      }
      const double t2 = theta * theta, t3 = t2 * theta, t4 = t3 * theta, t5 = t4 * theta;
      const double s2 = s * s, s3 = s2 * s, s4 = s3 * s;
      return p * (L * L * L / (t5 * s) - 3.0 * L * L / (t3 * s2) - 3.0 * L * L / (t4 * s) +
                  2.0 * L / (t2 * s3) + 2.0 * L / (t2 * s2) + 4.0 * L / (theta * s3) -
                  6.0 / s4);
    }
    case FunctionalId::ValueAtRisk: {
      const double p = std::exp(-L / theta);
      const double t2 = theta * theta, t3 = t2 * theta, t4 = t3 * theta;
      if (order == 1) return p * L / t2;
      if (order == 2) return p * (L * L / t4 - 2.0 * L / t3);
      return p * (L * L * L / (t4 * t2) - 6.0 * L * L / (t4 * theta) + 6.0 * L / t4);
    }
    case FunctionalId::ProbLoss: {
      const double p = std::exp(-theta * L);
      if (order == 1) return -L * p;
      if (order == 2) return L * L * p;
      return -L * L * L * p;
    }
    case FunctionalId::IntegratedTail: {
      const double s = theta - 1.0;
      const double base = std::exp(-s * L) / s;  // the value itself
      if (order == 1) return -base * (L + 1.0 / s);
      if (order == 2) return base * (L * L + 2.0 * L / s + 2.0 / (s * s));
      return -base * (L * L * L + 3.0 * L * L / s + 6.0 * L / (s * s) + 6.0 / (s * s * s));
    }
    case FunctionalId::CramerLundberg: {
      const double base = std::exp((1.0 - theta) * L) / theta;
      if (order == 1) return -base * (L + 1.0 / theta);
      if (order == 2) return base * (L * L + 2.0 * L / theta + 2.0 / (theta * theta));
      return -base * (L * L * L + 3.0 * L * L / theta + 6.0 * L / (theta * theta) +
                      6.0 / (theta * theta * theta));
    }
    case FunctionalId::MinMaxVar: {
      const double b = f.level;
      const double w = b * theta - 1.0;
      if (order == 1) return -b / (w * w);
      if (order == 2) return 2.0 * b * b / (w * w * w);
      return -6.0 * b * b * b / (w * w * w * w);
    }
    case FunctionalId::LinearPayoff:
      break;
  }
  throw InvalidParameterError("unreachable");
}

bool diverges_at_edge(const RiskFunctional& f, double edge_theta) {
  switch (f.id) {
    case FunctionalId::ExpectedShortfall:
    case FunctionalId::IntegratedTail:
      return edge_theta <= 1.0;
    case FunctionalId::ValueAtRisk:
      return edge_theta <= 0.0;
    case FunctionalId::MinMaxVar:
      return f.level * edge_theta <= 1.0;
    case FunctionalId::CramerLundberg:  // bounded by 1 near theta = 1
    case FunctionalId::ProbLoss:
    case FunctionalId::LinearPayoff:
      return false;
  }
  return false;
}

}  // namespace drexp
