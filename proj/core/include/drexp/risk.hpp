#pragma once

#include <string>

#include "drexp/extended_real.hpp"
#include "drexp/families.hpp"

namespace drexp {

enum class FunctionalId {
  ExpectedShortfall,
  ValueAtRisk,
  ProbLoss,
  IntegratedTail,
  CramerLundberg,
  MinMaxVar,
  LinearPayoff,
};

const char* functional_name(FunctionalId id);
FunctionalId functional_from_name(const std::string& name);

/// A law-based risk functional with its level. The level's meaning follows
/// the functional: tail probability in (0,1) for ExpectedShortfall and
/// ValueAtRisk, loss threshold >= 1 for ProbLoss / IntegratedTail /
/// CramerLundberg, distortion exponent in (0,1] for MinMaxVar, payoff scale
/// for LinearPayoff.
struct RiskFunctional {
  FunctionalId id = FunctionalId::ProbLoss;
  double level = 1.0;
};

/// Throws UnsupportedCombinationError / InvalidParameterError when the level
/// is out of range or the family cannot host the functional (LinearPayoff is
/// Normal-only; the rest are Pareto; ExpectedShortfall, IntegratedTail,
/// CramerLundberg and MinMaxVar need the integrable domain theta > 1 or
/// stricter).
void validate_functional(const RiskFunctional& f, const ModelFamily& family);

/// Closed-form value of the functional at the given parameter point.
///
/// Pareto closed forms, with beta the level:
///   ExpectedShortfall  theta/(theta-1) * beta^(-1/theta)
///   ValueAtRisk        beta^(-1/theta)
///   ProbLoss           beta^(-theta)
///   IntegratedTail     beta^(1-theta) / (theta-1)
///   CramerLundberg     beta^(1-theta) / theta
///   MinMaxVar          beta*theta / (beta*theta - 1), infinite when beta*theta <= 1
/// Normal: LinearPayoff = beta * mu.
///
/// Returns the +inf marker where the closed form diverges; a floating-point
/// overflow of a mathematically finite form is also reported as the marker.
ExtendedReal risk_value(const RiskFunctional& f, const ModelFamily& family,
                        const ParamPoint& params);

/// Analytic d^order/dtheta^order of the Pareto closed forms (order 1..3).
/// For LinearPayoff this is the mu-derivative (beta, then 0).
double risk_derivative(const RiskFunctional& f, const ModelFamily& family,
                       const ParamPoint& params, int order);

/// True when the functional's value grows without bound as theta approaches
/// the given domain edge from inside (the lower Pareto edge, in practice).
bool diverges_at_edge(const RiskFunctional& f, double edge_theta);

}  // namespace drexp
