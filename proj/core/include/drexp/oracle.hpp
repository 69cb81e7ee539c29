#pragma once

#include "drexp/risk.hpp"

namespace drexp {

/// Recomputes the functional by numeric integration of the density (adaptive
/// quadrature; expected shortfall as a conditional tail integral, integrated
/// tail as the integral of the survival function, quantiles by bisecting the
/// cdf). Independent of the closed forms in risk_value; used to cross-check
/// them. Target accuracy 1e-7 absolute or relative.
///
/// Throws InvalidParameterError when the functional is not finite at the
/// point, OracleFailureError when the quadrature does not converge.
double expectation_oracle(const ModelFamily& family, const ParamPoint& params,
                          const RiskFunctional& functional);

}  // namespace drexp
