#include "drexp/oracle.hpp"

#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

namespace drexp {

namespace {

constexpr double kRelTol = 1e-7;

double pareto_sf(double x, double theta) {  // survival 1 - F
  return std::exp(-theta * std::log(x));
}

void check_error(double estimate, double value) {
  if (!std::isfinite(value) || estimate > kRelTol * std::fmax(1.0, std::fabs(value))) {
    throw OracleFailureError("quadrature did not converge");
  }
}

/// Integral of coef * x^(-s) over (q, infinity), s > 1, via the substitution
/// y = 1/x: tanh-sinh on (0, 1/q) with the integrand coef * y^(s-2) kept in
/// log space so the endpoint singularity (1 < s < 2) never overflows.
double integrate_power_tail(double coef, double s, double q) {
  const double log_coef = std::log(coef);
  boost::math::quadrature::tanh_sinh<double> integrator;
  double error = 0.0;
  const double value = integrator.integrate(
      [&](double y) {
        const double e = log_coef + (s - 2.0) * std::log(y);
        return std::exp(std::fmin(e, 705.0));
      },
      0.0, 1.0 / q, 1e-9, &error);
  check_error(error, value);
  return value;
}

/// Numeric quantile: bisect the Pareto cdf for F(x) = 1 - beta.
double quantile_by_bisection(double theta, double beta) {
  double lo = 1.0, hi = 2.0;
  while (pareto_sf(hi, theta) > beta) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw OracleFailureError("quantile bracket expansion failed");
  }
  for (int i = 0; i < 200 && (hi - lo) > 1e-13 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (pareto_sf(mid, theta) > beta ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double expectation_oracle(const ModelFamily& family, const ParamPoint& params,
                          const RiskFunctional& functional) {
  validate_functional(functional, family);
  family.require_in_domain(params);
  if (risk_value(functional, family, params).infinite()) {
    throw InvalidParameterError("oracle requested where the functional is infinite");
  }
  const double beta = functional.level;
  if (functional.id == FunctionalId::LinearPayoff) {
    const auto& np = params.normal_params();
    const double inv_two_s2 = 1.0 / (2.0 * np.sigma2);
    const double norm = 1.0 / std::sqrt(2.0 * M_PI * np.sigma2);
    boost::math::quadrature::sinh_sinh<double> integrator;
    double error = 0.0;
    const double mean = integrator.integrate(
        [&](double x) {
          const double d = x - np.mu;
          return x * norm * std::exp(-d * d * inv_two_s2);
        },
        1e-9, &error);
    check_error(error, mean == 0.0 ? 1.0 : mean);
    return beta * mean;
  }
  const double theta = params.theta();
  switch (functional.id) {
    case FunctionalId::ValueAtRisk:
      return quantile_by_bisection(theta, beta);
    case FunctionalId::ExpectedShortfall: {
      // Conditional tail integral over the numerically inverted quantile:
      // integrand x * f(x) = theta * x^-theta, tail mass f(x) itself.
      const double q = quantile_by_bisection(theta, beta);
      const double num = integrate_power_tail(theta, theta, q);
      const double den = integrate_power_tail(theta, 1.0 + theta, q);
      return num / den;
    }
    case FunctionalId::ProbLoss:
      return integrate_power_tail(theta, 1.0 + theta, beta);
    case FunctionalId::IntegratedTail:
      return integrate_power_tail(1.0, theta, beta);  // integral of 1 - F
    case FunctionalId::CramerLundberg: {
      const double it = integrate_power_tail(1.0, theta, beta);
      const double mean = integrate_power_tail(theta, theta, 1.0);
      return it / mean;
    }
    case FunctionalId::MinMaxVar:
      // Expectation under the distorted cdf lambda(F), lambda(y) = 1-(1-y)^beta:
      // integrand x * lambda'(F(x)) * f(x) = beta*theta * x^(-beta*theta).
      return integrate_power_tail(beta * theta, beta * theta, 1.0);
    case FunctionalId::LinearPayoff:
      break;
  }
  throw OracleFailureError("unreachable");
}

}  // namespace drexp
