#include "drexp/asymptotics.hpp"

#include <cmath>

namespace drexp {

double local_variance(const DivergenceProfile& profile, const RiskFunctional& functional) {
  validate_functional(functional, profile.family());
  if (profile.family().is_normal()) {
    // Gradient of E[beta X] in (mu, sigma2) is (beta, 0); only the mu block
    // of the inverse information contributes.
    const double beta = functional.level;
    return beta * beta * profile.sigma2_hat();
  }
  const double d1 = risk_derivative(functional, profile.family(), profile.reference(), 1);
  if (!std::isfinite(d1)) {
    throw InvalidParameterError("functional derivative divergent at the reference");
  }
  const double theta = profile.reference().theta();
  return d1 * d1 * theta * theta;  // I^-1 = theta^2 per observation
}

Expansion expand(const DivergenceProfile& profile, const RiskFunctional& functional,
                 double k, double gamma) {
  if (!(k >= 0.0)) throw InvalidParameterError("k must be >= 0");
  if (!(gamma == 1.0 || std::isinf(gamma))) {
    throw InvalidParameterError("expansion available for gamma = 1 or gamma = infinity");
  }
  const ExtendedReal center = risk_value(functional, profile.family(), profile.reference());
  if (center.infinite()) {
    throw InvalidParameterError("functional infinite at the reference point");
  }
  Expansion e;
  e.center_value = center.value();
  e.local_variance = local_variance(profile, functional);
  const double n = static_cast<double>(profile.sample_size());
  if (gamma == 1.0) {
    e.correction = 0.5 * k / n * e.local_variance;
    e.order_claim = RemainderOrder::OPn32;
  } else {
    e.correction = std::sqrt(2.0 * k * e.local_variance / n);
    e.order_claim = RemainderOrder::OPn34;
  }
  return e;
}

NormalExtremum normal_extremum_approx(double xbar, double sigma2hat, double beta,
                                      double k, std::size_t n) {
  if (!(sigma2hat > 0.0)) throw InvalidParameterError("sigma2hat must be positive");
  if (n == 0) throw InvalidParameterError("n must be >= 1");
  const double nn = static_cast<double>(n);
  NormalExtremum e;
  e.sigma2_star = sigma2hat * (1.0 + beta * beta * k * k * sigma2hat / (nn * nn));
  e.mu_star = xbar + k * beta * e.sigma2_star / nn;
  return e;
}

bool SymmetricMatrix::negative_definite() const {
  if (dim == 1) return a11 < 0.0;
  return a11 < 0.0 && a11 * a22 - a12 * a12 > 0.0;
}

std::vector<double> quadratic_interior_max(const std::vector<double>& grad,
                                           const SymmetricMatrix& hessian) {
  if (grad.size() != static_cast<std::size_t>(hessian.dim) ||
      (hessian.dim != 1 && hessian.dim != 2)) {
    throw InvalidParameterError("gradient/Hessian dimension mismatch");
  }
  if (!hessian.negative_definite()) {
    throw InvalidParameterError("Hessian is not negative definite");
  }
  if (hessian.dim == 1) return {-grad[0] / hessian.a11};
  const double det = hessian.a11 * hessian.a22 - hessian.a12 * hessian.a12;
  return {-(hessian.a22 * grad[0] - hessian.a12 * grad[1]) / det,
          -(hessian.a11 * grad[1] - hessian.a12 * grad[0]) / det};
}

}  // namespace drexp
