#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "drexp/families.hpp"
#include "drexp/risk.hpp"

namespace drexp {

enum class RemainderOrder { OPn32, OPn34 };  // O_P(n^-3/2) resp. O_P(n^-3/4)

/// Large-sample approximation of the DR value around the MLE:
///   gamma = 1:   E[phi] + (k / 2n) V          + O_P(n^-3/2)
///   gamma = inf: E[phi] + sqrt(2 k V / n)     + O_P(n^-3/4)
/// with V the local variance at the reference point.
struct Expansion {
  double center_value = 0.0;
  double correction = 0.0;
  RemainderOrder order_claim = RemainderOrder::OPn32;
  double local_variance = 0.0;

  double value() const { return center_value + correction; }
};

/// V(phi, theta-hat) = grad_theta E[phi]^T I^-1 grad_theta E[phi] with the
/// per-observation information at the reference; the squared sensitivity of
/// the functional to the fitted parameter.
double local_variance(const DivergenceProfile& profile, const RiskFunctional& functional);

/// gamma must be 1 or infinity; k >= 0 (k = 0 reduces to the plug-in value).
Expansion expand(const DivergenceProfile& profile, const RiskFunctional& functional,
                 double k, double gamma);

struct NormalExtremum {
  double mu_star = 0.0;
  double sigma2_star = 0.0;
};

/// Closed-form extremum of the quadratic approximation of the gamma = 1
/// linear-payoff problem: sigma2* = s2h * (1 + beta^2 k^2 s2h / n^2),
/// mu* = xbar + k beta sigma2* / n.
NormalExtremum normal_extremum_approx(double xbar, double sigma2hat, double beta,
                                      double k, std::size_t n);

/// Symmetric matrix of dimension 1 or 2 (a12 ignored when dim == 1).
struct SymmetricMatrix {
  int dim = 1;
  double a11 = 0.0;
  double a12 = 0.0;
  double a22 = 0.0;

  bool negative_definite() const;
};

/// Leading-order interior maximizer -H^-1 grad of a smooth function with
/// gradient grad at 0 and negative definite Hessian H.
std::vector<double> quadratic_interior_max(const std::vector<double>& grad,
                                           const SymmetricMatrix& hessian);

}  // namespace drexp
