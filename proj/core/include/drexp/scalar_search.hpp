#pragma once

#include <functional>
#include <vector>

namespace drexp {

struct ScalarPoint {
  double x = 0.0;
  double fx = 0.0;
};

/// Bisects f(x) = target on [lo, hi]; f(lo) - target and f(hi) - target must
/// have opposite signs (or one endpoint hits the target). Terminates at
/// absolute width tol_abs or when the interval stops shrinking in doubles.
double bisect_to_level(const std::function<double(double)>& f, double target,
                       double lo, double hi, double tol_abs);

/// Golden-section maximization on [lo, hi], returning the best point actually
/// evaluated (so a maximum at an endpoint is reported exactly). tol(x) gives
/// the x-resolution near x.
ScalarPoint golden_section_max(const std::function<double(double)>& f, double lo,
                               double hi, const std::function<double(double)>& tol);

/// m points spanning [lo, hi] uniformly.
std::vector<double> uniform_grid(double lo, double hi, int m);

/// m points spanning [lo, hi], log-spaced in (x - edge); clusters resolution
/// toward the edge side of the interval.
std::vector<double> edge_geometric_grid(double lo, double hi, double edge, int m);

}  // namespace drexp
