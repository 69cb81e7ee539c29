#include "drexp/scalar_search.hpp"

#include <cmath>

#include "drexp/errors.hpp"

namespace drexp {

double bisect_to_level(const std::function<double(double)>& f, double target,
                       double lo, double hi, double tol_abs) {
  double flo = f(lo) - target;
  double fhi = f(hi) - target;
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw InvalidParameterError("bisection bracket does not straddle the level");
  }
  while (hi - lo > tol_abs) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // interval below double resolution
    const double fm = f(mid) - target;
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (fhi > 0.0)) {
      hi = mid;
      fhi = fm;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

ScalarPoint golden_section_max(const std::function<double(double)>& f, double lo,
                               double hi, const std::function<double(double)>& tol) {
  constexpr double kInvPhi = 0.6180339887498949;
  ScalarPoint best{lo, f(lo)};
  const double fhi = f(hi);
  if (fhi > best.fx) best = {hi, fhi};

  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  if (fc > best.fx) best = {c, fc};
  if (fd > best.fx) best = {d, fd};
  for (int iter = 0; iter < 200 && (b - a) > tol(0.5 * (a + b)); ++iter) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
      if (fc > best.fx) best = {c, fc};
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
      if (fd > best.fx) best = {d, fd};
    }
  }
  return best;
}

std::vector<double> uniform_grid(double lo, double hi, int m) {
  std::vector<double> g(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    g[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / (m - 1);
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

std::vector<double> edge_geometric_grid(double lo, double hi, double edge, int m) {
  const double s_lo = lo - edge;
  const double s_hi = hi - edge;
  if (!(s_lo > 0.0) || !(s_hi > s_lo)) return uniform_grid(lo, hi, m);
  const double ratio = std::log(s_hi / s_lo);
  std::vector<double> g(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    g[static_cast<std::size_t>(i)] =
        edge + s_lo * std::exp(ratio * static_cast<double>(i) / (m - 1));
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

}  // namespace drexp
