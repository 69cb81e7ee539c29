#include "drexp/families.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace drexp {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double uniform_open01(std::mt19937_64& rng) {
  // 53-bit uniform shifted into the open interval (0,1); avoids the
  // implementation-defined std distributions so seeds reproduce bit-exact.
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

double domain_floor(double edge) {
  double d = edge + kDomainMargin;
  while (d - edge < kDomainMargin) {
    d = std::nextafter(d, std::numeric_limits<double>::infinity());
  }
  return d;
}

ParetoDomain ParetoDomain::above(double t) {
  if (!(t > 0.0)) throw InvalidParameterError("Pareto domain bound must be positive");
  return {t};
}

const NormalParams& ParamPoint::normal_params() const {
  if (!is_normal()) throw InvalidParameterError("parameter point is not Normal");
  return std::get<NormalParams>(p_);
}

const ParetoParams& ParamPoint::pareto_params() const {
  if (!is_pareto()) throw InvalidParameterError("parameter point is not Pareto");
  return std::get<ParetoParams>(p_);
}

ModelFamily ModelFamily::normal() {
  ModelFamily f;
  f.kind_ = FamilyKind::Normal2P;
  return f;
}

ModelFamily ModelFamily::pareto(ParetoDomain domain) {
  if (domain.lower < 0.0) throw InvalidParameterError("negative Pareto domain bound");
  ModelFamily f;
  f.kind_ = FamilyKind::Pareto;
  f.domain_ = domain;
  return f;
}

const ParetoDomain& ModelFamily::pareto_domain() const {
  if (!is_pareto()) throw InvalidParameterError("family is not Pareto");
  return domain_;
}

bool ModelFamily::contains(const ParamPoint& p) const {
  if (is_pareto()) {
    if (!p.is_pareto()) return false;
    const double theta = p.theta();
    return std::isfinite(theta) && theta - domain_.lower >= kDomainMargin;
  }
  if (!p.is_normal()) return false;
  const auto& np = p.normal_params();
  return std::isfinite(np.mu) && std::isfinite(np.sigma2) && np.sigma2 >= kDomainMargin;
}

void ModelFamily::require_in_domain(const ParamPoint& p) const {
  if (contains(p)) return;
  std::ostringstream os;
  if (is_pareto()) {
    os << "theta ";
    if (p.is_pareto()) os << p.theta() << " ";
    os << "outside open domain theta > " << domain_.lower;
  } else {
    os << "parameters outside Normal domain (sigma2 > 0 required)";
  }
  throw InvalidParameterError(os.str());
}

Observations::Observations(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw InvalidDataError("empty sample");
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvalidDataError("non-finite observation");
  }
}

void Observations::validate_for(const ModelFamily& family) const {
  if (!family.is_pareto()) return;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] > 1.0)) {
      std::ostringstream os;
      os << "observation " << i + 1 << " = " << values_[i]
         << " outside Pareto support (x > 1)";
      throw InvalidDataError(os.str());
    }
  }
}

double log_likelihood(const ModelFamily& family, const ParamPoint& params,
                      const Observations& obs) {
  obs.validate_for(family);
  family.require_in_domain(params);
  const auto n = static_cast<double>(obs.size());
  if (family.is_pareto()) {
    const double theta = params.theta();
    double sum_log = 0.0;
    for (double x : obs.values()) sum_log += std::log(x);
    return n * std::log(theta) - (1.0 + theta) * sum_log;
  }
  const auto& np = params.normal_params();
  double ss = 0.0;
  for (double x : obs.values()) {
    const double d = x - np.mu;
    ss += d * d;
  }
  return -0.5 * n * std::log(kTwoPi * np.sigma2) - ss / (2.0 * np.sigma2);
}

ParamPoint mle(const ModelFamily& family, const Observations& obs) {
  obs.validate_for(family);
  const auto n = static_cast<double>(obs.size());
  if (family.is_pareto()) {
    double sum_log = 0.0;
    for (double x : obs.values()) sum_log += std::log(x);
    if (!(sum_log > 0.0)) throw InvalidDataError("sum of log observations not positive");
    const double theta_hat = n / sum_log;
    const ParamPoint p = ParamPoint::pareto(theta_hat);
    if (!family.contains(p)) {
      std::ostringstream os;
      os << "unconstrained MLE theta = " << theta_hat << " outside domain theta > "
         << family.pareto_domain().lower;
      throw MleOutsideDomainError(os.str(), theta_hat);
    }
    return p;
  }
  if (obs.size() < 2) {
    throw MleOutsideDomainError("Normal MLE needs n >= 2 (sigma2 would be 0)", 0.0);
  }
  double mean = 0.0;
  for (double x : obs.values()) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : obs.values()) {
    const double d = x - mean;
    ss += d * d;
  }
  const double sigma2 = ss / n;
  if (sigma2 < kDomainMargin) {
    throw MleOutsideDomainError("degenerate Normal sample: sigma2-hat is 0", sigma2);
  }
  return ParamPoint::normal(mean, sigma2);
}

DivergenceProfile DivergenceProfile::fit(const ModelFamily& family, const Observations& obs) {
  obs.validate_for(family);
  DivergenceProfile p;
  p.family_ = family;
  p.n_ = obs.size();
  if (family.is_pareto()) {
    double sum_log = 0.0;
    for (double x : obs.values()) sum_log += std::log(x);
    p.sum_log_ = sum_log;
    const double theta_hat = static_cast<double>(p.n_) / sum_log;
    p.unconstrained_theta_ = theta_hat;
    if (theta_hat - family.pareto_domain().lower >= kDomainMargin) {
      p.reference_ = ParamPoint::pareto(theta_hat);
    } else {
      // Likelihood is decreasing on the restricted domain, so the constrained
      // maximizer sits at the boundary-adjacent point. Flagged for callers.
      p.reference_ = ParamPoint::pareto(domain_floor(family.pareto_domain().lower));
      p.constrained_ = true;
    }
    return p;
  }
  const ParamPoint m = mle(family, obs);  // throws on degenerate samples
  p.reference_ = m;
  p.xbar_ = m.normal_params().mu;
  p.sigma2_hat_ = m.normal_params().sigma2;
  return p;
}

double DivergenceProfile::divergence_pareto(double theta) const {
  const double ref = reference_.theta();
  if (!constrained_) {
    // n * (t - 1 - log t) with t = theta/theta_hat. Near the MLE the log1p
    // form avoids cancellation; far below it the direct log keeps full
    // relative precision (t - 1 saturates at -1 in doubles).
    const double t = theta / ref;
    if (t < 0.5) return static_cast<double>(n_) * (t - 1.0 - std::log(t));
    const double u = t - 1.0;
    return static_cast<double>(n_) * (u - std::log1p(u));
  }
  // General reference: alpha = loglik(ref) - loglik(theta).
  return static_cast<double>(n_) * std::log(ref / theta) + (theta - ref) * sum_log_;
}

double DivergenceProfile::divergence_normal_profiled(double sigma2) const {
  const double r = sigma2 / sigma2_hat_;
  if (r >= 2.0 || r < 0.5) {
    return 0.5 * static_cast<double>(n_) * (std::log(r) + 1.0 / r - 1.0);
  }
  const double v = sigma2_hat_ / sigma2 - 1.0;
  return 0.5 * static_cast<double>(n_) * (v - std::log1p(v));
}

double DivergenceProfile::divergence(const ParamPoint& params) const {
  family_.require_in_domain(params);
  if (family_.is_pareto()) return divergence_pareto(params.theta());
  const auto& np = params.normal_params();
  const double dm = xbar_ - np.mu;
  return divergence_normal_profiled(np.sigma2) +
         0.5 * static_cast<double>(n_) * dm * dm / np.sigma2;
}

InformationMatrix DivergenceProfile::information() const {
  InformationMatrix info;
  if (family_.is_pareto()) {
    const double t = reference_.theta();
    info.dim = 1;
    info.d1 = 1.0 / (t * t);
    return info;
  }
  info.dim = 2;
  info.d1 = 1.0 / sigma2_hat_;
  info.d2 = 1.0 / (2.0 * sigma2_hat_ * sigma2_hat_);
  return info;
}

double pareto_inverse_cdf(double u, double theta) {
  if (!(u > 0.0 && u < 1.0)) throw InvalidParameterError("uniform draw outside (0,1)");
  const double x = std::exp(-std::log(u) / theta);
  // Guard against rounding onto the excluded support boundary.
  return x > 1.0 ? x : std::nextafter(1.0, 2.0);
}

Observations sample(const ModelFamily& family, const ParamPoint& params,
                    std::size_t n, std::uint64_t seed) {
  family.require_in_domain(params);
  if (n == 0) throw InvalidDataError("sample size must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<double> values;
  values.reserve(n);
  if (family.is_pareto()) {
    const double theta = params.theta();
    for (std::size_t i = 0; i < n; ++i) {
      values.push_back(pareto_inverse_cdf(uniform_open01(rng), theta));
    }
  } else {
    const auto& np = params.normal_params();
    const double sd = std::sqrt(np.sigma2);
    bool have_spare = false;
    double spare = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double z;
      if (have_spare) {
        z = spare;
        have_spare = false;
      } else {
        const double u1 = uniform_open01(rng);
        const double u2 = uniform_open01(rng);
        const double r = std::sqrt(-2.0 * std::log(u1));
        z = r * std::cos(kTwoPi * u2);
        spare = r * std::sin(kTwoPi * u2);
        have_spare = true;
      }
      values.push_back(np.mu + sd * z);
    }
  }
  return Observations(std::move(values));
}

}  // namespace drexp
