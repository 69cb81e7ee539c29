#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "drexp/errors.hpp"

namespace drexp {

/// Minimum distance a parameter must keep above an open domain boundary.
inline constexpr double kDomainMargin = 1e-12;

/// Smallest double at least kDomainMargin above the edge (edge + margin can
/// round below the margin).
double domain_floor(double edge);

enum class FamilyKind { Normal2P, Pareto };

/// Lower bound of the Pareto shape domain: theta > lower.
struct ParetoDomain {
  double lower = 0.0;

  static ParetoDomain positive() { return {0.0}; }
  static ParetoDomain above_one() { return {1.0}; }
  static ParetoDomain above(double t);

  friend bool operator==(const ParetoDomain&, const ParetoDomain&) = default;
};

struct NormalParams {
  double mu = 0.0;
  double sigma2 = 1.0;
};

struct ParetoParams {
  double theta = 1.0;
};

/// Parameter point of a family; holds whichever shape the family uses.
class ParamPoint {
 public:
  ParamPoint(NormalParams p) : p_(p) {}  // NOLINT
  ParamPoint(ParetoParams p) : p_(p) {}  // NOLINT
  static ParamPoint normal(double mu, double sigma2) { return ParamPoint(NormalParams{mu, sigma2}); }
  static ParamPoint pareto(double theta) { return ParamPoint(ParetoParams{theta}); }

  bool is_normal() const { return std::holds_alternative<NormalParams>(p_); }
  bool is_pareto() const { return std::holds_alternative<ParetoParams>(p_); }
  const NormalParams& normal_params() const;
  const ParetoParams& pareto_params() const;
  double theta() const { return pareto_params().theta; }

 private:
  std::variant<NormalParams, ParetoParams> p_;
};

/// A parametric iid model family: two-parameter Normal, or one-parameter
/// Pareto with known minimal value 1 (density theta * x^-(1+theta) on x > 1).
class ModelFamily {
 public:
  static ModelFamily normal();
  static ModelFamily pareto(ParetoDomain domain);

  FamilyKind kind() const { return kind_; }
  bool is_normal() const { return kind_ == FamilyKind::Normal2P; }
  bool is_pareto() const { return kind_ == FamilyKind::Pareto; }
  const ParetoDomain& pareto_domain() const;

  /// True when the point respects the open domain with kDomainMargin slack.
  bool contains(const ParamPoint& p) const;
  void require_in_domain(const ParamPoint& p) const;

  friend bool operator==(const ModelFamily&, const ModelFamily&) = default;

 private:
  FamilyKind kind_ = FamilyKind::Pareto;
  ParetoDomain domain_{};
};

/// An ordered batch of real observations.
class Observations {
 public:
  explicit Observations(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Throws InvalidDataError when a value violates the family's support.
  void validate_for(const ModelFamily& family) const;

 private:
  std::vector<double> values_;
};

/// Per-observation observed information at the reference point, stored as a
/// diagonal (both families have diagonal information at the MLE).
struct InformationMatrix {
  int dim = 1;
  double d1 = 0.0;
  double d2 = 0.0;

  bool positive_definite() const { return d1 > 0.0 && (dim < 2 || d2 > 0.0); }
};

double log_likelihood(const ModelFamily& family, const ParamPoint& params,
                      const Observations& obs);

/// Closed-form maximum likelihood estimate. Throws MleOutsideDomainError when
/// the unconstrained optimum is outside the family domain (degenerate Normal
/// sample, or restricted Pareto domain excluding n / sum(log x)).
ParamPoint mle(const ModelFamily& family, const Observations& obs);

/// The fitted likelihood geometry of a sample: reference point (MLE, or the
/// domain-constrained maximizer when the MLE is excluded by a restricted
/// domain), sufficient statistics, and curvature at the reference.
class DivergenceProfile {
 public:
  static DivergenceProfile fit(const ModelFamily& family, const Observations& obs);

  const ModelFamily& family() const { return family_; }
  const ParamPoint& reference() const { return reference_; }
  std::size_t sample_size() const { return n_; }

  /// True when the unconstrained MLE fell outside a restricted Pareto domain
  /// and the reference was moved to the boundary-adjacent maximizer.
  bool constrained_reference() const { return constrained_; }
  double unconstrained_theta() const { return unconstrained_theta_; }

  // Sufficient statistics.
  double sum_log() const { return sum_log_; }      // Pareto: sum of log x_i
  double xbar() const { return xbar_; }            // Normal: sample mean
  double sigma2_hat() const { return sigma2_hat_; }  // Normal: 1/n sum (x - xbar)^2

  /// Divergence alpha(params) = loglik(reference) - loglik(params).
  /// Nonnegative on the domain, exactly zero at the reference.
  double divergence(const ParamPoint& params) const;
  double divergence_pareto(double theta) const;

  /// Divergence of (mu, sigma2) minimized over mu, i.e. alpha(xbar, sigma2).
  double divergence_normal_profiled(double sigma2) const;

  /// Per-observation observed information at the reference.
  InformationMatrix information() const;

 private:
  ModelFamily family_ = ModelFamily::pareto(ParetoDomain::positive());
  ParamPoint reference_ = ParetoParams{1.0};
  std::size_t n_ = 0;
  bool constrained_ = false;
  double unconstrained_theta_ = 0.0;
  double sum_log_ = 0.0;
  double xbar_ = 0.0;
  double sigma2_hat_ = 0.0;
};

inline InformationMatrix information(const DivergenceProfile& profile) {
  return profile.information();
}

inline double divergence(const DivergenceProfile& profile, const ParamPoint& params) {
  return profile.divergence(params);
}

/// Pareto inverse cdf: x = u^(-1/theta) for u in (0,1).
double pareto_inverse_cdf(double u, double theta);

/// Draw n iid observations, deterministic given the seed.
Observations sample(const ModelFamily& family, const ParamPoint& params,
                    std::size_t n, std::uint64_t seed);

}  // namespace drexp
