#pragma once

#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "drexp/extended_real.hpp"
#include "drexp/families.hpp"
#include "drexp/risk.hpp"

namespace drexp {

inline constexpr double kGammaInfinity = std::numeric_limits<double>::infinity();

/// A DR-estimation request: risk functional, uncertainty aversion k > 0,
/// penalty curvature gamma in [1, inf], optional delta-truncation exponent.
struct DRQuery {
  RiskFunctional functional;
  double k = 1.0;
  double gamma = 1.0;                 // kGammaInfinity selects the flat penalty
  std::optional<double> delta;        // truncation: alpha <= n^delta

  bool gamma_infinite() const { return std::isinf(gamma); }
};

void validate_query(const DRQuery& q);

/// The parameter region where the (possibly truncated) penalty is finite,
/// cut to the family domain. For the Normal family the interval lives in
/// sigma2 with mu profiled out at its per-slice optimum.
struct AdmissibleSet {
  double bound = std::numeric_limits<double>::infinity();
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  bool touches_lo_edge = false;  // endpoint is the family-domain edge, not an alpha root
  bool touches_hi_edge = false;
};

enum class Verdict { Regular, BoundaryAttained, Unbounded, DomainEdgeDivergence };

const char* verdict_name(Verdict v);

struct DREstimate {
  ExtendedReal value;
  std::optional<ParamPoint> argmax;
  std::optional<double> alpha_at_argmax;
  std::optional<double> penalty_at_argmax;
  Verdict verdict = Verdict::Unbounded;
  /// Regularity reference bound: n^delta when truncation is present, +inf
  /// otherwise. (The gamma = inf optimization region may be cut tighter, at
  /// min(k, n^delta); that bound lives in the admissible set.)
  double bound_used = std::numeric_limits<double>::infinity();
  AdmissibleSet admissible;
  std::map<std::string, std::string> diagnostics;
};

struct EngineOptions {
  int grid_points = 512;
};

/// Interval where alpha <= bound. The bound is n^delta for a truncated query
/// with finite gamma, k for gamma = inf (min(k, n^delta) if also truncated),
/// and +inf for an untruncated finite-gamma query. Endpoints are alpha-level
/// roots bisected to 1e-12 absolute, except where the family-domain edge cuts
/// first (flagged).
AdmissibleSet admissible_set(const DivergenceProfile& profile, const DRQuery& query);

/// The penalized objective risk_value(theta) - (alpha(theta)/k)^gamma
/// (for gamma = inf: risk_value alone, defined on the admissible set).
/// For the Normal family, theta is read as sigma2 and mu is profiled out.
ExtendedReal dr_objective(const DivergenceProfile& profile, const DRQuery& query,
                          double theta);

/// Maximizes the penalized objective over the admissible set and issues the
/// regularity verdict. Unboundedness is detected symbolically at family
/// domain edges, by +inf risk values inside the admissible set, and by the
/// objective exceeding 1e12.
DREstimate dr_estimate(const DivergenceProfile& profile, const DRQuery& query,
                       const Observations& obs, const EngineOptions& opts = {});

struct RegularityReport {
  bool regular = false;
  std::string explanation;
};

/// True exactly when the verdict is Regular; otherwise explains which
/// condition failed.
RegularityReport regularity_check(const DREstimate& estimate);

struct GammaTransferEntry {
  double gamma = 1.0;
  double alpha_over_k = 0.0;
  bool ok = false;
};

struct GammaTransferReport {
  bool skipped = false;
  std::string reason;
  double base_alpha_over_k = 0.0;
  std::vector<GammaTransferEntry> entries;
  std::size_t violations = 0;
};

/// Checks that whenever the gamma = 1 truncated argmax has alpha/k < 1, the
/// argmaxes for each gamma > 1 in the list keep alpha/k < 1 as well. Skipped
/// (with reason) when the precondition fails.
GammaTransferReport gamma_transfer_check(const DivergenceProfile& profile,
                                         const DRQuery& query_gamma1,
                                         std::span<const double> gamma_list,
                                         const Observations& obs,
                                         const EngineOptions& opts = {});

}  // namespace drexp
