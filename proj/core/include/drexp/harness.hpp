#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "drexp/engine.hpp"
#include "drexp/report_json.hpp"

namespace drexp {

/// How the risk level depends on the sample size:
///   Fixed        beta = value
///   Power        beta = c * n^-p for tail probabilities (ES, VaR),
///                beta = c * n^+p for threshold levels (ProbLoss, IT, CL)
///                and payoff scales (LinearPayoff)
///   OffsetPower  beta = 1/theta_tilde + c * n^-p (MinMaxVar)
struct BetaRule {
  enum class Kind { Fixed, Power, OffsetPower };
  Kind kind = Kind::Fixed;
  double value = 0.0;        // Fixed
  double c = 1.0;            // Power, OffsetPower
  double p = 0.0;            // Power, OffsetPower
  double theta_tilde = 1.0;  // OffsetPower

  static BetaRule fixed(double beta);
  static BetaRule power(double c, double p);
  static BetaRule offset_power(double theta_tilde, double c, double p);

  double level_for(std::size_t n, FunctionalId id) const;
  std::string describe() const;
};

struct ExperimentPlan {
  ModelFamily family = ModelFamily::pareto(ParetoDomain::above_one());
  ParamPoint truth = ParetoParams{2.0};
  std::vector<std::size_t> n_grid;
  BetaRule beta_rule;
  FunctionalId functional = FunctionalId::ExpectedShortfall;
  double k = 1.0;
  double gamma = 1.0;
  std::optional<double> delta;
  std::size_t replications = 1;
  std::uint64_t master_seed = 0;
  std::optional<std::vector<double>> p_grid;  // present: frontier sweep over exponents

  DRQuery query_for(std::size_t n) const;
};

/// Throws PlanError when the plan violates its invariants (empty or
/// non-increasing n_grid, invalid levels at some n, bad query parameters).
void validate_plan(const ExperimentPlan& plan);

/// Deterministic, position-derived seed for replication j at sample size n.
std::uint64_t replication_seed(std::uint64_t master_seed, std::size_t n, std::size_t j);

struct ReplicationError {
  std::size_t replication = 0;
  std::string tag;
  std::string message;
};

struct FrontierRow {
  std::size_t n = 0;
  double beta = 0.0;
  std::size_t replications = 0;
  std::size_t regular_count = 0;
  std::size_t boundary_count = 0;
  std::size_t domain_edge_count = 0;
  std::size_t unbounded_count = 0;
  std::size_t error_count = 0;
  double regular_fraction = 0.0;
  std::optional<double> mean_value_regular;
  std::optional<double> mean_alpha_over_bound;  // over finite-value runs, vs the admissible bound
  std::vector<ReplicationError> errors;
};

struct FrontierReport {
  ExperimentPlan plan;
  std::optional<double> exponent;  // set when produced by frontier_sweep
  std::vector<FrontierRow> rows;
};

/// Runs the plan: for each n in n_grid draws `replications` independent
/// samples (seed = replication_seed(master, n, j)), fits, estimates, and
/// tallies verdicts. Replications raising library errors are recorded with
/// their tag and counted as non-regular, never dropped. Reports are bit-exact
/// reproducible from (plan, master_seed) and independent of thread count.
FrontierReport run_plan(const ExperimentPlan& plan, unsigned threads = 0);

/// Re-runs the plan once per exponent p (beta_rule Power with the base c).
std::vector<FrontierReport> frontier_sweep(const ExperimentPlan& base_plan,
                                           std::span<const double> p_grid,
                                           unsigned threads = 0);

/// Key-value plan file: `key = value` lines, '#' comments. Documented keys:
/// family (pareto|normal), domain (positive|above_one|above:<t>), theta |
/// mu + sigma2 (truth), functional, level_rule (fixed:<b> | power:<c>:<p> |
/// offset_power:<tt>:<c>:<p>), k, gamma (number|inf), delta (number|none),
/// n_grid (comma list), replications, master_seed, p_grid (optional comma list).
ExperimentPlan parse_plan_file(const std::filesystem::path& path);
ExperimentPlan parse_plan_text(const std::string& text);

Json plan_to_json(const ExperimentPlan& plan);
Json report_to_json(const FrontierReport& report);

}  // namespace drexp
