// drexp: divergence-robust estimation of tail risk under parametric models.
//
// Subcommands:
//   estimate  one DR estimation on a CSV sample, JSON report
//   diagnose  regularity verdicts across a grid of truncation exponents
//   sweep     Monte Carlo plan runner / frontier sweep, JSON report
//   simulate  emit the exact sample a plan replication would use, as CSV

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "drexp/asymptotics.hpp"
#include "drexp/csv.hpp"
#include "drexp/engine.hpp"
#include "drexp/harness.hpp"
#include "drexp/oracle.hpp"
#include "drexp/report_json.hpp"

namespace {

using namespace drexp;

struct EstimateOptions {
  std::string input;
  std::string family = "pareto";
  std::string domain = "above_one";
  std::string functional;
  double level = 0.0;
  double k = 1.0;
  std::string gamma = "1";
  std::string delta = "none";
  std::string output;
};

ModelFamily parse_family(const std::string& family, const std::string& domain) {
  if (family == "normal") return ModelFamily::normal();
  if (family != "pareto") throw InputError("unknown family: " + family);
  if (domain == "positive") return ModelFamily::pareto(ParetoDomain::positive());
  if (domain == "above_one") return ModelFamily::pareto(ParetoDomain::above_one());
  if (domain.rfind("above:", 0) == 0) {
    try {
      return ModelFamily::pareto(ParetoDomain::above(std::stod(domain.substr(6))));
    } catch (const std::exception&) {
      throw InputError("bad domain bound: " + domain);
    }
  }
  throw InputError("unknown domain: " + domain);
}

double parse_gamma(const std::string& text) {
  if (text == "inf") return kGammaInfinity;
  try {
    const double g = std::stod(text);
    if (g >= 1.0) return g;
  } catch (const std::exception&) {
  }
  throw InputError("gamma must be a number >= 1 or \"inf\": " + text);
}

std::optional<double> parse_delta(const std::string& text) {
  if (text == "none") return std::nullopt;
  try {
    const double d = std::stod(text);
    if (d >= 0.0) return d;
  } catch (const std::exception&) {
  }
  throw InputError("delta must be a number >= 0 or \"none\": " + text);
}

Json param_to_json(const ParamPoint& p) {
  Json j = Json::object();
  if (p.is_pareto()) {
    j["theta"] = p.theta();
  } else {
    j["mu"] = p.normal_params().mu;
    j["sigma2"] = p.normal_params().sigma2;
  }
  return j;
}

Json extended_to_json(const ExtendedReal& v) {
  if (v.infinite()) return Json("+inf");
  return Json(v.value());
}

Json bound_to_json(double b) {
  if (std::isinf(b)) return Json("+inf");
  return Json(b);
}

Json query_to_json(const DRQuery& q) {
  Json j = Json::object();
  j["functional"] = functional_name(q.functional.id);
  j["level"] = q.functional.level;
  j["k"] = q.k;
  j["gamma"] = q.gamma_infinite() ? Json("inf") : Json(q.gamma);
  j["delta"] = q.delta ? Json(*q.delta) : Json("none");
  return j;
}

Json estimate_to_json(const DivergenceProfile& profile, const DRQuery& query,
                      const DREstimate& est) {
  Json j = Json::object();
  j["n"] = profile.sample_size();
  j["mle"] = param_to_json(profile.reference());
  if (profile.constrained_reference()) {
    j["constrained_reference"] = true;
    j["unconstrained_theta"] = profile.unconstrained_theta();
  }
  const InformationMatrix info = profile.information();
  Json curv = Json::array();
  const double n = static_cast<double>(profile.sample_size());
  curv.push_back(n * info.d1);
  if (info.dim == 2) curv.push_back(n * info.d2);
  j["alpha_curvature"] = std::move(curv);
  j["query"] = query_to_json(query);
  j["value"] = extended_to_json(est.value);
  j["argmax"] = est.argmax ? param_to_json(*est.argmax) : Json(nullptr);
  j["alpha_at_argmax"] = est.alpha_at_argmax ? Json(*est.alpha_at_argmax) : Json(nullptr);
  j["penalty_at_argmax"] = est.penalty_at_argmax ? Json(*est.penalty_at_argmax) : Json(nullptr);
  j["verdict"] = verdict_name(est.verdict);
  j["regular"] = est.verdict == Verdict::Regular;
  j["bound_used"] = bound_to_json(est.bound_used);
  Json adm = Json::object();
  adm["bound"] = bound_to_json(est.admissible.bound);
  adm["lo"] = est.admissible.lo;
  adm["hi"] = bound_to_json(est.admissible.hi);
  adm["touches_lo_edge"] = est.admissible.touches_lo_edge;
  adm["touches_hi_edge"] = est.admissible.touches_hi_edge;
  j["admissible"] = std::move(adm);
  if (query.gamma == 1.0 || query.gamma_infinite()) {
    try {
      const Expansion e = expand(profile, query.functional, query.k, query.gamma);
      Json ej = Json::object();
      ej["center"] = e.center_value;
      ej["correction"] = e.correction;
      ej["local_variance"] = e.local_variance;
      ej["order"] = e.order_claim == RemainderOrder::OPn32 ? "O_P(n^-3/2)" : "O_P(n^-3/4)";
      j["expansion"] = std::move(ej);
    } catch (const Error&) {
      j["expansion"] = nullptr;
    }
  } else {
    j["expansion"] = nullptr;
  }
  Json diag = Json::object();
  for (const auto& [key, value] : est.diagnostics) diag[key] = value;
  j["diagnostics"] = std::move(diag);
  return j;
}

void emit(const Json& j, const std::string& output) {
  const std::string text = j.dump();
  if (output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(output, std::ios::binary);
  if (!out) throw InputError("cannot open output file: " + output);
  out << text;
}

int run_estimate(const EstimateOptions& opt) {
  const ModelFamily family = parse_family(opt.family, opt.domain);
  const Observations obs = load_observations_csv(std::filesystem::path(opt.input), family);
  const DivergenceProfile profile = DivergenceProfile::fit(family, obs);
  DRQuery query;
  query.functional = RiskFunctional{functional_from_name(opt.functional), opt.level};
  query.k = opt.k;
  query.gamma = parse_gamma(opt.gamma);
  query.delta = parse_delta(opt.delta);
  validate_query(query);
  validate_functional(query.functional, family);
  const DREstimate est = dr_estimate(profile, query, obs);
  emit(estimate_to_json(profile, query, est), opt.output);
  switch (est.verdict) {
    case Verdict::Regular: return 0;
    case Verdict::BoundaryAttained:
    case Verdict::DomainEdgeDivergence: return 2;
    case Verdict::Unbounded: return 3;
  }
  return 1;
}

int run_diagnose(const EstimateOptions& opt) {
  const ModelFamily family = parse_family(opt.family, opt.domain);
  const Observations obs = load_observations_csv(std::filesystem::path(opt.input), family);
  const DivergenceProfile profile = DivergenceProfile::fit(family, obs);
  DRQuery query;
  query.functional = RiskFunctional{functional_from_name(opt.functional), opt.level};
  query.k = opt.k;
  query.gamma = parse_gamma(opt.gamma);
  validate_functional(query.functional, family);

  std::vector<double> deltas = {0.0, 0.25, 0.5, 0.75};
  if (const std::optional<double> user = parse_delta(opt.delta)) {
    bool present = false;
    for (double d : deltas) present |= (d == *user);
    if (!present) deltas.push_back(*user);
  }

  Json j = Json::object();
  j["n"] = profile.sample_size();
  j["mle"] = param_to_json(profile.reference());
  if (profile.constrained_reference()) j["constrained_reference"] = true;
  j["query"] = query_to_json(query);
  Json grid = Json::array();
  bool all_regular = true;
  for (double d : deltas) {
    DRQuery q = query;
    q.delta = d;
    validate_query(q);
    const DREstimate est = dr_estimate(profile, q, obs);
    const RegularityReport rep = regularity_check(est);
    all_regular &= rep.regular;
    Json row = Json::object();
    row["delta"] = d;
    row["bound"] = bound_to_json(est.bound_used);
    row["verdict"] = verdict_name(est.verdict);
    row["regular"] = rep.regular;
    row["explanation"] = rep.explanation;
    row["value"] = extended_to_json(est.value);
    row["alpha_at_argmax"] =
        est.alpha_at_argmax ? Json(*est.alpha_at_argmax) : Json(nullptr);
    grid.push_back(std::move(row));
  }
  j["grid"] = std::move(grid);
  j["regular_at_all_deltas"] = all_regular;
  emit(j, opt.output);
  return 0;
}

int run_sweep(const std::string& plan_path, unsigned threads,
              std::optional<std::uint64_t> seed_override, const std::string& output) {
  ExperimentPlan plan = parse_plan_file(plan_path);
  if (seed_override) plan.master_seed = *seed_override;
  Json j = Json::object();
  Json reports = Json::array();
  Json summary = Json::array();
  const auto add_summary = [&](const FrontierReport& report) {
    for (const FrontierRow& row : report.rows) {
      Json s = Json::object();
      s["exponent"] = report.exponent ? Json(*report.exponent) : Json(nullptr);
      s["n"] = row.n;
      s["beta"] = row.beta;
      s["regular_fraction"] = row.regular_fraction;
      summary.push_back(std::move(s));
    }
  };
  if (plan.p_grid) {
    for (const FrontierReport& report : frontier_sweep(plan, *plan.p_grid, threads)) {
      add_summary(report);
      reports.push_back(report_to_json(report));
    }
  } else {
    const FrontierReport report = run_plan(plan, threads);
    add_summary(report);
    reports.push_back(report_to_json(report));
  }
  j["reports"] = std::move(reports);
  j["summary"] = std::move(summary);
  emit(j, output);
  return 0;
}

int run_simulate(const std::string& plan_path, std::size_t size_index,
                 std::size_t replication, std::optional<std::uint64_t> seed_override,
                 const std::string& output) {
  ExperimentPlan plan = parse_plan_file(plan_path);
  if (seed_override) plan.master_seed = *seed_override;
  if (size_index >= plan.n_grid.size()) {
    throw InputError("size index out of range for the plan's n_grid");
  }
  const std::size_t n = plan.n_grid[size_index];
  const Observations obs =
      sample(plan.family, plan.truth, n, replication_seed(plan.master_seed, n, replication));
  if (output.empty()) {
    write_observations_csv(std::cout, obs);
    return 0;
  }
  std::ofstream out(output, std::ios::binary);
  if (!out) throw InputError("cannot open output file: " + output);
  write_observations_csv(out, obs);
  return 0;
}

void add_estimate_options(CLI::App* cmd, EstimateOptions& opt) {
  cmd->add_option("--input,-i", opt.input, "CSV file, one value per line")->required();
  cmd->add_option("--family", opt.family, "pareto | normal");
  cmd->add_option("--domain", opt.domain, "positive | above_one | above:<t> (Pareto only)");
  cmd->add_option("--functional,-f", opt.functional,
                  "es | var | pl | it | cl | mmv | linpay (or full names)")
      ->required();
  cmd->add_option("--level,-b", opt.level, "risk level beta")->required();
  cmd->add_option("--k", opt.k, "uncertainty aversion k > 0");
  cmd->add_option("--gamma,-g", opt.gamma, "penalty curvature, number >= 1 or \"inf\"");
  cmd->add_option("--output,-o", opt.output, "write the JSON report here (default stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"divergence-robust tail risk estimation"};
  app.require_subcommand(1);

  EstimateOptions est_opt;
  CLI::App* est = app.add_subcommand("estimate", "run one DR estimation");
  add_estimate_options(est, est_opt);
  est->add_option("--delta,-d", est_opt.delta, "truncation exponent, number >= 0 or \"none\"");

  EstimateOptions diag_opt;
  CLI::App* diag = app.add_subcommand("diagnose", "regularity across truncation exponents");
  add_estimate_options(diag, diag_opt);
  diag->add_option("--delta,-d", diag_opt.delta,
                   "extra truncation exponent to include in the grid");

  std::string plan_path;
  unsigned threads = 0;
  std::optional<std::uint64_t> sweep_seed;
  std::string sweep_output;
  CLI::App* sweep = app.add_subcommand("sweep", "run a Monte Carlo plan file");
  sweep->add_option("--plan,-p", plan_path, "plan file (key = value)")->required();
  sweep->add_option("--threads,-t", threads, "worker threads (0 = auto)");
  sweep->add_option("--master-seed", sweep_seed, "override the plan's master seed");
  sweep->add_option("--output,-o", sweep_output, "write the JSON report here");

  std::string sim_plan;
  std::size_t size_index = 0;
  std::size_t replication = 0;
  std::optional<std::uint64_t> sim_seed;
  std::string sim_output;
  CLI::App* sim = app.add_subcommand("simulate", "emit one plan replication as CSV");
  sim->add_option("--plan,-p", sim_plan, "plan file (key = value)")->required();
  sim->add_option("--size-index", size_index, "index into the plan's n_grid");
  sim->add_option("--replication", replication, "replication index");
  sim->add_option("--master-seed", sim_seed, "override the plan's master seed");
  sim->add_option("--output,-o", sim_output, "write the CSV here (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (est->parsed()) return run_estimate(est_opt);
    if (diag->parsed()) return run_diagnose(diag_opt);
    if (sweep->parsed()) return run_sweep(plan_path, threads, sweep_seed, sweep_output);
    if (sim->parsed()) return run_simulate(sim_plan, size_index, replication, sim_seed, sim_output);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
