#include "drexp/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

namespace drexp {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string error_tag(const Error& e) {
  if (dynamic_cast<const MleOutsideDomainError*>(&e)) return "mle_outside_domain";
  if (dynamic_cast<const EmptyAdmissibleSetError*>(&e)) return "empty_admissible_set";
  if (dynamic_cast<const OracleFailureError*>(&e)) return "oracle_failure";
  if (dynamic_cast<const UnsupportedCombinationError*>(&e)) return "unsupported_combination";
  if (dynamic_cast<const InvalidParameterError*>(&e)) return "invalid_parameter";
  if (dynamic_cast<const InvalidDataError*>(&e)) return "invalid_data";
  if (dynamic_cast<const PlanError*>(&e)) return "plan_error";
  if (dynamic_cast<const InputError*>(&e)) return "input_error";
  return "error";
}

struct ReplicationResult {
  enum class Kind { Regular, Boundary, DomainEdge, Unbounded, Failed } kind = Kind::Failed;
  double value = 0.0;
  double alpha_over_bound = 0.0;
  bool has_ratio = false;
  std::string tag;
  std::string message;
};

ReplicationResult run_replication(const ExperimentPlan& plan, std::size_t n, std::size_t j) {
  ReplicationResult r;
  try {
    const std::uint64_t seed = replication_seed(plan.master_seed, n, j);
    const Observations obs = sample(plan.family, plan.truth, n, seed);
    const DivergenceProfile profile = DivergenceProfile::fit(plan.family, obs);
    const DRQuery query = plan.query_for(n);
    const DREstimate est = dr_estimate(profile, query, obs);
    switch (est.verdict) {
      case Verdict::Regular: r.kind = ReplicationResult::Kind::Regular; break;
      case Verdict::BoundaryAttained: r.kind = ReplicationResult::Kind::Boundary; break;
      case Verdict::DomainEdgeDivergence: r.kind = ReplicationResult::Kind::DomainEdge; break;
      case Verdict::Unbounded: r.kind = ReplicationResult::Kind::Unbounded; break;
    }
    if (est.value.finite()) {
      r.value = est.value.value();
      if (est.alpha_at_argmax && std::isfinite(est.admissible.bound)) {
        r.alpha_over_bound = *est.alpha_at_argmax / est.admissible.bound;
        r.has_ratio = true;
      }
    }
  } catch (const Error& e) {
    r.kind = ReplicationResult::Kind::Failed;
    r.tag = error_tag(e);
    r.message = e.what();
  }
  return r;
}

}  // namespace

BetaRule BetaRule::fixed(double beta) {
  BetaRule r;
  r.kind = Kind::Fixed;
  r.value = beta;
  return r;
}

BetaRule BetaRule::power(double c, double p) {
  BetaRule r;
  r.kind = Kind::Power;
  r.c = c;
  r.p = p;
  return r;
}

BetaRule BetaRule::offset_power(double theta_tilde, double c, double p) {
  BetaRule r;
  r.kind = Kind::OffsetPower;
  r.theta_tilde = theta_tilde;
  r.c = c;
  r.p = p;
  return r;
}

double BetaRule::level_for(std::size_t n, FunctionalId id) const {
  const double nn = static_cast<double>(n);
  switch (kind) {
    case Kind::Fixed:
      return value;
    case Kind::Power:
      switch (id) {
        case FunctionalId::ExpectedShortfall:
        case FunctionalId::ValueAtRisk:
          return c * std::pow(nn, -p);  // tail probability shrinks with n
        case FunctionalId::ProbLoss:
        case FunctionalId::IntegratedTail:
        case FunctionalId::CramerLundberg:
        case FunctionalId::LinearPayoff:
          return c * std::pow(nn, p);  // threshold / payoff scale grows with n
        case FunctionalId::MinMaxVar:
          throw PlanError("minmaxvar needs level_rule fixed or offset_power");
      }
      break;
    case Kind::OffsetPower:
      if (id != FunctionalId::MinMaxVar) {
        throw PlanError("offset_power level rule is specific to minmaxvar");
      }
      return 1.0 / theta_tilde + c * std::pow(nn, -p);
  }
  throw PlanError("unreachable beta rule");
}

std::string BetaRule::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::Fixed: os << "fixed:" << value; break;
    case Kind::Power: os << "power:" << c << ":" << p; break;
    case Kind::OffsetPower: os << "offset_power:" << theta_tilde << ":" << c << ":" << p; break;
  }
  return os.str();
}

DRQuery ExperimentPlan::query_for(std::size_t n) const {
  DRQuery q;
  q.functional = RiskFunctional{functional, beta_rule.level_for(n, functional)};
  q.k = k;
  q.gamma = gamma;
  q.delta = delta;
  return q;
}

void validate_plan(const ExperimentPlan& plan) {
  if (plan.replications < 1) throw PlanError("replications must be >= 1");
  if (plan.n_grid.empty()) throw PlanError("n_grid must not be empty");
  for (std::size_t i = 0; i + 1 < plan.n_grid.size(); ++i) {
    if (!(plan.n_grid[i] < plan.n_grid[i + 1])) {
      throw PlanError("n_grid must be strictly increasing");
    }
  }
  if (!plan.family.contains(plan.truth)) throw PlanError("truth outside the family domain");
  for (std::size_t n : plan.n_grid) {
    if (n == 0) throw PlanError("sample sizes must be >= 1");
    try {
      const DRQuery q = plan.query_for(n);
      validate_query(q);
      validate_functional(q.functional, plan.family);
    } catch (const PlanError&) {
      throw;
    } catch (const Error& e) {
      std::ostringstream os;
      os << "plan invalid at n = " << n << ": " << e.what();
      throw PlanError(os.str());
    }
  }
  if (plan.p_grid) {
    for (double p : *plan.p_grid) {
      if (!std::isfinite(p)) throw PlanError("p_grid entries must be finite");
    }
  }
}

std::uint64_t replication_seed(std::uint64_t master_seed, std::size_t n, std::size_t j) {
  std::uint64_t h = splitmix64(master_seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(n));
  h = splitmix64(h ^ static_cast<std::uint64_t>(j));
  return h;
}

FrontierReport run_plan(const ExperimentPlan& plan, unsigned threads) {
  validate_plan(plan);
  FrontierReport report;
  report.plan = plan;
  if (threads == 0) {
    threads = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  }
  for (std::size_t n : plan.n_grid) {
    std::vector<ReplicationResult> results(plan.replications);
    const auto worker = [&](std::size_t begin, std::size_t end) {
      for (std::size_t j = begin; j < end; ++j) results[j] = run_replication(plan, n, j);
    };
    if (threads <= 1 || plan.replications < 2) {
      worker(0, plan.replications);
    } else {
      std::vector<std::thread> pool;
      const std::size_t chunk = (plan.replications + threads - 1) / threads;
      for (std::size_t begin = 0; begin < plan.replications; begin += chunk) {
        pool.emplace_back(worker, begin, std::min(begin + chunk, plan.replications));
      }
      for (auto& t : pool) t.join();
    }

    // Deterministic reduction in replication order.
    FrontierRow row;
    row.n = n;
    row.beta = plan.beta_rule.level_for(n, plan.functional);
    row.replications = plan.replications;
    double value_sum = 0.0;
    double ratio_sum = 0.0;
    std::size_t ratio_count = 0;
    for (std::size_t j = 0; j < plan.replications; ++j) {
      const ReplicationResult& r = results[j];
      switch (r.kind) {
        case ReplicationResult::Kind::Regular:
          ++row.regular_count;
          value_sum += r.value;
          break;
        case ReplicationResult::Kind::Boundary: ++row.boundary_count; break;
        case ReplicationResult::Kind::DomainEdge: ++row.domain_edge_count; break;
        case ReplicationResult::Kind::Unbounded: ++row.unbounded_count; break;
        case ReplicationResult::Kind::Failed:
          ++row.error_count;
          row.errors.push_back({j, r.tag, r.message});
          break;
      }
      if (r.has_ratio) {
        ratio_sum += r.alpha_over_bound;
        ++ratio_count;
      }
    }
    row.regular_fraction =
        static_cast<double>(row.regular_count) / static_cast<double>(row.replications);
    if (row.regular_count > 0) {
      row.mean_value_regular = value_sum / static_cast<double>(row.regular_count);
    }
    if (ratio_count > 0) {
      row.mean_alpha_over_bound = ratio_sum / static_cast<double>(ratio_count);
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::vector<FrontierReport> frontier_sweep(const ExperimentPlan& base_plan,
                                           std::span<const double> p_grid,
                                           unsigned threads) {
  std::vector<FrontierReport> reports;
  for (double p : p_grid) {
    ExperimentPlan plan = base_plan;
    plan.beta_rule = BetaRule::power(base_plan.beta_rule.c, p);
    plan.p_grid.reset();
    FrontierReport report = run_plan(plan, threads);
    report.exponent = p;
    reports.push_back(std::move(report));
  }
  return reports;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string trimmed(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw PlanError("bad numeric value for " + key + ": " + v);
  }
}

}  // namespace

ExperimentPlan parse_plan_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trimmed(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw PlanError("plan line " + std::to_string(lineno) + ": expected key = value");
    }
    kv[trimmed(t.substr(0, eq))] = trimmed(t.substr(eq + 1));
  }
  const auto need = [&](const std::string& key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw PlanError("plan is missing key: " + key);
    return it->second;
  };
  const auto get = [&](const std::string& key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };

  ExperimentPlan plan;
  const std::string family = need("family");
  if (family == "pareto") {
    ParetoDomain domain = ParetoDomain::above_one();
    if (const std::string* d = get("domain")) {
      if (*d == "positive") domain = ParetoDomain::positive();
      else if (*d == "above_one") domain = ParetoDomain::above_one();
      else if (d->rfind("above:", 0) == 0) {
        domain = ParetoDomain::above(parse_double("domain", d->substr(6)));
      } else {
        throw PlanError("unknown domain: " + *d);
      }
    }
    plan.family = ModelFamily::pareto(domain);
    plan.truth = ParamPoint::pareto(parse_double("theta", need("theta")));
  } else if (family == "normal") {
    plan.family = ModelFamily::normal();
    plan.truth = ParamPoint::normal(parse_double("mu", need("mu")),
                                    parse_double("sigma2", need("sigma2")));
  } else {
    throw PlanError("unknown family: " + family);
  }

  try {
    plan.functional = functional_from_name(need("functional"));
  } catch (const InputError& e) {
    throw PlanError(e.what());
  }

  const std::string rule = need("level_rule");
  const std::vector<std::string> parts = split(rule, ':');
  if (parts[0] == "fixed" && parts.size() == 2) {
    plan.beta_rule = BetaRule::fixed(parse_double("level_rule", parts[1]));
  } else if (parts[0] == "power" && parts.size() == 3) {
    plan.beta_rule = BetaRule::power(parse_double("level_rule", parts[1]),
                                     parse_double("level_rule", parts[2]));
  } else if (parts[0] == "offset_power" && parts.size() == 4) {
    plan.beta_rule = BetaRule::offset_power(parse_double("level_rule", parts[1]),
                                            parse_double("level_rule", parts[2]),
                                            parse_double("level_rule", parts[3]));
  } else {
    throw PlanError("bad level_rule: " + rule);
  }

  plan.k = parse_double("k", need("k"));
  const std::string gamma = need("gamma");
  plan.gamma = gamma == "inf" ? kGammaInfinity : parse_double("gamma", gamma);
  const std::string delta = need("delta");
  if (delta != "none") plan.delta = parse_double("delta", delta);

  for (const std::string& tok : split(need("n_grid"), ',')) {
    const double v = parse_double("n_grid", trimmed(tok));
    if (v < 1.0 || v != std::floor(v)) throw PlanError("n_grid entries must be integers >= 1");
    plan.n_grid.push_back(static_cast<std::size_t>(v));
  }
  const double reps = parse_double("replications", need("replications"));
  if (reps < 1.0 || reps != std::floor(reps)) throw PlanError("replications must be >= 1");
  plan.replications = static_cast<std::size_t>(reps);
  try {
    plan.master_seed = std::stoull(need("master_seed"));
  } catch (const std::exception&) {
    throw PlanError("bad master_seed: " + need("master_seed"));
  }
  if (const std::string* pg = get("p_grid")) {
    std::vector<double> ps;
    if (!trimmed(*pg).empty()) {
      for (const std::string& tok : split(*pg, ',')) {
        ps.push_back(parse_double("p_grid", trimmed(tok)));
      }
    }
    plan.p_grid = std::move(ps);
  }
  validate_plan(plan);
  return plan;
}

ExperimentPlan parse_plan_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PlanError("cannot open plan file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_plan_text(buffer.str());
}

Json plan_to_json(const ExperimentPlan& plan) {
  Json j = Json::object();
  if (plan.family.is_pareto()) {
    j["family"] = "pareto";
    j["domain_lower"] = plan.family.pareto_domain().lower;
    j["theta"] = plan.truth.theta();
  } else {
    j["family"] = "normal";
    j["mu"] = plan.truth.normal_params().mu;
    j["sigma2"] = plan.truth.normal_params().sigma2;
  }
  j["functional"] = functional_name(plan.functional);
  j["level_rule"] = plan.beta_rule.describe();
  j["k"] = plan.k;
  if (std::isinf(plan.gamma)) j["gamma"] = "inf";
  else j["gamma"] = plan.gamma;
  if (plan.delta) j["delta"] = *plan.delta;
  else j["delta"] = "none";
  Json grid = Json::array();
  for (std::size_t n : plan.n_grid) grid.push_back(n);
  j["n_grid"] = std::move(grid);
  j["replications"] = plan.replications;
  j["master_seed"] = plan.master_seed;
  return j;
}

Json report_to_json(const FrontierReport& report) {
  Json j = Json::object();
  j["plan"] = plan_to_json(report.plan);
  if (report.exponent) j["exponent"] = *report.exponent;
  Json rows = Json::array();
  for (const FrontierRow& row : report.rows) {
    Json r = Json::object();
    r["n"] = row.n;
    r["beta"] = row.beta;
    r["replications"] = row.replications;
    r["regular_count"] = row.regular_count;
    r["boundary_count"] = row.boundary_count;
    r["domain_edge_count"] = row.domain_edge_count;
    r["unbounded_count"] = row.unbounded_count;
    r["error_count"] = row.error_count;
    r["regular_fraction"] = row.regular_fraction;
    r["mean_value_regular"] =
        row.mean_value_regular ? Json(*row.mean_value_regular) : Json(nullptr);
    r["mean_alpha_over_bound"] =
        row.mean_alpha_over_bound ? Json(*row.mean_alpha_over_bound) : Json(nullptr);
    Json errs = Json::array();
    for (const ReplicationError& e : row.errors) {
      Json je = Json::object();
      je["replication"] = e.replication;
      je["tag"] = e.tag;
      je["message"] = e.message;
      errs.push_back(std::move(je));
    }
    r["errors"] = std::move(errs);
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j;
}

}  // namespace drexp
