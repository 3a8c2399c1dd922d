#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <variant>

#include "sdpack/analysis.hpp"
#include "sdpack/model.hpp"
#include "sdpack/reduce.hpp"

namespace sdpack::cli {

namespace {

json vec(const Eigen::VectorXd& v) {
  json a = json::array();
  for (long i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json mat(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (long i = 0; i < m.rows(); ++i) a.push_back(vec(m.row(i).transpose()));
  return a;
}

json one_based(const std::vector<int>& idx) {
  json a = json::array();
  for (int i : idx) a.push_back(i + 1);
  return a;
}

json kkt_json(const KktResiduals& k) {
  return {{"primal", k.primal}, {"dual", k.dual}, {"complementarity", k.complementarity}, {"scale", k.scale},
          {"pass", k.pass}};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Problem load(const std::string& path) { return parse_problem(read_file(path)); }

PackingProblem formulate(const DesignProblem& d) {
  switch (d.criterion) {
    case Criterion::COptimal: return build_c_optimal(d);
    case Criterion::AOptimal: return build_a_optimal(d);
    case Criterion::EOptimal: return build_e_optimal(d);
  }
  throw Error(ErrorCode::WrongCriterion, "unknown criterion");
}

// Packing problems pass through; design problems are turned into their
// packing formulation; combined problems are rejected.
PackingProblem as_packing(const Problem& prob, const char* command) {
  if (const auto* p = std::get_if<PackingProblem>(&prob)) return *p;
  if (const auto* d = std::get_if<DesignProblem>(&prob)) {
    if (d->resource) {
      throw Error(ErrorCode::InvalidInput, std::string(command) + " does not take resource-constrained designs");
    }
    return formulate(*d);
  }
  throw Error(ErrorCode::InvalidInput, std::string(command) + " expects a packing or design problem");
}

Outcome failure(const Error& e) {
  json w = json::object();
  if (e.witness().eigenvalue) w["eigenvalue"] = *e.witness().eigenvalue;
  if (e.witness().index) w["index"] = *e.witness().index;
  if (e.witness().dimensions) w["dimensions"] = {e.witness().dimensions->first, e.witness().dimensions->second};
  return {exit_code(e.code()), {{"error", std::string(to_string(e.code()))}, {"message", e.what()}, {"witness", w}}};
}

// Attaches the unboundedness ray when the failure is an unbounded input.
Outcome failure_with_certificate(const Error& e, const PackingProblem& p) {
  Outcome out = failure(e);
  if (e.code() == ErrorCode::UnboundedInput) {
    const BoundednessCertificate cert = check_bounded(p);
    if (cert.ray) out.report["certificate"] = {{"ray", vec(*cert.ray)}, {"ray_gain", cert.ray_gain}};
  }
  return out;
}

template <class F>
Outcome guarded(F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    return failure(e);
  } catch (const std::exception& e) {
    return {kNumerical, {{"error", "InternalError"}, {"message", e.what()}, {"witness", json::object()}}};
  }
}

json solution_json(const Solution& s) { return json::parse(serialize(s)); }

Outcome solve_packing(const PackingProblem& p, const Config& cfg) {
  Solution s;
  try {
    s = solve_packing_lowrank(p, cfg.opts);
  } catch (const Error& e) {
    return failure_with_certificate(e, p);
  }
  Outcome out{kOk, solution_json(s)};
  out.report["rank_bound"] = rank_tol(p.C);
  out.report["flags"] = json::array();
  if (!s.certified) out.report["flags"].push_back("NonCertified");
  if (cfg.oracle) {
    const Solution o = solve_sdp(p, cfg.opts);
    const double diff = std::abs(s.objective - o.objective);
    out.report["oracle"] = {{"objective", o.objective},
                            {"status", std::string(to_string(o.status))},
                            {"diff", diff},
                            {"relative_diff", diff / std::max(1.0, std::abs(o.objective))}};
  }
  return out;
}

Outcome solve_combined(const CombinedProblem& p, const Config& cfg) {
  CombinedSolution s;
  switch (cfg.opts.route) {
    case Route::Socp: s = solve_combined_socp(p, cfg.opts); break;
    case Route::BurerMonteiro:
      throw Error(ErrorCode::InvalidInput, "route bm applies to packing problems only");
    default: s = solve_combined_eta(p, cfg.opts); break;
  }
  Outcome out{kOk, json::parse(serialize(s))};
  const CombinedDual d = solve_combined_dual(p, cfg.opts);
  out.report["dual"] = {{"status", std::string(to_string(d.status))}, {"value", d.value}, {"mu", vec(d.mu)}, {"tol", d.tol}};
  return out;
}

const char* criterion_label(Criterion c) {
  switch (c) {
    case Criterion::COptimal: return "variance";
    case Criterion::AOptimal: return "trace";
    case Criterion::EOptimal: return "max_eigenvalue";
  }
  return "value";
}

}  // namespace

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnboundedInput:
    case ErrorCode::RangeInclusionFails:
    case ErrorCode::InfeasibleDual:
      return kUnbounded;
    case ErrorCode::InfeasibleInput:
    case ErrorCode::InfeasiblePrimal:
    case ErrorCode::InfeasibleDesign:
      return kInfeasible;
    case ErrorCode::MaxIterations:
    case ErrorCode::NumericalFailure:
    case ErrorCode::PathDiverged:
    case ErrorCode::PathNotMonotone:
    case ErrorCode::ZeroDual:
      return kNumerical;
    default:
      return kInput;
  }
}

Outcome analyze(const std::string& path, const Config&) {
  return guarded([&] {
    const PackingProblem p = as_packing(load(path), "analyze");
    json r;
    r["kind"] = "analysis";
    const FeasibilityResult feas = check_feasible(p);
    r["feasible"] = feas.feasible;
    if (!feas.feasible) {
      r["index"] = *feas.index;
      return Outcome{kOk, r};
    }
    const BoundednessCertificate cert = check_bounded(p);
    r["bounded"] = cert.bounded;
    r["range_residual"] = cert.range_residual;
    if (cert.bounded) {
      r["lambda"] = cert.lambda;
    } else {
      r["ray"] = vec(*cert.ray);
      r["ray_gain"] = cert.ray_gain;
    }
    r["rank_C"] = rank_tol(p.C);
    r["rank_sum_M"] = rank_tol(p.constraint_sum());
    r["barvinok_pataki"] = barvinok_pataki(p.size());
    const GapBound g = nrt_bound(p);
    r["gap_bound"] = {{"l", g.l}, {"mu_bar", g.mu_bar}, {"degenerate", g.degenerate}};
    if (!g.degenerate) r["gap_bound"]["factor"] = g.factor;
    return Outcome{kOk, r};
  });
}

Outcome reduce(const std::string& path, const Config&) {
  return guarded([&] {
    const PackingProblem p = as_packing(load(path), "reduce");
    try {
      const auto [red, lift] = project_packing(p);
      json r;
      r["kind"] = "reduction";
      r["reduced"] = red.inner ? json::parse(serialize(*red.inner)) : json(nullptr);
      r["UV"] = mat(lift.UV);
      r["original_dim"] = red.original_dim;
      r["reduced_dim"] = lift.reduced();
      r["kept"] = one_based(red.kept);
      r["zero_rhs"] = one_based(red.zero_rhs);
      r["vacuous"] = one_based(red.vacuous);
      r["primal_eps"] = red.primal_eps;
      r["primal_margin"] = red.primal_margin;
      r["primal_strict"] = red.primal_strict;
      r["dual_lambda"] = red.dual_lambda;
      r["dual_margin"] = red.dual_margin;
      r["dual_strict"] = red.dual_strict;
      return Outcome{kOk, r};
    } catch (const Error& e) {
      return failure_with_certificate(e, p);
    }
  });
}

Outcome solve(const std::string& path, const Config& cfg) {
  return guarded([&] {
    const Problem prob = load(path);
    if (const auto* c = std::get_if<CombinedProblem>(&prob)) return solve_combined(*c, cfg);
    return solve_packing(as_packing(prob, "solve"), cfg);
  });
}

Outcome design(const std::string& path, const Config& cfg) {
  return guarded([&] {
    const Problem prob = load(path);
    const auto* d = std::get_if<DesignProblem>(&prob);
    if (!d) throw Error(ErrorCode::InvalidInput, "design expects a design problem");
    json r;
    r["kind"] = "design_report";
    r["criterion"] = std::string(to_string(d->criterion));
    if (d->resource) {
      const ResourcePair pair = build_resource_constrained(*d);
      const ResourceSolution s = solve_resource_design(pair, *d, cfg.opts);
      r["route"] = "resource-socp";
      r["weights"] = vec(s.weights);
      r["variance"] = s.variance;
      r["primal_value"] = s.primal.report.primal_value;
      r["dual_value"] = s.dual.report.primal_value;
      r["t"] = s.dual.x(pair.t_index());
      r["resource_violation"] = s.resource_violation;
      r["resource_feasible"] = s.resource_violation <= 1e-8 * (1.0 + d->resource->d.cwiseAbs().maxCoeff());
      return Outcome{kOk, r};
    }
    const PackingProblem f = formulate(*d);
    Solution s;
    try {
      s = solve_packing_lowrank(f, cfg.opts);
    } catch (const Error& e) {
      return failure_with_certificate(e, f);
    }
    r["formulation"] = json::parse(serialize(f));
    r["route"] = s.route;
    r["status"] = std::string(to_string(s.status));
    r[criterion_label(d->criterion)] = s.objective;
    r["criterion_value"] = s.objective;
    r["rank"] = s.numerical_rank;
    r["weights"] = vec(recover_design(s.mu, f.rhs(), RecoveryMode::Simplex));
    r["mu"] = vec(s.mu);
    r["kkt"] = kkt_json(s.kkt);
    r["certified"] = s.certified;
    return Outcome{kOk, r};
  });
}

Outcome verify(const std::string& problem_path, const std::string& solution_path, const Config& cfg) {
  return guarded([&] {
    const PackingProblem p = as_packing(load(problem_path), "verify");
    const Solution s = parse_solution(read_file(solution_path));
    const double tol = cfg.tol_given ? cfg.opts.tol : 1e-6;
    const KktResiduals k = kkt_check(p, s.X, s.mu, tol);
    json r;
    r["kind"] = "verification";
    r["tol"] = tol;
    r["residuals"] = kkt_json(k);
    r["pass"] = k.pass;
    json failed = json::array();
    const double lim = tol * k.scale;
    if (k.primal > lim) failed.push_back("primal");
    if (k.dual > lim) failed.push_back("dual");
    if (k.complementarity > lim) failed.push_back("complementarity");
    r["failed"] = failed;
    return Outcome{kOk, r};
  });
}

Outcome gap_bound(const std::string& path, const Config& cfg) {
  return guarded([&] {
    const PackingProblem p = as_packing(load(path), "gap-bound");
    const GapBound g = nrt_bound(p);
    json r;
    r["kind"] = "gap_bound";
    r["l"] = g.l;
    r["mu_bar"] = g.mu_bar;
    r["degenerate"] = g.degenerate;
    if (!g.degenerate) r["factor"] = g.factor;
    r["barvinok_pataki"] = barvinok_pataki(p.size());
    if (cfg.with_value) {
      Solution s;
      try {
        s = solve_packing_lowrank(p, cfg.opts);
      } catch (const Error& e) {
        return failure_with_certificate(e, p);
      }
      r["value"] = s.objective;
      if (!g.degenerate) r["rank_one_lower_bound"] = s.objective / g.factor;
    }
    return Outcome{kOk, r};
  });
}

namespace {

std::string fmt9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string scalar_text(const json& v) {
  if (v.is_number_float()) return fmt9(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

bool flat_array(const json& v) {
  return v.is_array() && std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_primitive(); });
}

void flatten(const json& v, const std::string& key, std::ostringstream& out) {
  if (v.is_object()) {
    for (auto it = v.begin(); it != v.end(); ++it) flatten(it.value(), key.empty() ? it.key() : key + "." + it.key(), out);
  } else if (flat_array(v)) {
    out << key << ":";
    for (const auto& e : v) out << " " << scalar_text(e);
    out << "\n";
  } else if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) flatten(v[i], key + "[" + std::to_string(i) + "]", out);
  } else {
    out << key << ": " << scalar_text(v) << "\n";
  }
}

}  // namespace

std::string render(const json& report, Format format) {
  if (format == Format::Json) return report.dump(2) + "\n";
  std::ostringstream out;
  flatten(report, "", out);
  return out.str();
}

}  // namespace sdpack::cli
