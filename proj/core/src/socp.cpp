#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "programs.hpp"
#include "sdpack/error.hpp"
#include "sdpack/solve.hpp"
#include "solve_common.hpp"

namespace sdpack {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string_view to_string(Route route) {
  switch (route) {
    case Route::Auto: return "auto";
    case Route::Socp: return "socp";
    case Route::EpsPath: return "eps-path";
    case Route::BurerMonteiro: return "bm";
  }
  return "auto";
}

Route parse_route(std::string_view text) {
  if (text == "auto") return Route::Auto;
  if (text == "socp") return Route::Socp;
  if (text == "eps-path") return Route::EpsPath;
  if (text == "bm") return Route::BurerMonteiro;
  throw Error(ErrorCode::InvalidInput, "unknown route \"" + std::string(text) + "\"");
}

namespace {

void check_schedule(const std::vector<double>& s, const char* name) {
  if (s.empty()) throw Error(ErrorCode::InvalidInput, std::string(name) + " is empty");
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (!(s[k] > 0.0) || !std::isfinite(s[k])) {
      throw Error(ErrorCode::InvalidInput, std::string(name) + " must be positive",
                  Witness{.index = static_cast<int>(k) + 1});
    }
    if (k > 0 && !(s[k] < s[k - 1])) {
      throw Error(ErrorCode::InvalidInput, std::string(name) + " must be strictly decreasing",
                  Witness{.index = static_cast<int>(k) + 1});
    }
  }
}

}  // namespace

void SolveOptions::validate() const {
  if (!(tol > 0.0) || !std::isfinite(tol)) throw Error(ErrorCode::InvalidInput, "tol must be positive");
  if (max_iter < 1) throw Error(ErrorCode::InvalidInput, "max_iter must be at least 1");
  if (!(rank_threshold > 0.0) || rank_threshold >= 1.0) {
    throw Error(ErrorCode::InvalidInput, "rank_threshold must lie in (0, 1)");
  }
  check_schedule(eps_schedule, "eps_schedule");
  check_schedule(eta_schedule, "eta_schedule");
}

SolveOptions default_options() {
  SolveOptions o;
  if (const char* env = std::getenv("SDPACK_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::InvalidInput, std::string("SDPACK_TOL is not a positive number: ") + env);
    }
    o.tol = v;
  }
  return o;
}

std::string_view to_string(SocpStatus status) {
  switch (status) {
    case SocpStatus::Optimal: return "Optimal";
    case SocpStatus::Unbounded: return "Unbounded";
    case SocpStatus::Infeasible: return "Infeasible";
    case SocpStatus::NearUnattained: return "NearUnattained";
    case SocpStatus::MaxIterations: return "MaxIterations";
    case SocpStatus::NumericalFailure: return "NumericalFailure";
  }
  return "NumericalFailure";
}

namespace solve_detail {

conic::ConeResult solve_tight(const conic::ConeProgram& cp, const SolveOptions& opts) {
  const double tight = path_tol(opts);
  conic::ConeResult r = conic::solve(cp, cone_options(opts, tight));
  if (r.status == conic::ConeStatus::Optimal || tight >= opts.tol) return r;
  if (r.status == conic::ConeStatus::PrimalInfeasible || r.status == conic::ConeStatus::DualInfeasible) return r;
  return conic::solve(cp, cone_options(opts));
}

MatrixXd leading_vectors(const SymMatrix& X, double threshold, long cap) {
  const EigenDecomp ed = eigh(X);
  const double top = ed.values.size() > 0 ? ed.values(0) : 0.0;
  long k = 0;
  if (top > 0.0) {
    while (k < ed.values.size() && k < cap && ed.values(k) > threshold * top) ++k;
  }
  return ed.vectors.leftCols(k);
}

}  // namespace solve_detail

SocpResult solve_socp(const SocpProblem& s, const SolveOptions& opts) {
  opts.validate();
  const conic::ConeProgram cp = programs::socp(s);
  const conic::ConeResult r = conic::solve(cp, solve_detail::cone_options(opts));
  const double sign = s.maximize ? -1.0 : 1.0;

  SocpResult out;
  out.x = r.x;
  out.eq_duals = r.y;
  const long ni = s.A_ineq.rows();
  out.ineq_duals = r.z.size() >= ni ? VectorXd(r.z.head(ni)) : VectorXd::Zero(ni);
  long off = ni;
  for (const auto& k : s.cones) {
    const long len = k.F.rows() + 1;
    out.cone_duals.push_back(r.z.size() >= off + len ? VectorXd(r.z.segment(off, len)) : VectorXd::Zero(len));
    off += len;
  }
  out.report.primal_value = sign * r.primal_objective;
  out.report.dual_value = sign * r.dual_objective;
  out.report.gap = r.gap;
  out.report.iterations = r.iterations;
  out.report.primal_residual = r.primal_residual;
  out.report.dual_residual = r.dual_residual;
  out.report.complementarity = r.s.size() == r.z.size() && r.s.size() > 0 ? std::abs(r.s.dot(r.z)) : 0.0;

  switch (r.status) {
    case conic::ConeStatus::Optimal:
      out.status = SocpStatus::Optimal;
      break;
    case conic::ConeStatus::PrimalInfeasible:
      out.status = SocpStatus::Infeasible;
      break;
    case conic::ConeStatus::DualInfeasible:
      out.status = SocpStatus::Unbounded;
      out.report.primal_value = s.maximize ? std::numeric_limits<double>::infinity()
                                           : -std::numeric_limits<double>::infinity();
      break;
    case conic::ConeStatus::MaxIterations:
    case conic::ConeStatus::NumericalFailure: {
      const double big = 1e8 * (1.0 + cp.h.norm());
      if (r.x.allFinite() && r.x.norm() > big && std::abs(r.gap) < 1e3 * opts.tol) {
        out.status = SocpStatus::NearUnattained;
      } else {
        out.status = r.status == conic::ConeStatus::MaxIterations ? SocpStatus::MaxIterations
                                                                  : SocpStatus::NumericalFailure;
      }
      break;
    }
  }
  return out;
}

VectorXd recover_design(const VectorXd& mu, const VectorXd& b, RecoveryMode mode, double t) {
  if (mu.size() == 0 || mu.maxCoeff() <= 0.0) throw Error(ErrorCode::ZeroDual, "dual vector is zero");
  if (mu.minCoeff() < 0.0) {
    throw Error(ErrorCode::InvalidInput, "dual vector has a negative entry");
  }
  if (mode == RecoveryMode::Simplex) {
    if (b.size() != mu.size()) {
      throw Error(ErrorCode::DimensionMismatch, "mu and b differ in length",
                  Witness{.dimensions = std::pair<long, long>{mu.size(), b.size()}});
    }
    const double s = mu.dot(b);
    if (!(s > 0.0)) throw Error(ErrorCode::ZeroDual, "mu'b is not positive");
    return mu / s;
  }
  if (!(t > 0.0)) throw Error(ErrorCode::ZeroDual, "scalar dual t is not positive");
  return mu / t;
}

ResourceSolution solve_resource_design(const ResourcePair& pair, const DesignProblem& d, const SolveOptions& opts) {
  if (!d.resource) throw Error(ErrorCode::ValidationError, "design has no resource block");
  ResourceSolution out;
  out.primal = solve_socp(pair.primal, opts);
  out.dual = solve_socp(pair.dual, opts);
  for (const SocpResult* r : {&out.primal, &out.dual}) {
    if (r->status == SocpStatus::Optimal) continue;
    const ErrorCode code = r->status == SocpStatus::MaxIterations ? ErrorCode::MaxIterations
                           : r->status == SocpStatus::Infeasible || r->status == SocpStatus::Unbounded
                               ? ErrorCode::InfeasibleDesign
                               : ErrorCode::NumericalFailure;
    throw Error(code, std::string("resource SOCP ended with status ") + std::string(to_string(r->status)));
  }
  const VectorXd mu = out.dual.x.head(pair.l).cwiseMax(0.0);
  out.weights = recover_design(mu, VectorXd::Ones(pair.l), RecoveryMode::ResourceScaled, out.dual.x(pair.t_index()));
  out.variance = out.primal.report.primal_value * out.primal.report.primal_value;
  const VectorXd excess = d.resource->P * out.weights - d.resource->d;
  out.resource_violation = std::max(0.0, excess.maxCoeff());
  return out;
}

}  // namespace sdpack
