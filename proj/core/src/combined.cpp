#include <algorithm>
#include <cmath>
#include <string>

#include "programs.hpp"
#include "sdpack/error.hpp"
#include "sdpack/reduce.hpp"
#include "sdpack/solve.hpp"
#include "solve_common.hpp"

namespace sdpack {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

struct EtaPoint {
  SymMatrix X = SymMatrix::zero(1);
  std::optional<SymMatrix> Y;
  VectorXd lambda;
  VectorXd mu;
  double gamma = 0.0;
  double cap_slack = 0.0;
  int iterations = 0;
};

[[noreturn]] void eta_failure(conic::ConeStatus status, double eta) {
  switch (status) {
    case conic::ConeStatus::PrimalInfeasible:
      throw Error(ErrorCode::InfeasiblePrimal, "trace-capped problem is infeasible at eta " + std::to_string(eta));
    case conic::ConeStatus::DualInfeasible:
      throw Error(ErrorCode::InfeasibleDual, "trace-capped problem is unbounded at eta " + std::to_string(eta));
    case conic::ConeStatus::MaxIterations:
      throw Error(ErrorCode::MaxIterations, "trace-capped solve hit the iteration limit");
    default:
      throw Error(ErrorCode::NumericalFailure, "trace-capped solve failed");
  }
}

// Solves P_eta with X = Q Z Q'. Q = I gives the plain problem.
EtaPoint solve_point(const CombinedProblem& p, const MatrixXd& Q, double eta, const SolveOptions& opts) {
  CombinedProblem sub = p;
  sub.C = p.C.congruence(Q);
  for (auto& m : sub.M) m = m.congruence(Q);
  const long k = Q.cols();
  const long nz = svec_size(k);
  const long ny = p.y_dim() > 0 ? svec_size(p.y_dim()) : 0;
  const long q = p.lambda_dim();
  const long l = p.size();

  const conic::ConeResult res = solve_detail::solve_tight(programs::combined_eta(sub, eta), opts);
  if (res.status != conic::ConeStatus::Optimal) eta_failure(res.status, eta);
  EtaPoint pt;
  pt.X = SymMatrix(Q * smat(res.x.head(nz), k) * Q.transpose());
  if (ny > 0) pt.Y = SymMatrix(smat(res.x.segment(nz, ny), p.y_dim()));
  pt.lambda = res.x.tail(q);
  pt.mu = res.z.head(l).cwiseMax(0.0);
  pt.gamma = -res.primal_objective;
  pt.cap_slack = res.s(l);
  pt.iterations = res.iterations;
  return pt;
}

}  // namespace

CombinedSolution solve_combined_eta(const CombinedProblem& p, const SolveOptions& opts) {
  opts.validate();
  p.validate();
  const CombinedFeasibility feas = check_combined_feasibility(p);
  if (!feas.primal) throw Error(ErrorCode::InfeasiblePrimal, "the combined problem has no feasible point");
  if (!feas.dual) throw Error(ErrorCode::InfeasibleDual, "the dual of the combined problem is infeasible");

  const long n = p.dim();
  const int r = rank_tol(p.C);
  const MatrixXd eye = MatrixXd::Identity(n, n);

  CombinedSolution out;
  out.route = "eta-path";
  EtaPoint last;
  for (std::size_t k = 0; k < opts.eta_schedule.size(); ++k) {
    const double eta = opts.eta_schedule[k];
    EtaPoint pt = solve_point(p, eye, eta, opts);
    if (rank_tol(pt.X, opts.rank_threshold) > r) {
      // The IPM lands in the relative interior of the optimal face; re-solve
      // on the leading eigenvectors to get a vertex-like point.
      const MatrixXd Q = solve_detail::leading_vectors(pt.X, opts.rank_threshold, r);
      if (Q.cols() == 0) {
        pt.X = SymMatrix::zero(n);
      } else {
        try {
          EtaPoint sub = solve_point(p, Q, eta, opts);
          if (sub.gamma >= pt.gamma - 1e-9 * std::max(1.0, std::abs(pt.gamma))) pt = std::move(sub);
        } catch (const Error&) {
          // keep the unpolished point
        }
      }
    }
    if (!out.gamma.empty()) {
      const double prev = out.gamma.back();
      if (pt.gamma < prev - 1e-9 * std::max(1.0, std::abs(pt.gamma))) {
        throw Error(ErrorCode::PathNotMonotone,
                    "path value decreased from " + std::to_string(prev) + " to " + std::to_string(pt.gamma),
                    Witness{.index = static_cast<int>(k) + 1});
      }
    }
    out.eta.push_back(eta);
    out.gamma.push_back(pt.gamma);
    out.ranks.push_back(rank_tol(pt.X, opts.rank_threshold));
    last = std::move(pt);
  }

  out.X = last.X;
  out.Y = last.Y;
  out.lambda = last.lambda;
  out.mu = last.mu;
  out.objective = last.gamma;
  out.status = SolveStatus::Optimal;
  if (out.gamma.size() >= 2) {
    const double g = out.gamma.back();
    const double rise = g - out.gamma[out.gamma.size() - 2];
    if (last.cap_slack <= 1e-3 && rise > 10.0 * opts.tol * std::max(1.0, std::abs(g))) {
      out.status = SolveStatus::AsymptoticSup;
    }
  }
  return out;
}

CombinedSolution solve_combined_socp(const CombinedProblem& p, const SolveOptions& opts) {
  opts.validate();
  p.validate();
  const SocpProblem s = combined_to_socp(p);
  const SocpResult r = solve_socp(s, opts);
  const long n = p.dim();
  const long q = p.lambda_dim();

  CombinedSolution out;
  out.route = "socp";
  switch (r.status) {
    case SocpStatus::Optimal: out.status = SolveStatus::Optimal; break;
    case SocpStatus::NearUnattained: out.status = SolveStatus::NearUnattained; break;
    case SocpStatus::Unbounded:
      throw Error(ErrorCode::InfeasibleDual, "combined cone program is unbounded");
    case SocpStatus::Infeasible:
      throw Error(ErrorCode::InfeasiblePrimal, "combined cone program is infeasible");
    case SocpStatus::MaxIterations:
      throw Error(ErrorCode::MaxIterations, "combined cone solve hit the iteration limit");
    case SocpStatus::NumericalFailure:
      throw Error(ErrorCode::NumericalFailure, "combined cone solve failed");
  }
  const VectorXd x = r.x.head(n);
  const double v = s.objective.head(n).dot(x);
  out.X = SymMatrix::outer(x);
  out.lambda = r.x.tail(q);
  out.objective = p.C.inner(out.X);
  // d value / d b_i = z0_i + (last entry of z_i); chain rule through v^2.
  out.mu = VectorXd::Zero(p.size());
  for (long i = 0; i < p.size(); ++i) {
    const VectorXd& z = r.cone_duals[static_cast<std::size_t>(i)];
    out.mu(i) = std::max(0.0, 2.0 * v * (z(0) + z(z.size() - 1)));
  }
  if (p.y_dim() > 0) out.Y = SymMatrix::zero(p.y_dim());
  return out;
}

}  // namespace sdpack
