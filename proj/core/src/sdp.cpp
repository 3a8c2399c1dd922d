#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "programs.hpp"
#include "sdpack/analysis.hpp"
#include "sdpack/error.hpp"
#include "sdpack/solve.hpp"
#include "solve_common.hpp"

namespace sdpack {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

double min_eig(const SymMatrix& s) {
  const EigenDecomp ed = eigh(s);
  return ed.values(ed.values.size() - 1);
}

[[noreturn]] void throw_status(conic::ConeStatus status, const std::string& what) {
  const ErrorCode code = status == conic::ConeStatus::MaxIterations ? ErrorCode::MaxIterations
                                                                    : ErrorCode::NumericalFailure;
  throw Error(code, what + " ended with status " + conic::to_string(status));
}

}  // namespace

KktResiduals kkt_check(const PackingProblem& p, const SymMatrix& X, const VectorXd& mu, double tol) {
  if (X.dim() != p.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "X does not match C",
                Witness{.dimensions = std::pair<long, long>{p.dim(), X.dim()}});
  }
  if (mu.size() != p.size()) {
    throw Error(ErrorCode::DimensionMismatch, "mu does not match the constraint count",
                Witness{.dimensions = std::pair<long, long>{p.size(), mu.size()}});
  }
  KktResiduals r;
  const VectorXd b = p.rhs();

  SymMatrix S = p.C * -1.0;
  for (long i = 0; i < p.size(); ++i) {
    const auto& c = p.constraints[static_cast<std::size_t>(i)];
    const double slack = c.b - c.M.inner(X);
    r.primal = std::max(r.primal, -slack);
    r.dual = std::max(r.dual, -mu(i));
    r.complementarity = std::max(r.complementarity, std::abs(mu(i) * slack));
    S += c.M * mu(i);
  }
  r.primal = std::max({r.primal, -min_eig(X), 0.0});
  r.dual = std::max({r.dual, -min_eig(S), 0.0});
  r.complementarity = std::max(r.complementarity, (S.mat() * X.mat()).cwiseAbs().maxCoeff());

  const double bmax = b.size() > 0 ? b.cwiseAbs().maxCoeff() : 0.0;
  r.scale = std::max({1.0, p.C.frobenius() * std::max(1.0, X.frobenius()), bmax, std::abs(mu.dot(b))});
  r.pass = r.primal <= tol * r.scale && r.dual <= tol * r.scale && r.complementarity <= tol * r.scale;
  return r;
}

namespace solve_detail {

VectorXd refine_dual(const PackingProblem& p, const SymMatrix& X, const VectorXd& mu, double rank_threshold) {
  const EigenDecomp ed = eigh(X);
  const double top = ed.values(0);
  if (!(top > 0.0)) return mu;
  long r = 0;
  while (r < ed.values.size() && ed.values(r) > rank_threshold * top) ++r;
  const MatrixXd Q = ed.vectors.leftCols(r);
  const long n = p.dim();

  std::vector<long> active;
  for (long i = 0; i < p.size(); ++i) {
    const auto& c = p.constraints[static_cast<std::size_t>(i)];
    if (c.b - c.M.inner(X) <= 1e-6 * std::max(1.0, std::abs(c.b))) active.push_back(i);
  }
  VectorXd out = VectorXd::Zero(p.size());
  if (!active.empty()) {
    MatrixXd J(n * r, static_cast<long>(active.size()));
    VectorXd mu0(static_cast<long>(active.size()));
    for (std::size_t j = 0; j < active.size(); ++j) {
      J.col(static_cast<long>(j)) = (p.constraints[static_cast<std::size_t>(active[j])].M.mat() * Q).reshaped();
      mu0(static_cast<long>(j)) = mu(active[j]);
    }
    const VectorXd target = (p.C.mat() * Q).reshaped();
    const VectorXd fixed = mu0 + J.completeOrthogonalDecomposition().solve(target - J * mu0);
    for (std::size_t j = 0; j < active.size(); ++j) out(active[j]) = std::max(0.0, fixed(static_cast<long>(j)));
  }
  if (!out.allFinite()) return mu;
  auto score = [&](const VectorXd& m) {
    const KktResiduals k = kkt_check(p, X, m, 1.0);
    return std::max({k.primal, k.dual, k.complementarity});
  };
  return score(out) < score(mu) ? out : mu;
}

}  // namespace solve_detail

namespace {

Solution solve_on_face(const PackingProblem& p, const SolveOptions& opts) {
  const auto [red, lift] = project_packing(p);
  Solution sol;
  sol.mu = VectorXd::Zero(p.size());
  SymMatrix X = SymMatrix::zero(p.dim());
  if (red.inner) {
    const Solution in = solve_sdp(*red.inner, opts);
    sol.status = in.status;
    sol.iterations = in.iterations;
    sol.reduced_kkt = in.kkt;
    X = lift_solution(in.X, lift);
    for (std::size_t j = 0; j < red.kept.size(); ++j) sol.mu(red.kept[j]) = in.mu(static_cast<long>(j));
  }
  const double tol = solve_detail::kkt_tol(opts);
  sol.mu = solve_detail::complete_mu(p, X, sol.mu, red.zero_rhs, tol);
  sol.route = "sdp-face";
  sol.X = X;
  sol.objective = p.C.inner(X);
  sol.dual_objective = sol.mu.dot(p.rhs());
  sol.numerical_rank = rank_tol(X, opts.rank_threshold);
  sol.kkt = kkt_check(p, X, sol.mu, tol);
  sol.certified = sol.kkt.pass || !sol.reduced_kkt || sol.reduced_kkt->pass;
  return sol;
}

}  // namespace

Solution solve_sdp(const PackingProblem& p, const SolveOptions& opts) {
  opts.validate();
  p.validate();
  Solution sol;
  sol.route = "sdp";
  sol.X = SymMatrix::zero(p.dim());
  sol.mu = VectorXd::Zero(p.size());

  const FeasibilityResult feas = check_feasible(p);
  if (!feas.feasible) {
    sol.status = SolveStatus::Infeasible;
    sol.certified = false;
    return sol;
  }
  const BoundednessCertificate bc = check_bounded(p);
  if (!bc.bounded) {
    sol.status = SolveStatus::Unbounded;
    sol.ray = bc.ray;
    sol.objective = std::numeric_limits<double>::infinity();
    sol.dual_objective = std::numeric_limits<double>::infinity();
    sol.certified = false;
    return sol;
  }

  // b_i = 0 rows leave no strictly feasible point and the IPM stalls; solve
  // on the face instead, where the reduction is exact.
  const VectorXd b = p.rhs();
  const double thr = zero_rhs_threshold(b);
  if ((b.array() <= thr).any()) return solve_on_face(p, opts);

  const conic::ConeProgram cp = programs::packing(p);
  const conic::ConeResult r = solve_detail::solve_tight(cp, opts);
  sol.iterations = r.iterations;
  if (r.status != conic::ConeStatus::Optimal) {
    const double big = 1e8 * (1.0 + p.rhs().norm());
    if ((r.status == conic::ConeStatus::MaxIterations || r.status == conic::ConeStatus::NumericalFailure) &&
        r.x.allFinite() && r.x.norm() > big && std::abs(r.gap) < 1e3 * opts.tol) {
      sol.status = SolveStatus::NearUnattained;
    } else {
      throw_status(r.status, "SDP solve");
    }
  }
  sol.X = SymMatrix(smat(r.x, p.dim()));
  sol.mu = solve_detail::refine_dual(p, sol.X, r.z.head(p.size()).cwiseMax(0.0), opts.rank_threshold);
  if (sol.status == SolveStatus::Optimal) {
    const solve_detail::KktPoint pt = solve_detail::newton_polish(p, sol.X, sol.mu, opts.rank_threshold);
    sol.X = pt.X;
    sol.mu = pt.mu;
  }
  sol.objective = p.C.inner(sol.X);
  sol.dual_objective = sol.mu.dot(p.rhs());
  sol.numerical_rank = rank_tol(sol.X, opts.rank_threshold);
  sol.kkt = kkt_check(p, sol.X, sol.mu, solve_detail::kkt_tol(opts));
  sol.certified = sol.kkt.pass;
  return sol;
}

CombinedDual solve_combined_dual(const CombinedProblem& p, const SolveOptions& opts) {
  opts.validate();
  p.validate();
  const conic::ConeProgram cp = programs::combined_dual(p, true);
  // The dual can lack an interior point (its feasible set may be a single
  // vector), and then the IPM tends to stall just short of opts.tol. Retry at
  // looser targets and report the one that was met.
  conic::ConeResult r;
  double used = opts.tol;
  for (int k = 0; k < 3; ++k, used *= 10.0) {
    r = conic::solve(cp, solve_detail::cone_options(opts, used));
    if (r.status != conic::ConeStatus::NumericalFailure && r.status != conic::ConeStatus::MaxIterations) break;
  }
  CombinedDual out;
  out.tol = used;
  out.mu = r.x;
  out.value = r.primal_objective;
  switch (r.status) {
    case conic::ConeStatus::Optimal: out.status = SocpStatus::Optimal; break;
    case conic::ConeStatus::PrimalInfeasible: out.status = SocpStatus::Infeasible; break;
    case conic::ConeStatus::DualInfeasible: out.status = SocpStatus::Unbounded; break;
    case conic::ConeStatus::MaxIterations: out.status = SocpStatus::MaxIterations; break;
    case conic::ConeStatus::NumericalFailure: out.status = SocpStatus::NumericalFailure; break;
  }
  return out;
}

}  // namespace sdpack
