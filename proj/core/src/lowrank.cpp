#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "programs.hpp"
#include "sdpack/analysis.hpp"
#include "sdpack/error.hpp"
#include "sdpack/reduce.hpp"
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

SymMatrix weighted_sum(const PackingProblem& p, const VectorXd& mu) {
  SymMatrix S = SymMatrix::zero(p.dim());
  for (long i = 0; i < p.size(); ++i) S += p.constraints[static_cast<std::size_t>(i)].M * mu(i);
  return S;
}

PackingProblem restrict_to(const PackingProblem& p, const MatrixXd& Q) {
  PackingProblem out{p.C.congruence(Q), {}};
  for (const auto& c : p.constraints) {
    std::optional<MatrixXd> A;
    if (c.A) A = MatrixXd(*c.A * Q);
    out.constraints.push_back({c.M.congruence(Q), c.b, std::move(A)});
  }
  return out;
}

// Shrinks X until every constraint with b_i > 0 holds.
SymMatrix scale_feasible(const PackingProblem& p, const SymMatrix& X) {
  const double thr = zero_rhs_threshold(p.rhs());
  double factor = 1.0;
  for (const auto& c : p.constraints) {
    const double used = c.M.inner(X);
    if (c.b > thr && used > c.b) factor = std::min(factor, c.b / used);
  }
  return factor < 1.0 ? X * factor : X;
}

double kkt_score(const KktResiduals& k) { return std::max({k.primal, k.dual, k.complementarity}); }

struct InnerSolve {
  SymMatrix Z = SymMatrix::zero(1);
  VectorXd mu;
  std::vector<double> path;
  int iterations = 0;
  std::string route;
};

InnerSolve eps_path(const PackingProblem& q, const SolveOptions& opts) {
  double shift_scale = 0.0;
  for (const auto& c : q.constraints) shift_scale = std::max(shift_scale, eigh(c.M).values(0));
  const int r = rank_tol(q.C);
  const long l = q.size();

  InnerSolve out;
  out.route = "eps-path";
  conic::ConeResult last;
  double last_eps = 0.0;
  for (std::size_t k = 0; k < opts.eps_schedule.size(); ++k) {
    const double eps = opts.eps_schedule[k];
    const conic::ConeResult res = solve_detail::solve_tight(programs::packing(q, eps * shift_scale), opts);
    out.iterations += res.iterations;
    if (res.status != conic::ConeStatus::Optimal) throw_status(res.status, "perturbed packing solve");
    const double v = -res.primal_objective;
    if (!out.path.empty()) {
      const double prev = out.path.back();
      if (v < prev - 1e-9 * std::max(1.0, std::abs(v))) {
        throw Error(ErrorCode::PathDiverged,
                    "perturbed value decreased from " + std::to_string(prev) + " to " + std::to_string(v),
                    Witness{.index = static_cast<int>(k) + 1});
      }
    }
    out.path.push_back(v);
    last = res;
    last_eps = eps;
  }

  const SymMatrix Xe(smat(last.x, q.dim()));
  const VectorXd mu_e = last.z.head(l).cwiseMax(0.0);

  // Candidates for X: the restricted re-solve on the leading eigenvectors of
  // X^eps, and X^eps itself truncated to the same subspace.
  const MatrixXd Qv = solve_detail::leading_vectors(Xe, opts.rank_threshold, r);
  std::vector<SymMatrix> xs;
  if (Qv.cols() > 0) {
    const SymMatrix trunc(Qv * (Qv.transpose() * Xe.mat() * Qv) * Qv.transpose());
    xs.push_back(scale_feasible(q, trunc));
    const PackingProblem sub = restrict_to(q, Qv);
    try {
      const Solution s = solve_sdp(sub, opts);
      if (s.status == SolveStatus::Optimal) {
        xs.push_back(scale_feasible(q, SymMatrix(Qv * s.X.mat() * Qv.transpose())));
        out.iterations += s.iterations;
      }
    } catch (const Error&) {
      // keep the truncated candidate
    }
  } else {
    xs.push_back(SymMatrix::zero(q.dim()));
  }
  out.Z = xs.front();
  for (const auto& X : xs) {
    if (q.C.inner(X) > q.C.inner(out.Z)) out.Z = X;
  }

  std::vector<VectorXd> mus = {mu_e};
  const double m = min_eig(weighted_sum(q, mu_e));
  if (m > 0.0) {
    const double delta = last_eps * shift_scale * mu_e.sum() / m;
    mus.push_back(mu_e * (1.0 + delta));
  }
  const double tol = solve_detail::kkt_tol(opts);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& mu : mus) {
    const double sc = kkt_score(kkt_check(q, out.Z, mu, tol));
    if (sc < best) {
      best = sc;
      out.mu = mu;
    }
  }
  out.mu = solve_detail::refine_dual(q, out.Z, out.mu, opts.rank_threshold);

  // The path value at the last eps still carries an O(eps) error; a few
  // Newton steps on the factorized KKT system remove it.
  double best_score = kkt_score(kkt_check(q, out.Z, out.mu, tol));
  std::vector<solve_detail::KktPoint> starts = {{out.Z, out.mu}};
  if (Qv.cols() > 0) starts.push_back({xs.front(), mu_e});
  for (const auto& st : starts) {
    const solve_detail::KktPoint pt = solve_detail::newton_polish(q, st.X, st.mu, opts.rank_threshold);
    if (rank_tol(pt.X, opts.rank_threshold) > r) continue;
    const double sc = kkt_score(kkt_check(q, pt.X, pt.mu, tol));
    if (sc < best_score) {
      best_score = sc;
      out.Z = pt.X;
      out.mu = pt.mu;
    }
  }
  return out;
}

}  // namespace

namespace solve_detail {

VectorXd complete_mu(const PackingProblem& p, const SymMatrix& X, VectorXd mu, const std::vector<int>& zero_rhs,
                     double tol) {
  if (zero_rhs.empty()) return mu;
  auto with = [&](double t) {
    VectorXd m = mu;
    for (int i : zero_rhs) m(i) = t;
    return m;
  };
  double best_t = 0.0;
  double best = kkt_score(kkt_check(p, X, with(0.0), tol));
  for (int e = -32; e <= 48; ++e) {
    const double t = std::pow(10.0, 0.25 * e);
    const double sc = kkt_score(kkt_check(p, X, with(t), tol));
    if (sc < best) {
      best = sc;
      best_t = t;
    }
  }
  return with(best_t);
}

}  // namespace solve_detail

Solution solve_rank1_socp(const PackingProblem& p, const SolveOptions& opts) {
  opts.validate();
  p.validate();
  const FeasibilityResult feas = check_feasible(p);
  if (!feas.feasible) throw Error(ErrorCode::InfeasibleInput, "some b_i is negative", Witness{.index = feas.index});
  if (!check_bounded(p).bounded) {
    throw Error(ErrorCode::UnboundedInput, "range of C is not contained in the range of sum M_i");
  }
  const double thr = zero_rhs_threshold(p.rhs());
  for (long i = 0; i < p.size(); ++i) {
    if (p.constraints[static_cast<std::size_t>(i)].b <= thr) {
      throw Error(ErrorCode::InvalidInput, "the cone route needs every b_i > 0; reduce the problem first",
                  Witness{.index = static_cast<int>(i) + 1});
    }
  }

  const SocpProblem s = to_socp_rank1(p);
  const SocpResult r = solve_socp(s, opts);
  if (r.status != SocpStatus::Optimal) {
    const ErrorCode code = r.status == SocpStatus::MaxIterations ? ErrorCode::MaxIterations
                                                                 : ErrorCode::NumericalFailure;
    throw Error(code, std::string("rank-one cone solve ended with status ") + std::string(to_string(r.status)));
  }
  const VectorXd& x = r.x;
  const double v = s.objective.dot(x);

  Solution sol;
  sol.route = "socp";
  sol.X = SymMatrix::outer(x);
  sol.mu = VectorXd::Zero(p.size());
  // mu_i = v z0_i / sqrt(b_i) gives sum mu M >= C by Cauchy-Schwarz and
  // mu'b = v sum sqrt(b_i) z0_i = v^2.
  for (long i = 0; i < p.size(); ++i) {
    const double z0 = std::max(0.0, r.cone_duals[static_cast<std::size_t>(i)](0));
    sol.mu(i) = v * z0 / std::sqrt(p.constraints[static_cast<std::size_t>(i)].b);
  }
  sol.mu = solve_detail::refine_dual(p, sol.X, sol.mu, opts.rank_threshold);
  {
    const solve_detail::KktPoint pt = solve_detail::newton_polish(p, sol.X, sol.mu, opts.rank_threshold);
    sol.X = pt.X;
    sol.mu = pt.mu;
  }
  sol.objective = p.C.inner(sol.X);
  sol.dual_objective = sol.mu.dot(p.rhs());
  sol.numerical_rank = rank_tol(sol.X, opts.rank_threshold);
  sol.iterations = r.report.iterations;
  sol.kkt = kkt_check(p, sol.X, sol.mu, solve_detail::kkt_tol(opts));
  sol.certified = sol.kkt.pass;
  return sol;
}

Solution solve_packing_lowrank(const PackingProblem& p, const SolveOptions& opts) {
  opts.validate();
  p.validate();
  const auto [red, lift] = project_packing(p);

  Solution sol;
  sol.mu = VectorXd::Zero(p.size());
  SymMatrix X = SymMatrix::zero(p.dim());

  if (red.inner && rank_tol(red.inner->C) > 0) {
    const PackingProblem& q = *red.inner;
    const int r = rank_tol(q.C);
    Route route = opts.route;
    if (route == Route::Auto) route = r == 1 ? Route::Socp : Route::EpsPath;
    if (route == Route::Socp && r != 1) {
      throw Error(ErrorCode::RankNotOne, "cone route needs rank C' = 1, got " + std::to_string(r));
    }

    InnerSolve in;
    if (route == Route::Socp) {
      const Solution s = solve_rank1_socp(q, opts);
      in.Z = s.X;
      in.mu = s.mu;
      in.iterations = s.iterations;
      in.route = "socp";
    } else if (route == Route::BurerMonteiro) {
      const Solution s = solve_burer_monteiro(q, opts);
      in.Z = s.X;
      in.mu = s.mu;
      in.iterations = s.iterations;
      in.route = "bm";
    } else {
      in = eps_path(q, opts);
    }
    if (!red.zero_rhs.empty()) sol.reduced_kkt = kkt_check(q, in.Z, in.mu, solve_detail::kkt_tol(opts));
    X = scale_feasible(p, lift_solution(in.Z, lift));
    for (std::size_t j = 0; j < red.kept.size(); ++j) sol.mu(red.kept[j]) = in.mu(static_cast<long>(j));
    sol.route = in.route;
    sol.path_values = in.path;
    sol.iterations = in.iterations;
    if (in.path.size() >= 2) sol.path_estimate = std::abs(in.path.back() - in.path[in.path.size() - 2]);
  } else {
    sol.route = "trivial";
  }

  const double tol = solve_detail::kkt_tol(opts);
  sol.mu = solve_detail::complete_mu(p, X, sol.mu, red.zero_rhs, tol);
  if (X.frobenius() > 0.0) sol.mu = solve_detail::refine_dual(p, X, sol.mu, opts.rank_threshold);
  sol.X = X;
  sol.objective = p.C.inner(X);
  sol.dual_objective = sol.mu.dot(p.rhs());
  sol.numerical_rank = rank_tol(X, opts.rank_threshold);
  sol.status = SolveStatus::Optimal;
  sol.kkt = kkt_check(p, X, sol.mu, tol);
  // With b_i = 0 rows the full dual need not be attained, so the certificate
  // lives on the face: the reduction is exact and the inner problem has one.
  sol.certified = sol.kkt.pass || (sol.reduced_kkt && sol.reduced_kkt->pass);
  return sol;
}

}  // namespace sdpack
