#include "sdpack/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sdpack/analysis.hpp"
#include "sdpack/conic.hpp"
#include "sdpack/error.hpp"
#include "programs.hpp"

namespace sdpack {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double zero_rhs_threshold(const VectorXd& b) {
  const double inf_norm = b.size() == 0 ? 0.0 : b.cwiseAbs().maxCoeff();
  return 1e-12 * std::max(1.0, inf_norm);
}

std::pair<ReducedProblem, LiftMap> project_packing(const PackingProblem& p) {
  const FeasibilityResult feas = check_feasible(p);
  if (!feas.feasible) {
    throw Error(ErrorCode::InfeasibleInput, "some b_i is negative", Witness{.index = feas.index});
  }
  const BoundednessCertificate bc = check_bounded(p);
  if (!bc.bounded) {
    throw Error(ErrorCode::UnboundedInput, "range of C is not contained in the range of sum M_i");
  }

  const long n = p.dim();
  const long l = p.size();
  const VectorXd b = p.rhs();
  const double thr = zero_rhs_threshold(b);

  ReducedProblem red;
  red.original_dim = n;
  red.original_size = l;

  double m_scale = 0.0;
  for (const auto& c : p.constraints) m_scale = std::max(m_scale, c.M.frobenius());
  std::vector<int> active;
  for (long i = 0; i < l; ++i) {
    const auto& c = p.constraints[static_cast<std::size_t>(i)];
    if (c.M.frobenius() <= 1e-14 * m_scale || m_scale == 0.0) {
      red.vacuous.push_back(static_cast<int>(i));
    } else {
      active.push_back(static_cast<int>(i));
      if (std::abs(c.b) <= thr) red.zero_rhs.push_back(static_cast<int>(i));
    }
  }

  SymMatrix S = SymMatrix::zero(n);
  for (int i : active) S += p.constraints[static_cast<std::size_t>(i)].M;
  const OrthonormalBasis U = range_basis(S);

  LiftMap lift{MatrixXd::Zero(n, 0)};
  auto trivial = [&] {
    red.primal_strict = true;
    red.dual_strict = true;
    for (int i : active) {
      if (std::abs(p.constraints[static_cast<std::size_t>(i)].b) > thr) red.vacuous.push_back(i);
    }
    std::sort(red.vacuous.begin(), red.vacuous.end());
    return std::make_pair(std::move(red), std::move(lift));
  };
  if (U.size() == 0) return trivial();

  SymMatrix T = SymMatrix::zero(U.size());
  for (int i : red.zero_rhs) T += p.constraints[static_cast<std::size_t>(i)].M.congruence(U.columns);
  const OrthonormalBasis V = null_basis(T);
  if (V.size() == 0) return trivial();
  lift.UV = U.columns * V.columns;

  std::vector<PackingConstraint> cons;
  for (int i : active) {
    const auto& c = p.constraints[static_cast<std::size_t>(i)];
    if (std::abs(c.b) <= thr) continue;
    SymMatrix Mr = c.M.congruence(lift.UV);
    if (Mr.frobenius() <= 1e-12 * std::max(1.0, c.M.frobenius())) {
      red.vacuous.push_back(i);
      continue;
    }
    std::optional<MatrixXd> Ar;
    if (c.A) Ar = MatrixXd(*c.A * lift.UV);
    cons.push_back({std::move(Mr), std::max(c.b, 0.0), std::move(Ar)});
    red.kept.push_back(i);
  }
  std::sort(red.vacuous.begin(), red.vacuous.end());
  if (cons.empty()) return trivial();

  PackingProblem inner{p.C.congruence(lift.UV), std::move(cons)};

  double eps = std::numeric_limits<double>::infinity();
  for (const auto& c : inner.constraints) eps = std::min(eps, 0.5 * c.b / std::max(1.0, c.M.trace()));
  double pm = std::numeric_limits<double>::infinity();
  for (const auto& c : inner.constraints) pm = std::min(pm, c.b - eps * c.M.trace());
  red.primal_eps = eps;
  red.primal_margin = pm;
  red.primal_strict = eps > 0.0 && pm > 0.0;

  const double lb = dual_scalar_bound(inner);
  red.dual_lambda = lb > 0.0 ? 2.0 * lb : 1.0;
  const SymMatrix slack = inner.constraint_sum() * red.dual_lambda - inner.C;
  const EigenDecomp ed = eigh(slack);
  red.dual_margin = ed.values(ed.values.size() - 1);
  red.dual_strict = red.dual_margin > 1e-12 * std::max(1.0, ed.values.cwiseAbs().maxCoeff());

  red.inner = std::move(inner);
  return {std::move(red), std::move(lift)};
}

SymMatrix lift_solution(const SymMatrix& Z, const LiftMap& map) {
  if (Z.dim() != map.reduced()) {
    throw Error(ErrorCode::DimensionMismatch, "Z does not match the lift map",
                Witness{.dimensions = std::pair<long, long>{map.reduced(), Z.dim()}});
  }
  return SymMatrix(map.UV * Z.mat() * map.UV.transpose());
}

void SocpProblem::validate() const {
  const long n = num_vars();
  auto bad = [](const std::string& what, long a, long b) {
    throw Error(ErrorCode::DimensionMismatch, what, Witness{.dimensions = std::pair<long, long>{a, b}});
  };
  if (n < 1) bad("SOCP needs at least one variable", 1, n);
  for (const auto& k : cones) {
    if (k.F.cols() != n) bad("cone F has wrong column count", n, k.F.cols());
    if (k.g.size() != k.F.rows()) bad("cone g has wrong length", k.F.rows(), k.g.size());
    if (k.f.size() != n) bad("cone f has wrong length", n, k.f.size());
  }
  if (A_ineq.rows() > 0 && A_ineq.cols() != n) bad("A_ineq has wrong column count", n, A_ineq.cols());
  if (A_ineq.rows() != b_ineq.size()) bad("A_ineq and b_ineq disagree", A_ineq.rows(), b_ineq.size());
  if (A_eq.rows() > 0 && A_eq.cols() != n) bad("A_eq has wrong column count", n, A_eq.cols());
  if (A_eq.rows() != b_eq.size()) bad("A_eq and b_eq disagree", A_eq.rows(), b_eq.size());
}

SocpProblem make_socp(VectorXd objective, bool maximize) {
  SocpProblem s;
  const long n = objective.size();
  s.objective = std::move(objective);
  s.maximize = maximize;
  s.A_ineq = MatrixXd::Zero(0, n);
  s.b_ineq = VectorXd::Zero(0);
  s.A_eq = MatrixXd::Zero(0, n);
  s.b_eq = VectorXd::Zero(0);
  return s;
}

VectorXd rank_one_vector(const SymMatrix& C) {
  const int r = rank_tol(C);
  if (r != 1) {
    throw Error(ErrorCode::RankNotOne, "C must have rank one, got rank " + std::to_string(r));
  }
  const EigenDecomp ed = eigh(C);
  VectorXd c = std::sqrt(ed.values(0)) * ed.vectors.col(0);
  const double cutoff = 1e-12 * c.cwiseAbs().maxCoeff();
  for (long i = 0; i < c.size(); ++i) {
    if (std::abs(c(i)) > cutoff) {
      if (c(i) < 0.0) c = -c;
      break;
    }
  }
  return c;
}

SocpProblem to_socp_rank1(const PackingProblem& p) {
  const VectorXd c = rank_one_vector(p.C);
  const double thr = zero_rhs_threshold(p.rhs());
  SocpProblem s = make_socp(c);
  for (long i = 0; i < p.size(); ++i) {
    const auto& con = p.constraints[static_cast<std::size_t>(i)];
    if (con.b < -thr) {
      throw Error(ErrorCode::InfeasibleInput, "some b_i is negative", Witness{.index = static_cast<int>(i) + 1});
    }
    const MatrixXd A = con.A ? *con.A : psd_factor(con.M);
    s.cones.push_back({A, VectorXd::Zero(A.rows()), VectorXd::Zero(p.dim()), std::sqrt(std::max(con.b, 0.0))});
  }
  return s;
}

namespace {

bool is_zero(const SymMatrix& m) { return m.mat().cwiseAbs().maxCoeff() == 0.0; }

}  // namespace

CombinedFeasibility check_combined_feasibility(const CombinedProblem& p) {
  CombinedFeasibility out;
  const long l = p.size();
  const long ydim = p.y_dim();
  const long q = p.lambda_dim();
  conic::ConeOptions opt;
  opt.max_iter = 100;

  // Primal: X = 0 is optimal for feasibility, so look for (Y, lambda) with
  // -<R_i, Y> - h_i' lambda <= b_i.
  {
    const long ny = ydim > 0 ? svec_size(ydim) : 0;
    const long nv = ny + q;
    if (nv == 0) {
      out.primal = p.b.minCoeff() >= 0.0;
    } else {
      conic::ConeProgram cp;
      cp.c = VectorXd::Zero(nv);
      cp.dims.nonneg = l;
      if (ydim > 0) cp.dims.psd = {ydim};
      cp.G = MatrixXd::Zero(l + ny, nv);
      cp.h = VectorXd::Zero(l + ny);
      if (ydim > 0) {
        cp.G.topLeftCorner(l, ny) = -programs::svec_columns(p.R, ydim).transpose();
        cp.G.bottomLeftCorner(ny, ny) = -MatrixXd::Identity(ny, ny);
      }
      if (q > 0) cp.G.block(0, ny, l, q) = -p.H.transpose();
      cp.h.head(l) = p.b;
      cp.A = MatrixXd::Zero(0, nv);
      cp.b = VectorXd::Zero(0);
      out.primal = conic::solve(cp, opt).status != conic::ConeStatus::PrimalInfeasible;
    }
  }

  out.dual = conic::solve(programs::combined_dual(p, false), opt).status != conic::ConeStatus::PrimalInfeasible;
  return out;
}

SocpProblem combined_to_socp(const CombinedProblem& p) {
  const VectorXd c = rank_one_vector(p.C);
  if (p.R0 && !is_zero(*p.R0)) throw Error(ErrorCode::NonzeroR, "R0 must be zero");
  for (std::size_t i = 0; i < p.R.size(); ++i) {
    if (!is_zero(p.R[i])) throw Error(ErrorCode::NonzeroR, "R_i must be zero", Witness{.index = static_cast<int>(i) + 1});
  }
  if (p.h0.size() > 0 && p.h0.cwiseAbs().maxCoeff() != 0.0) throw Error(ErrorCode::NonzeroH0, "h0 must be zero");

  const CombinedFeasibility feas = check_combined_feasibility(p);
  if (!feas.primal) throw Error(ErrorCode::InfeasiblePrimal, "no lambda with H' lambda + b >= 0");
  if (!feas.dual) throw Error(ErrorCode::InfeasibleDual, "the dual of the combined problem is infeasible");

  const long n = p.dim();
  const long q = p.lambda_dim();
  VectorXd obj = VectorXd::Zero(n + q);
  obj.head(n) = c;
  SocpProblem s = make_socp(obj);
  for (long i = 0; i < p.size(); ++i) {
    const MatrixXd A = psd_factor(p.M[static_cast<std::size_t>(i)]);
    const long k = A.rows();
    // |(2 A_i x; h_i' lambda + b_i - 1)| <= h_i' lambda + b_i + 1
    SocCone cone;
    cone.F = MatrixXd::Zero(k + 1, n + q);
    cone.F.topLeftCorner(k, n) = 2.0 * A;
    if (q > 0) cone.F.block(k, n, 1, q) = p.H.col(i).transpose();
    cone.g = VectorXd::Zero(k + 1);
    cone.g(k) = p.b(i) - 1.0;
    cone.f = VectorXd::Zero(n + q);
    if (q > 0) cone.f.tail(q) = p.H.col(i);
    cone.d = p.b(i) + 1.0;
    s.cones.push_back(std::move(cone));
  }
  return s;
}

}  // namespace sdpack
