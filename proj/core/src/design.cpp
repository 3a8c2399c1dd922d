#include <cmath>

#include "sdpack/analysis.hpp"
#include "sdpack/conic.hpp"
#include "sdpack/error.hpp"
#include "sdpack/reduce.hpp"

namespace sdpack {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

void require_criterion(const DesignProblem& d, Criterion want) {
  if (d.criterion != want) {
    throw Error(ErrorCode::WrongCriterion, "design criterion is \"" + std::string(to_string(d.criterion)) +
                                               "\", expected \"" + std::string(to_string(want)) + "\"");
  }
}

MatrixXd block_repeat(const MatrixXd& m, long r) {
  MatrixXd out = MatrixXd::Zero(m.rows() * r, m.cols() * r);
  for (long k = 0; k < r; ++k) out.block(k * m.rows(), k * m.cols(), m.rows(), m.cols()) = m;
  return out;
}

PackingProblem unit_rhs_problem(const DesignProblem& d, SymMatrix C) {
  PackingProblem p{std::move(C), {}};
  for (long i = 0; i < d.size(); ++i) {
    std::optional<MatrixXd> A;
    if (d.A) A = (*d.A)[static_cast<std::size_t>(i)];
    p.constraints.push_back({d.M[static_cast<std::size_t>(i)], 1.0, std::move(A)});
  }
  return p;
}

}  // namespace

std::vector<MatrixXd> design_factors(const DesignProblem& d) {
  if (d.A) return *d.A;
  std::vector<MatrixXd> out;
  for (const auto& m : d.M) out.push_back(psd_factor(m));
  return out;
}

PackingProblem build_c_optimal(const DesignProblem& d) {
  require_criterion(d, Criterion::COptimal);
  return unit_rhs_problem(d, SymMatrix::outer(d.K.col(0)));
}

PackingProblem build_a_optimal(const DesignProblem& d) {
  require_criterion(d, Criterion::AOptimal);
  const long r = d.functionals();
  const VectorXd stacked = d.K.reshaped();
  PackingProblem p{SymMatrix::outer(stacked), {}};
  for (long i = 0; i < d.size(); ++i) {
    std::optional<MatrixXd> A;
    if (d.A) A = block_repeat((*d.A)[static_cast<std::size_t>(i)], r);
    p.constraints.push_back({SymMatrix(block_repeat(d.M[static_cast<std::size_t>(i)].mat(), r)), 1.0, std::move(A)});
  }
  return p;
}

PackingProblem build_e_optimal(const DesignProblem& d) {
  require_criterion(d, Criterion::EOptimal);
  return unit_rhs_problem(d, SymMatrix(d.K * d.K.transpose()));
}

ResourcePair build_resource_constrained(const DesignProblem& d) {
  require_criterion(d, Criterion::COptimal);
  if (!d.resource) throw Error(ErrorCode::ValidationError, "design has no resource block");
  const MatrixXd& P = d.resource->P;
  const VectorXd& dv = d.resource->d;
  const long n = d.dim();
  const long l = d.size();
  const long q = P.rows();
  const VectorXd c = d.K.col(0);

  // Find w with P w <= d maximizing min_i w_i (capped at 1). A max-min
  // below 1e-6 is interior-point noise around an optimum of zero.
  VectorXd w_hat;
  {
    conic::ConeProgram lp;
    lp.c = VectorXd::Zero(l + 1);
    lp.c(l) = -1.0;
    lp.dims.nonneg = q + 2 * l + 1;
    lp.G = MatrixXd::Zero(lp.dims.nonneg, l + 1);
    lp.h = VectorXd::Zero(lp.dims.nonneg);
    lp.G.topLeftCorner(q, l) = P;
    lp.h.head(q) = dv;
    for (long i = 0; i < l; ++i) {
      lp.G(q + i, i) = -1.0;  // s - w_i <= 0
      lp.G(q + i, l) = 1.0;
      lp.G(q + l + i, i) = -1.0;  // w_i >= 0
    }
    lp.G(q + 2 * l, l) = 1.0;  // s <= 1
    lp.h(q + 2 * l) = 1.0;
    lp.A = MatrixXd::Zero(0, l + 1);
    lp.b = VectorXd::Zero(0);
    const conic::ConeResult r = conic::solve(lp);
    if (r.status != conic::ConeStatus::Optimal || r.x(l) <= 1e-6) {
      throw Error(ErrorCode::InfeasibleDesign, "no allocation w > 0 satisfies P w <= d");
    }
    w_hat = r.x.head(l).cwiseMax(0.0);
  }
  {
    SymMatrix S = SymMatrix::zero(n);
    for (long i = 0; i < l; ++i) S += d.M[static_cast<std::size_t>(i)] * w_hat(i);
    const OrthonormalBasis U = range_basis(S);
    const VectorXd resid = c - U.columns * (U.columns.transpose() * c);
    if (resid.norm() > kRangeTol * std::max(1.0, c.norm())) {
      throw Error(ErrorCode::InfeasibleDesign, "c is not in the range of the information matrix");
    }
  }

  const std::vector<MatrixXd> A = design_factors(d);
  ResourcePair out;
  out.n = n;
  out.q = q;
  out.l = l;
  out.positive_design = w_hat;

  // Primal: max c'x, |(2 A_i x; p_i' lambda - 1)| <= p_i' lambda + 1,
  // d' lambda <= 1, lambda >= 0.
  {
    VectorXd obj = VectorXd::Zero(n + q);
    obj.head(n) = c;
    SocpProblem s = make_socp(obj);
    for (long i = 0; i < l; ++i) {
      const MatrixXd& Ai = A[static_cast<std::size_t>(i)];
      const long k = Ai.rows();
      SocCone cone;
      cone.F = MatrixXd::Zero(k + 1, n + q);
      cone.F.topLeftCorner(k, n) = 2.0 * Ai;
      cone.F.block(k, n, 1, q) = P.col(i).transpose();
      cone.g = VectorXd::Zero(k + 1);
      cone.g(k) = -1.0;
      cone.f = VectorXd::Zero(n + q);
      cone.f.tail(q) = P.col(i);
      cone.d = 1.0;
      s.cones.push_back(std::move(cone));
    }
    s.A_ineq = MatrixXd::Zero(1 + q, n + q);
    s.b_ineq = VectorXd::Zero(1 + q);
    s.A_ineq.block(0, n, 1, q) = dv.transpose();
    s.b_ineq(0) = 1.0;
    s.A_ineq.bottomRightCorner(q, q) = -MatrixXd::Identity(q, q);
    out.primal = std::move(s);
  }

  // Dual: min sum alpha + t, sum A_i' z_i = c, P mu <= t d,
  // |(z_i; alpha_i - mu_i)| <= alpha_i + mu_i, mu, t, alpha >= 0.
  {
    long nv = 2 * l + 1;
    for (long i = 0; i < l; ++i) {
      out.z_offset.push_back(nv);
      nv += A[static_cast<std::size_t>(i)].rows();
    }
    VectorXd obj = VectorXd::Zero(nv);
    obj(out.t_index()) = 1.0;
    for (long i = 0; i < l; ++i) obj(out.alpha_index(i)) = 1.0;
    SocpProblem s = make_socp(obj, false);
    s.A_eq = MatrixXd::Zero(n, nv);
    s.b_eq = c;
    for (long i = 0; i < l; ++i) {
      const MatrixXd& Ai = A[static_cast<std::size_t>(i)];
      s.A_eq.block(0, out.z_offset[static_cast<std::size_t>(i)], n, Ai.rows()) = Ai.transpose();
    }
    s.A_ineq = MatrixXd::Zero(q + 2 * l + 1, nv);
    s.b_ineq = VectorXd::Zero(q + 2 * l + 1);
    s.A_ineq.topLeftCorner(q, l) = P;
    s.A_ineq.block(0, out.t_index(), q, 1) = -dv;
    for (long i = 0; i < l; ++i) {
      s.A_ineq(q + i, out.mu_index(i)) = -1.0;
      s.A_ineq(q + l + i, out.alpha_index(i)) = -1.0;
    }
    s.A_ineq(q + 2 * l, out.t_index()) = -1.0;
    for (long i = 0; i < l; ++i) {
      const long k = A[static_cast<std::size_t>(i)].rows();
      SocCone cone;
      cone.F = MatrixXd::Zero(k + 1, nv);
      cone.F.block(0, out.z_offset[static_cast<std::size_t>(i)], k, k) = MatrixXd::Identity(k, k);
      cone.F(k, out.alpha_index(i)) = 1.0;
      cone.F(k, out.mu_index(i)) = -1.0;
      cone.g = VectorXd::Zero(k + 1);
      cone.f = VectorXd::Zero(nv);
      cone.f(out.alpha_index(i)) = 1.0;
      cone.f(out.mu_index(i)) = 1.0;
      cone.d = 0.0;
      s.cones.push_back(std::move(cone));
    }
    out.dual = std::move(s);
  }
  return out;
}

}  // namespace sdpack
