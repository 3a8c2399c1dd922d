#include "programs.hpp"

namespace sdpack::programs {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd svec_columns(const std::vector<SymMatrix>& ms, long n) {
  MatrixXd out(svec_size(n), static_cast<long>(ms.size()));
  for (std::size_t i = 0; i < ms.size(); ++i) out.col(static_cast<long>(i)) = svec(ms[i].mat());
  return out;
}

conic::ConeProgram packing(const PackingProblem& p, double shift) {
  const long n = p.dim();
  const long l = p.size();
  const long d = svec_size(n);
  const VectorXd id = svec(MatrixXd::Identity(n, n));
  conic::ConeProgram cp;
  cp.c = -svec(p.C.mat());
  cp.G = MatrixXd::Zero(l + d, d);
  cp.h = VectorXd::Zero(l + d);
  for (long i = 0; i < l; ++i) {
    const auto& con = p.constraints[static_cast<std::size_t>(i)];
    cp.G.row(i) = (svec(con.M.mat()) + shift * id).transpose();
    cp.h(i) = con.b;
  }
  cp.G.bottomRows(d) = -MatrixXd::Identity(d, d);
  cp.A = MatrixXd::Zero(0, d);
  cp.b = VectorXd::Zero(0);
  cp.dims.nonneg = l;
  cp.dims.psd = {n};
  return cp;
}

conic::ConeProgram socp(const SocpProblem& s) {
  s.validate();
  const long n = s.num_vars();
  long rows = s.A_ineq.rows();
  for (const auto& k : s.cones) rows += k.F.rows() + 1;
  conic::ConeProgram cp;
  cp.c = s.maximize ? VectorXd(-s.objective) : s.objective;
  cp.G = MatrixXd::Zero(rows, n);
  cp.h = VectorXd::Zero(rows);
  long r = s.A_ineq.rows();
  if (r > 0) {
    cp.G.topRows(r) = s.A_ineq;
    cp.h.head(r) = s.b_ineq;
  }
  cp.dims.nonneg = r;
  for (const auto& k : s.cones) {
    // s = (d + f'x, g + F x)
    cp.G.row(r) = -k.f.transpose();
    cp.h(r) = k.d;
    cp.G.middleRows(r + 1, k.F.rows()) = -k.F;
    cp.h.segment(r + 1, k.F.rows()) = k.g;
    cp.dims.soc.push_back(k.F.rows() + 1);
    r += k.F.rows() + 1;
  }
  cp.A = s.A_eq.rows() > 0 ? s.A_eq : MatrixXd::Zero(0, n);
  cp.b = s.b_eq;
  return cp;
}

conic::ConeProgram combined_dual(const CombinedProblem& p, bool objective) {
  const long l = p.size();
  const long n = p.dim();
  const long ydim = p.y_dim();
  const long q = p.lambda_dim();
  const long nx = svec_size(n);
  const long ny = ydim > 0 ? svec_size(ydim) : 0;
  conic::ConeProgram cp;
  cp.c = objective ? p.b : VectorXd::Zero(l);
  cp.dims.nonneg = l;
  cp.dims.psd = {n};
  if (ydim > 0) cp.dims.psd.push_back(ydim);
  cp.G = MatrixXd::Zero(l + nx + ny, l);
  cp.h = VectorXd::Zero(l + nx + ny);
  cp.G.topRows(l) = -MatrixXd::Identity(l, l);
  cp.G.middleRows(l, nx) = -svec_columns(p.M, n);
  cp.h.segment(l, nx) = -svec(p.C.mat());
  if (ydim > 0) {
    cp.G.bottomRows(ny) = svec_columns(p.R, ydim);
    cp.h.tail(ny) = -svec(p.R0->mat());
  }
  cp.A = q > 0 ? MatrixXd(p.H) : MatrixXd::Zero(0, l);
  cp.b = q > 0 ? VectorXd(-p.h0) : VectorXd::Zero(0);
  return cp;
}

conic::ConeProgram combined_eta(const CombinedProblem& p, double eta) {
  const long l = p.size();
  const long n = p.dim();
  const long ydim = p.y_dim();
  const long q = p.lambda_dim();
  const long nx = svec_size(n);
  const long ny = ydim > 0 ? svec_size(ydim) : 0;
  const long nv = nx + ny + q;
  conic::ConeProgram cp;
  cp.c = VectorXd::Zero(nv);
  cp.c.head(nx) = -svec(p.C.mat());
  if (ydim > 0) cp.c.segment(nx, ny) = -svec(p.R0->mat());
  if (q > 0) cp.c.tail(q) = -p.h0;
  cp.dims.nonneg = l + 1;
  cp.dims.psd = {n};
  if (ydim > 0) cp.dims.psd.push_back(ydim);
  cp.G = MatrixXd::Zero(l + 1 + nx + ny, nv);
  cp.h = VectorXd::Zero(l + 1 + nx + ny);
  cp.G.topLeftCorner(l, nx) = svec_columns(p.M, n).transpose();
  if (ydim > 0) cp.G.block(0, nx, l, ny) = -svec_columns(p.R, ydim).transpose();
  if (q > 0) cp.G.block(0, nx + ny, l, q) = -p.H.transpose();
  cp.h.head(l) = p.b;
  cp.G.block(l, 0, 1, nx) = eta * svec(MatrixXd::Identity(n, n)).transpose();
  if (ydim > 0) cp.G.block(l, nx, 1, ny) = eta * svec(MatrixXd::Identity(ydim, ydim)).transpose();
  cp.h(l) = 1.0;
  cp.G.block(l + 1, 0, nx, nx) = -MatrixXd::Identity(nx, nx);
  if (ydim > 0) cp.G.block(l + 1 + nx, nx, ny, ny) = -MatrixXd::Identity(ny, ny);
  cp.A = MatrixXd::Zero(0, nv);
  cp.b = VectorXd::Zero(0);
  return cp;
}

}  // namespace sdpack::programs
