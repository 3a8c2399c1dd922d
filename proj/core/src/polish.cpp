#include <algorithm>
#include <cmath>
#include <vector>

#include "sdpack/solve.hpp"
#include "solve_common.hpp"

namespace sdpack::solve_detail {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

double score(const PackingProblem& p, const SymMatrix& X, const VectorXd& mu) {
  const KktResiduals k = kkt_check(p, X, mu, 1.0);
  return std::max({k.primal, k.dual, k.complementarity}) / k.scale;
}

}  // namespace

KktPoint newton_polish(const PackingProblem& p, const SymMatrix& X, const VectorXd& mu, double rank_threshold) {
  KktPoint best{X, mu};
  const EigenDecomp ed = eigh(X);
  const double top = ed.values(0);
  if (!(top > 0.0) || mu.size() == 0) return best;
  long k = 0;
  while (k < ed.values.size() && ed.values(k) > rank_threshold * top) ++k;
  const long n = p.dim();

  MatrixXd R = ed.vectors.leftCols(k) * ed.values.head(k).cwiseSqrt().asDiagonal();
  const double mu_max = mu.maxCoeff();
  std::vector<long> act;
  for (long i = 0; i < p.size(); ++i) {
    const auto& c = p.constraints[static_cast<std::size_t>(i)];
    const double slack = c.b - c.M.inner(X);
    if ((mu_max > 0.0 && mu(i) > 1e-6 * mu_max) || slack <= 1e-9 * std::max(1.0, std::abs(c.b))) act.push_back(i);
  }
  const long na = static_cast<long>(act.size());
  VectorXd ma(na);
  for (long j = 0; j < na; ++j) ma(j) = mu(act[static_cast<std::size_t>(j)]);

  const VectorXd b = p.rhs();
  const double scale = std::max({1.0, p.C.frobenius() * std::max(1.0, X.frobenius()),
                                 b.size() > 0 ? b.cwiseAbs().maxCoeff() : 0.0});
  const long nr = n * k;
  for (int it = 0; it < 30; ++it) {
    MatrixXd S = -p.C.mat();
    for (long j = 0; j < na; ++j) S += ma(j) * p.constraints[static_cast<std::size_t>(act[static_cast<std::size_t>(j)])].M.mat();
    VectorXd F(nr + na);
    F.head(nr) = (S * R).reshaped();
    MatrixXd J = MatrixXd::Zero(nr + na, nr + na);
    for (long c = 0; c < k; ++c) J.block(c * n, c * n, n, n) = S;
    for (long j = 0; j < na; ++j) {
      const MatrixXd& M = p.constraints[static_cast<std::size_t>(act[static_cast<std::size_t>(j)])].M.mat();
      const VectorXd MR = (M * R).reshaped();
      F(nr + j) = R.reshaped().dot(MR) - b(act[static_cast<std::size_t>(j)]);
      J.block(0, nr + j, nr, 1) = MR;
      J.block(nr + j, 0, 1, nr) = 2.0 * MR.transpose();
    }
    if (!F.allFinite()) return best;
    if (F.cwiseAbs().maxCoeff() <= 1e-14 * scale) break;
    const VectorXd step = J.completeOrthogonalDecomposition().solve(-F);
    if (!step.allFinite()) return best;
    R += step.head(nr).reshaped(n, k);
    ma += step.tail(na);
  }

  VectorXd mu_new = VectorXd::Zero(p.size());
  for (long j = 0; j < na; ++j) mu_new(act[static_cast<std::size_t>(j)]) = std::max(0.0, ma(j));
  const SymMatrix X_new(R * R.transpose());
  if (score(p, X_new, mu_new) < score(p, X, mu)) best = {X_new, mu_new};
  return best;
}

}  // namespace sdpack::solve_detail
