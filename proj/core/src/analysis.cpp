#include "sdpack/analysis.hpp"

#include <cmath>

#include "sdpack/error.hpp"

namespace sdpack {

namespace {

struct RangeTest {
  double worst = 0.0;
  bool included = true;
};

// Columns c_k = sqrt(lambda_k) q_k over the positive eigenpairs of C.
Eigen::MatrixXd factor_columns(const SymMatrix& C) {
  return psd_factor(C).transpose();
}

RangeTest range_test(const Eigen::MatrixXd& cols, const OrthonormalBasis& range) {
  RangeTest out;
  for (long k = 0; k < cols.cols(); ++k) {
    const Eigen::VectorXd ck = cols.col(k);
    const Eigen::VectorXd resid = ck - range.columns * (range.columns.transpose() * ck);
    const double rel = resid.norm() / ck.norm();
    out.worst = std::max(out.worst, rel);
    if (rel > kRangeTol) out.included = false;
  }
  return out;
}

}  // namespace

FeasibilityResult check_feasible(const PackingProblem& p) {
  FeasibilityResult out;
  double worst = 0.0;
  for (long i = 0; i < p.size(); ++i) {
    const double b = p.constraints[static_cast<std::size_t>(i)].b;
    if (b < worst) {
      worst = b;
      out.feasible = false;
      out.index = static_cast<int>(i) + 1;
    }
  }
  return out;
}

BoundednessCertificate check_bounded(const PackingProblem& p) {
  const SymMatrix S = p.constraint_sum();
  const OrthonormalBasis range = range_basis(S);
  const RangeTest rt = range_test(factor_columns(p.C), range);

  BoundednessCertificate cert;
  cert.range_residual = rt.worst;
  if (rt.included) {
    cert.bounded = true;
    cert.lambda = dual_scalar_bound(p);
    return cert;
  }

  // Kernel direction of sum M_i with the largest gain h'Ch.
  cert.bounded = false;
  const OrthonormalBasis ker = null_basis(S);
  const EigenDecomp ed = eigh(p.C.congruence(ker.columns));
  Eigen::VectorXd h = ker.columns * ed.vectors.col(0);
  h.normalize();
  for (long i = 0; i < h.size(); ++i) {
    if (std::abs(h(i)) > 1e-12) {
      if (h(i) < 0.0) h = -h;
      break;
    }
  }
  cert.ray_gain = h.dot(p.C.mat() * h);
  cert.ray = std::move(h);
  return cert;
}

double dual_scalar_bound(const PackingProblem& p) {
  const SymMatrix S = p.constraint_sum();
  const OrthonormalBasis range = range_basis(S);
  const RangeTest rt = range_test(factor_columns(p.C), range);
  if (!rt.included) {
    throw Error(ErrorCode::RangeInclusionFails, "range of C is not contained in the range of sum M_i");
  }
  // sum_k c_k' S^+ c_k = <S^+, C>
  return std::max(0.0, pinv(S).inner(p.C));
}

int barvinok_pataki(long l) {
  if (l < 1) throw Error(ErrorCode::InvalidInput, "l must be at least 1");
  int r = 0;
  while (static_cast<long>(r + 1) * (r + 2) / 2 <= l) ++r;
  return r;
}

GapBound nrt_bound(const PackingProblem& p) {
  GapBound g;
  g.l = p.size();
  long max_rank = 0;
  for (const auto& c : p.constraints) max_rank = std::max<long>(max_rank, rank_tol(c.M));
  g.mu_bar = std::min(g.l, max_rank);
  if (g.mu_bar == 0) {
    g.degenerate = true;
    return g;
  }
  g.factor = 2.0 * std::log(2.0 * static_cast<double>(g.l) * static_cast<double>(g.mu_bar));
  return g;
}

}  // namespace sdpack
