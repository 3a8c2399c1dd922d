#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "sdpack/analysis.hpp"
#include "sdpack/error.hpp"

using namespace sdpack;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

PackingProblem packing(const SymMatrix& C, std::vector<std::pair<SymMatrix, double>> rows) {
  PackingProblem p;
  p.C = C;
  for (auto& [M, b] : rows) p.constraints.push_back({M, b, std::nullopt});
  return p;
}

SymMatrix diag2(double a, double b) { return SymMatrix::diagonal(Eigen::Vector2d(a, b)); }

PackingProblem unattained_packing_part(const VectorXd& b) {
  VectorXd c(2);
  c << 9.0, 1.0;
  c *= std::sqrt(3.0) / 10.0;
  return packing(SymMatrix::outer(c), {{SymMatrix::zero(2), b(0)}, {diag2(1, 0), b(1)}, {diag2(0, 1), b(2)}});
}

}  // namespace

TEST(Feasibility, Examples) {
  EXPECT_TRUE(check_feasible(unattained_packing_part(Eigen::Vector3d(1, 1, 1))).feasible);
  const PackingProblem zero = packing(diag2(1, 0), {{diag2(1, 0), 0.0}, {diag2(0, 1), 0.0}});
  EXPECT_TRUE(check_feasible(zero).feasible);
  const FeasibilityResult f = check_feasible(packing(diag2(1, 0), {{diag2(1, 1), 1.0}, {diag2(1, 0), -0.5}}));
  EXPECT_FALSE(f.feasible);
  EXPECT_EQ(f.index.value_or(0), 2);
}

TEST(Boundedness, OrthogonalRangesGiveRay) {
  const BoundednessCertificate cert = check_bounded(packing(diag2(1, 0), {{diag2(0, 1), 1.0}}));
  EXPECT_FALSE(cert.bounded);
  ASSERT_TRUE(cert.ray.has_value());
  EXPECT_NEAR(std::abs((*cert.ray)(0)), 1.0, 1e-12);
  EXPECT_NEAR((*cert.ray)(1), 0.0, 1e-12);
  EXPECT_NEAR(cert.ray_gain, 1.0, 1e-12);
}

TEST(Boundedness, UnattainedInstanceMatricesAreBounded) {
  const PackingProblem p = unattained_packing_part(Eigen::Vector3d(1, 1, 1));
  const BoundednessCertificate cert = check_bounded(p);
  ASSERT_TRUE(cert.bounded);
  EXPECT_TRUE(is_psd(p.constraint_sum() * cert.lambda - p.C, 1e-8).psd);
}

TEST(Boundedness, CEqualToConstraintSum) {
  oracle::Rng rng(21);
  for (int t = 0; t < 10; ++t) {
    PackingProblem p;
    p.C = SymMatrix::zero(4);
    for (int i = 0; i < 3; ++i) {
      const SymMatrix M = oracle::random_psd(rng, 4, 1 + i);
      p.constraints.push_back({M, 1.0, std::nullopt});
      p.C += M;
    }
    const BoundednessCertificate cert = check_bounded(p);
    ASSERT_TRUE(cert.bounded);
    // lambda = sum_k c_k'(sum M)^+ c_k = trace of the projector = rank(sum M).
    EXPECT_NEAR(cert.lambda, rank_tol(p.constraint_sum()), 1e-6);
    EXPECT_TRUE(is_psd(p.constraint_sum() * cert.lambda - p.C, 1e-8).psd);
  }
}

TEST(DualScalarBound, Examples) {
  EXPECT_NEAR(dual_scalar_bound(packing(SymMatrix::identity(2), {{SymMatrix::identity(2), 1.0}})), 2.0, 1e-12);
  EXPECT_EQ(dual_scalar_bound(packing(SymMatrix::zero(2), {{SymMatrix::identity(2), 1.0}})), 0.0);
  const PackingProblem copt = packing(SymMatrix(MatrixXd::Ones(2, 2)), {{diag2(1, 0), 1.0}, {diag2(0, 1), 1.0}});
  const double lam = dual_scalar_bound(copt);
  EXPECT_NEAR(lam, 2.0, 1e-12);
  EXPECT_TRUE(is_psd(copt.constraint_sum() * lam - copt.C, 1e-10).psd);
}

TEST(DualScalarBound, ThrowsOutsideRange) {
  try {
    dual_scalar_bound(packing(diag2(1, 0), {{diag2(0, 1), 1.0}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RangeInclusionFails);
  }
}

TEST(BarvinokPataki, Examples) {
  EXPECT_EQ(barvinok_pataki(1), 1);
  EXPECT_EQ(barvinok_pataki(3), 2);
  EXPECT_EQ(barvinok_pataki(10), 4);
  // Boundaries of the triangular numbers.
  for (long r = 2; r < 200; ++r) {
    EXPECT_EQ(barvinok_pataki(r * (r + 1) / 2), r);
    EXPECT_EQ(barvinok_pataki(r * (r + 1) / 2 - 1), r - 1);
  }
}

TEST(NrtBound, Examples) {
  const GapBound one = nrt_bound(packing(diag2(1, 0), {{diag2(1, 0), 1.0}}));
  EXPECT_EQ(one.mu_bar, 1);
  EXPECT_NEAR(one.factor, 2.0 * std::log(2.0), 1e-15);
  EXPECT_FALSE(one.degenerate);

  PackingProblem full;
  full.C = SymMatrix::identity(3);
  full.constraints = {{SymMatrix::identity(3), 1.0, std::nullopt},
                      {SymMatrix::diagonal(Eigen::Vector3d(1, 2, 3)), 1.0, std::nullopt}};
  const GapBound two = nrt_bound(full);
  EXPECT_EQ(two.mu_bar, 2);
  EXPECT_NEAR(two.factor, 2.0 * std::log(8.0), 1e-14);

  const GapBound degenerate = nrt_bound(packing(diag2(1, 0), {{SymMatrix::zero(2), 1.0}}));
  EXPECT_EQ(degenerate.mu_bar, 0);
  EXPECT_TRUE(degenerate.degenerate);
}

TEST(Boundedness, RandomCertificatesHold) {
  oracle::Rng rng(22);
  for (int t = 0; t < 20; ++t) {
    const PackingProblem b = oracle::random_bounded_packing(rng, 2 + t % 6, 1 + t % 5, 1 + t % 3);
    const BoundednessCertificate cb = check_bounded(b);
    ASSERT_TRUE(cb.bounded);
    EXPECT_TRUE(is_psd(b.constraint_sum() * cb.lambda - b.C, 1e-8).psd);

    const PackingProblem u = oracle::random_unbounded_packing(rng, 3 + t % 5, 1 + t % 4);
    const BoundednessCertificate cu = check_bounded(u);
    ASSERT_FALSE(cu.bounded);
    const VectorXd& h = *cu.ray;
    for (const auto& c : u.constraints) EXPECT_LE(std::abs(h.dot(c.M.mat() * h)), 1e-14);
    EXPECT_GT(h.dot(u.C.mat() * h), 0.0);
  }
}
