#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "sdpack/analysis.hpp"
#include "sdpack/error.hpp"
#include "sdpack/reduce.hpp"
#include "sdpack/solve.hpp"

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

DesignProblem two_experiments(const MatrixXd& K, Criterion crit) {
  DesignProblem d;
  d.M = {diag2(1, 0), diag2(0, 1)};
  d.K = K;
  d.criterion = crit;
  return d;
}

bool in_cone(const SocCone& k, const VectorXd& x) { return (k.F * x + k.g).norm() <= k.f.dot(x) + k.d; }

}  // namespace

TEST(ProjectPacking, IdentityReduction) {
  const PackingProblem p = packing(diag2(1, 0), {{SymMatrix::identity(2), 1.0}, {diag2(2, 1), 3.0}});
  const auto [red, map] = project_packing(p);
  ASSERT_TRUE(red.inner.has_value());
  EXPECT_EQ(map.reduced(), 2);
  // Any orthonormal basis of R^2 is acceptable; UV UV' = I regardless.
  EXPECT_LE((map.UV * map.UV.transpose() - MatrixXd::Identity(2, 2)).norm(), 1e-14);
  EXPECT_TRUE(red.zero_rhs.empty());
  EXPECT_EQ(red.kept.size(), 2u);
  EXPECT_TRUE(red.primal_strict);
  EXPECT_TRUE(red.dual_strict);
  // With UV orthogonal the lift is a similarity, so it returns Z in the original basis.
  const SymMatrix Z(MatrixXd{{0.3, 0.1}, {0.1, 0.7}});
  EXPECT_LE((lift_solution(Z.congruence(map.UV), map).mat() - Z.mat()).norm(), 1e-14);
}

TEST(ProjectPacking, ZeroRhsPinsFace) {
  const PackingProblem p = packing(diag2(0, 1), {{diag2(1, 0), 0.0}, {SymMatrix::identity(2), 1.0}});
  const auto [red, map] = project_packing(p);
  ASSERT_TRUE(red.inner.has_value());
  ASSERT_EQ(map.reduced(), 1);
  EXPECT_NEAR(std::abs(map.UV(1, 0)), 1.0, 1e-15);
  EXPECT_NEAR(map.UV(0, 0), 0.0, 1e-15);
  const PackingProblem& q = *red.inner;
  EXPECT_NEAR(q.C(0, 0), 1.0, 1e-15);
  ASSERT_EQ(q.size(), 1);
  EXPECT_NEAR(q.constraints[0].M(0, 0), 1.0, 1e-15);
  EXPECT_EQ(q.constraints[0].b, 1.0);
  EXPECT_EQ(red.zero_rhs, std::vector<int>{0});
  EXPECT_EQ(red.kept, std::vector<int>{1});

  const SymMatrix X = lift_solution(SymMatrix::identity(1), map);
  EXPECT_LE((X.mat() - diag2(0, 1).mat()).norm(), 1e-15);
  EXPECT_NEAR(p.C.inner(X), 1.0, 1e-15);
  EXPECT_EQ(lift_solution(SymMatrix::zero(1), map).frobenius(), 0.0);
}

TEST(ProjectPacking, RangeRestriction) {
  const PackingProblem p = packing(diag2(1, 0), {{diag2(1, 0), 1.0}});
  const auto [red, map] = project_packing(p);
  ASSERT_EQ(map.reduced(), 1);
  EXPECT_NEAR(std::abs(map.UV(0, 0)), 1.0, 1e-15);
  EXPECT_NEAR(red.inner->C(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(red.inner->constraints[0].M(0, 0), 1.0, 1e-15);
}

TEST(ProjectPacking, RejectsInfeasibleAndUnbounded) {
  try {
    project_packing(packing(diag2(1, 0), {{diag2(1, 1), 1.0}, {diag2(1, 0), -0.5}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InfeasibleInput);
  }
  try {
    project_packing(packing(diag2(1, 0), {{diag2(0, 1), 1.0}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnboundedInput);
  }
}

TEST(ProjectPacking, LiftIsExactOnRandomFaces) {
  oracle::Rng rng(31);
  for (int t = 0; t < 20; ++t) {
    const PackingProblem p = oracle::random_zero_rhs_packing(rng, 3 + t % 5, 2 + t % 4);
    const auto [red, map] = project_packing(p);
    ASSERT_TRUE(red.inner.has_value());
    EXPECT_FALSE(red.zero_rhs.empty());
    EXPECT_TRUE(red.primal_strict);
    EXPECT_TRUE(red.dual_strict);
    const PackingProblem& q = *red.inner;
    const SymMatrix Z = oracle::random_psd(rng, q.dim(), 1 + t % q.dim());
    const SymMatrix X = lift_solution(Z, map);
    const double obj = q.C.inner(Z);
    EXPECT_LE(std::abs(p.C.inner(X) - obj), 1e-10 * std::max(1.0, std::abs(obj)));
    for (std::size_t k = 0; k < red.kept.size(); ++k) {
      const double lhs = p.constraints[static_cast<std::size_t>(red.kept[k])].M.inner(X);
      EXPECT_NEAR(lhs, q.constraints[k].M.inner(Z), 1e-10 * std::max(1.0, std::abs(lhs)));
    }
    for (int i : red.zero_rhs) EXPECT_LE(std::abs(p.constraints[static_cast<std::size_t>(i)].M.inner(X)), 1e-10);
  }
}

TEST(SocpBuilders, ScalarCase) {
  const PackingProblem p = packing(SymMatrix::identity(1) * 4.0, {{SymMatrix::identity(1), 9.0}});
  const SocpProblem s = to_socp_rank1(p);
  EXPECT_NEAR(s.objective(0), 2.0, 1e-15);
  const SocpResult r = solve_socp(s);
  ASSERT_EQ(r.status, SocpStatus::Optimal);
  EXPECT_NEAR(r.x(0), 3.0, 1e-7);
  EXPECT_NEAR(std::pow(s.objective.dot(r.x), 2), 36.0, 1e-6);
}

TEST(SocpBuilders, SeparableBox) {
  const PackingProblem p = packing(SymMatrix(MatrixXd::Ones(2, 2)), {{diag2(1, 0), 1.0}, {diag2(0, 1), 1.0}});
  const SocpResult r = solve_socp(to_socp_rank1(p));
  ASSERT_EQ(r.status, SocpStatus::Optimal);
  EXPECT_LE((r.x - Eigen::Vector2d(1, 1)).norm(), 1e-7);
  EXPECT_NEAR(r.report.primal_value, 2.0, 1e-7);
}

TEST(SocpBuilders, RankOneRandomMatchesReference) {
  oracle::Rng rng(32);
  for (int t = 0; t < 5; ++t) {
    const PackingProblem p = oracle::random_bounded_packing(rng, 4, 3, 1);
    const SocpProblem s = to_socp_rank1(p);
    SolveOptions opts;
    opts.tol = 1e-10;
    const SocpResult r = solve_socp(s, opts);
    ASSERT_EQ(r.status, SocpStatus::Optimal);
    const oracle::DenseReference ref = oracle::reference_sdp(p);
    ASSERT_TRUE(ref.converged);
    const double v = std::pow(s.objective.dot(r.x), 2);
    EXPECT_LE(std::abs(v - ref.value), 1e-6 * std::max(1.0, std::abs(ref.value)));
  }
}

TEST(SocpBuilders, RankOneVectorRejectsHigherRank) {
  try {
    rank_one_vector(SymMatrix::identity(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RankNotOne);
  }
}

TEST(HyperbolicRewrite, AlgebraicIdentity) {
  oracle::Rng rng(33);
  std::uniform_real_distribution<double> unit(0.0, 3.0);
  int checked = 0;
  for (int t = 0; t < 1000; ++t) {
    const VectorXd z = oracle::gaussian(rng, 3, 1);
    const double alpha = unit(rng);
    const double lhs = z.squaredNorm() - alpha;
    VectorXd stacked(4);
    stacked << 2.0 * z, alpha - 1.0;
    const double rhs = stacked.norm() - (alpha + 1.0);
    if (std::abs(lhs) < 1e-9) continue;
    EXPECT_EQ(lhs <= 0.0, rhs <= 0.0);
    ++checked;
  }
  EXPECT_GT(checked, 990);
}

TEST(HyperbolicRewrite, CombinedConesMatchQuadraticForm) {
  CombinedProblem p;
  p.C = SymMatrix(MatrixXd::Ones(2, 2));
  p.M = {diag2(1, 0), diag2(0, 1)};
  p.b = Eigen::Vector2d(1.0, 1.0);
  p.h0 = VectorXd::Zero(1);
  p.H = (MatrixXd(1, 2) << 1.0, -1.0).finished();
  const SocpProblem s = combined_to_socp(p);
  ASSERT_EQ(s.cones.size(), 2u);
  oracle::Rng rng(34);
  int checked = 0;
  for (int t = 0; t < 1000; ++t) {
    const VectorXd v = oracle::gaussian(rng, 3, 1);
    for (long i = 0; i < 2; ++i) {
      const double ax = v(i);  // A_i x for the coordinate experiments
      const double slack = p.H(0, i) * v(2) + p.b(i);
      if (std::abs(ax * ax - slack) < 1e-9) continue;
      EXPECT_EQ(in_cone(s.cones[static_cast<std::size_t>(i)], v), ax * ax <= slack);
      ++checked;
    }
  }
  EXPECT_GT(checked, 1900);
}

TEST(HyperbolicRewrite, NoLambdaAgreesWithRankOneRoute) {
  oracle::Rng rng(35);
  SolveOptions opts;
  opts.tol = 1e-11;
  for (int t = 0; t < 3; ++t) {
    const PackingProblem pk = oracle::random_bounded_packing(rng, 3, 3, 1);
    CombinedProblem cp;
    cp.C = pk.C;
    for (const auto& c : pk.constraints) cp.M.push_back(c.M);
    cp.b = pk.rhs();
    cp.h0 = VectorXd::Zero(0);
    cp.H = MatrixXd::Zero(0, pk.size());
    const SocpResult a = solve_socp(combined_to_socp(cp), opts);
    const SocpResult b = solve_socp(to_socp_rank1(pk), opts);
    ASSERT_EQ(a.status, SocpStatus::Optimal);
    ASSERT_EQ(b.status, SocpStatus::Optimal);
    EXPECT_LE(std::abs(a.report.primal_value - b.report.primal_value),
              1e-10 * std::max(1.0, std::abs(b.report.primal_value)));
  }
}

TEST(DesignBuilders, COptimalMatchesGrid) {
  const DesignProblem d = two_experiments(Eigen::Vector2d(1, 1), Criterion::COptimal);
  const PackingProblem p = build_c_optimal(d);
  EXPECT_EQ(p.rhs(), Eigen::Vector2d(1, 1));
  const Solution s = solve_sdp(p);
  EXPECT_NEAR(s.objective, 4.0, 1e-6);
  const Eigen::Vector2d c(1, 1);
  const oracle::GridResult g = oracle::grid_two_experiments(
      d.M[0].mat(), d.M[1].mat(), [&](const MatrixXd& A) { return oracle::pinv_quadratic(A, c); }, 1e-4);
  EXPECT_NEAR(g.value, 4.0, 1e-6);
  EXPECT_NEAR(s.objective, g.value, 1e-3);
}

TEST(DesignBuilders, SingleExperimentClosedForm) {
  const VectorXd c = Eigen::Vector3d(1.0, -2.0, 0.5);
  DesignProblem d;
  d.M = {SymMatrix::outer(c) * (1.0 / c.squaredNorm())};
  d.K = c;
  d.criterion = Criterion::COptimal;
  const Solution s = solve_sdp(build_c_optimal(d));
  EXPECT_NEAR(s.objective, oracle::pinv_quadratic(d.M[0].mat(), c), 1e-6);
}

TEST(DesignBuilders, COutsideRangeIsUnbounded) {
  DesignProblem d = two_experiments(Eigen::Vector2d(1, 1), Criterion::COptimal);
  d.M = {diag2(1, 0)};
  EXPECT_FALSE(check_bounded(build_c_optimal(d)).bounded);
}

TEST(DesignBuilders, AOptimal) {
  const DesignProblem one = two_experiments(Eigen::Vector2d(1, 1), Criterion::AOptimal);
  DesignProblem as_c = one;
  as_c.criterion = Criterion::COptimal;
  const PackingProblem pa = build_a_optimal(one);
  const PackingProblem pc = build_c_optimal(as_c);
  EXPECT_EQ(pa.C.mat(), pc.C.mat());
  for (long i = 0; i < pa.size(); ++i) EXPECT_EQ(pa.constraints[i].M.mat(), pc.constraints[i].M.mat());

  const DesignProblem d = two_experiments(MatrixXd::Identity(2, 2), Criterion::AOptimal);
  const Solution s = solve_sdp(build_a_optimal(d));
  EXPECT_NEAR(s.objective, 4.0, 1e-6);
  const oracle::GridResult g = oracle::grid_two_experiments(
      d.M[0].mat(), d.M[1].mat(),
      [](const MatrixXd& A) {
        return oracle::pinv_quadratic(A, Eigen::Vector2d(1, 0)) + oracle::pinv_quadratic(A, Eigen::Vector2d(0, 1));
      },
      1e-4);
  EXPECT_NEAR(g.value, 4.0, 1e-6);
  EXPECT_NEAR(g.w(0), 0.5, 1e-3);
}

TEST(DesignBuilders, AOptimalShape) {
  DesignProblem d;
  d.M = {SymMatrix::identity(3), SymMatrix::diagonal(Eigen::Vector3d(1, 0, 2))};
  d.K = MatrixXd::Identity(3, 2);
  d.criterion = Criterion::AOptimal;
  const PackingProblem p = build_a_optimal(d);
  EXPECT_EQ(p.dim(), 6);
  ASSERT_EQ(p.size(), 2);
  EXPECT_EQ(p.constraints[1].M.mat().block(3, 3, 3, 3), d.M[1].mat());
  EXPECT_EQ(p.constraints[1].M.mat().block(0, 3, 3, 3), MatrixXd::Zero(3, 3));
}

TEST(DesignBuilders, EOptimal) {
  const DesignProblem d = two_experiments(MatrixXd::Identity(2, 2), Criterion::EOptimal);
  const PackingProblem p = build_e_optimal(d);
  const Solution s = solve_sdp(p);
  EXPECT_NEAR(s.objective, 2.0, 1e-6);
  EXPECT_LE((s.X.mat() - MatrixXd::Identity(2, 2)).norm(), 1e-5);
  const oracle::GridResult g = oracle::grid_two_experiments(
      d.M[0].mat(), d.M[1].mat(),
      [](const MatrixXd& A) { return 1.0 / Eigen::SelfAdjointEigenSolver<MatrixXd>(A).eigenvalues()(0); }, 1e-4);
  EXPECT_NEAR(g.value, 2.0, 1e-6);

  DesignProblem r1 = two_experiments(Eigen::Vector2d(1, 1), Criterion::EOptimal);
  DesignProblem as_c = r1;
  as_c.criterion = Criterion::COptimal;
  EXPECT_EQ(build_e_optimal(r1).C.mat(), build_c_optimal(as_c).C.mat());
}

TEST(DesignBuilders, EOptimalRandomLowRank) {
  oracle::Rng rng(36);
  DesignProblem d;
  for (int i = 0; i < 4; ++i) d.M.push_back(oracle::random_psd(rng, 4, 2));
  d.K = oracle::gaussian(rng, 4, 2);
  d.criterion = Criterion::EOptimal;
  const PackingProblem p = build_e_optimal(d);
  const Solution s = solve_packing_lowrank(p);
  const oracle::DenseReference ref = oracle::reference_sdp(p);
  ASSERT_TRUE(ref.converged);
  EXPECT_LE(rank_tol(s.X, 1e-6), 2);
  EXPECT_LE(std::abs(s.objective - ref.value), 1e-5 * std::max(1.0, std::abs(ref.value)));
}

TEST(DesignBuilders, WrongCriterion) {
  try {
    build_c_optimal(two_experiments(MatrixXd::Identity(2, 2), Criterion::AOptimal));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::WrongCriterion);
  }
}

TEST(ResourcePairTest, SimplexRowMatchesPlainCOptimal) {
  DesignProblem d = two_experiments(Eigen::Vector2d(1, 1), Criterion::COptimal);
  d.resource = ResourceBlock{MatrixXd::Ones(1, 2), VectorXd::Ones(1)};
  const ResourcePair pair = build_resource_constrained(d);
  const ResourceSolution rs = solve_resource_design(pair, d);
  const double plain = solve_sdp(build_c_optimal(d)).objective;
  EXPECT_NEAR(rs.variance, plain, 1e-6 * std::max(1.0, plain));
  EXPECT_NEAR(rs.weights.sum(), 1.0, 1e-6);
}

TEST(ResourcePairTest, PerExperimentCaps) {
  DesignProblem d;
  d.A = std::vector<MatrixXd>{(MatrixXd(1, 2) << 1, 0).finished(), (MatrixXd(1, 2) << 0, 1).finished()};
  d.M = {diag2(1, 0), diag2(0, 1)};
  d.K = Eigen::Vector2d(1, 1);
  d.resource = ResourceBlock{MatrixXd::Identity(2, 2), Eigen::Vector2d(1, 1)};
  const ResourcePair pair = build_resource_constrained(d);
  EXPECT_EQ(pair.primal.num_vars(), 4);
  const ResourceSolution rs = solve_resource_design(pair, d);
  EXPECT_NEAR(rs.variance, 2.0, 1e-6);
  EXPECT_LE((rs.weights - Eigen::Vector2d(1, 1)).norm(), 1e-5);
  EXPECT_LE(rs.resource_violation, 1e-8);
  const oracle::GridResult g =
      oracle::grid_box_variance(d.M[0].mat(), d.M[1].mat(), d.K.col(0), Eigen::Vector2d(1, 1), 1e-2);
  EXPECT_NEAR(rs.variance, g.value, 1e-3);
}

TEST(ResourcePairTest, StrongDualityOnRandomInstances) {
  oracle::Rng rng(37);
  std::uniform_real_distribution<double> pos(0.2, 1.0);
  for (int t = 0; t < 5; ++t) {
    DesignProblem d;
    for (int i = 0; i < 3; ++i) d.M.push_back(oracle::random_psd(rng, 3, 2));
    d.K = oracle::gaussian(rng, 3, 1);
    MatrixXd P(2, 3);
    for (long i = 0; i < P.size(); ++i) P(i) = pos(rng);
    d.resource = ResourceBlock{P, Eigen::Vector2d(1.0, 1.5)};
    const ResourcePair pair = build_resource_constrained(d);
    const ResourceSolution rs = solve_resource_design(pair, d);
    ASSERT_EQ(rs.primal.status, SocpStatus::Optimal);
    ASSERT_EQ(rs.dual.status, SocpStatus::Optimal);
    const double pv = rs.primal.report.primal_value;
    const double dv = rs.dual.report.primal_value;
    EXPECT_LE(std::abs(pv - dv), 1e-6 * std::max(1.0, std::abs(pv)));
    EXPECT_LE(rs.resource_violation, 1e-8);
  }
}

TEST(ResourcePairTest, InfeasibleDesign) {
  DesignProblem d = two_experiments(Eigen::Vector2d(1, 1), Criterion::COptimal);
  // Caps forcing w_2 = 0 leave c outside the information range.
  d.resource = ResourceBlock{(MatrixXd(1, 2) << 0, 1).finished(), VectorXd::Zero(1)};
  try {
    build_resource_constrained(d);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InfeasibleDesign);
  }
}
