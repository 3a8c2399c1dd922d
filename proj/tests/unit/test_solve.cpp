#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

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

PackingProblem c_optimal_instance() {
  return packing(SymMatrix(MatrixXd::Ones(2, 2)), {{diag2(1, 0), 1.0}, {diag2(0, 1), 1.0}});
}

CombinedProblem unattained_instance() {
  std::ifstream in(std::string(SDPACK_TEST_DATA) + "/unattained_sup.json");
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::get<CombinedProblem>(parse_problem(ss.str()));
}

SocpProblem scalar_socp(double bound) {
  // max x  s.t. |x| <= bound
  SocpProblem s = make_socp(VectorXd::Ones(1));
  s.cones.push_back({MatrixXd::Ones(1, 1), VectorXd::Zero(1), VectorXd::Zero(1), bound});
  return s;
}

// Values listed along a decreasing eps schedule, so OPT(eps) nonincreasing in
// eps means the list never drops.
bool nonincreasing_in_eps(const std::vector<double>& v, double tol) {
  for (std::size_t k = 1; k < v.size(); ++k)
    if (v[k] < v[k - 1] - tol) return false;
  return true;
}

}  // namespace

TEST(Socp, ScalarBound) {
  const SocpResult r = solve_socp(scalar_socp(1.0));
  ASSERT_EQ(r.status, SocpStatus::Optimal);
  EXPECT_NEAR(r.x(0), 1.0, 1e-7);
  EXPECT_NEAR(r.report.dual_value, 1.0, 1e-7);
  ASSERT_EQ(r.cone_duals.size(), 1u);
  // Stationarity: 1 = z1 * A, with z0 = |z1| on the boundary.
  EXPECT_NEAR(r.cone_duals[0](0), 1.0, 1e-6);
}

TEST(Socp, DesignInstanceValue) {
  const SocpResult r = solve_socp(to_socp_rank1(c_optimal_instance()));
  ASSERT_EQ(r.status, SocpStatus::Optimal);
  EXPECT_NEAR(r.report.primal_value, 2.0, 1e-7);
}

TEST(Socp, InfeasibleCone) {
  EXPECT_EQ(solve_socp(scalar_socp(-1.0)).status, SocpStatus::Infeasible);
}

TEST(Socp, UnboundedRay) {
  SocpProblem s = make_socp(Eigen::Vector2d(1.0, 0.0));
  s.cones.push_back({(MatrixXd(1, 2) << 0.0, 1.0).finished(), VectorXd::Zero(1), VectorXd::Zero(2), 1.0});
  const SocpResult r = solve_socp(s);
  EXPECT_EQ(r.status, SocpStatus::Unbounded);
  EXPECT_GT(r.x(0), 0.0);
}

TEST(Sdp, Examples) {
  const Solution a = solve_sdp(packing(SymMatrix::identity(2), {{SymMatrix::identity(2), 1.0}}));
  EXPECT_EQ(a.status, SolveStatus::Optimal);
  EXPECT_NEAR(a.objective, 1.0, 1e-7);

  const Solution b = solve_sdp(c_optimal_instance());
  EXPECT_NEAR(b.objective, 4.0, 1e-7);
  EXPECT_LE((b.mu - Eigen::Vector2d(2, 2)).norm(), 1e-6);
  EXPECT_TRUE(b.kkt.pass);
}

TEST(Sdp, UnattainedInstanceDual) {
  const CombinedProblem p = unattained_instance();
  const CombinedDual d = solve_combined_dual(p);
  ASSERT_EQ(d.status, SocpStatus::Optimal);
  EXPECT_NEAR(d.value, 3.1, 1e-6);
  EXPECT_LE((d.mu - Eigen::Vector3d(0.1, 2.7, 0.3)).norm(), 1e-4);
}

TEST(Sdp, UnattainedInstanceDualVectorIsFeasible) {
  const CombinedProblem p = unattained_instance();
  const Eigen::Vector3d mu(0.1, 2.7, 0.3);
  SymMatrix S = p.C * -1.0;
  for (long i = 0; i < 3; ++i) S += p.M[static_cast<std::size_t>(i)] * mu(i);
  EXPECT_GE(eigh(S).values.minCoeff(), -1e-9);
  EXPECT_LE((p.h0 + p.H * mu).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(mu.dot(p.b), 3.1, 1e-12);
}

TEST(Sdp, WeakDualityOnRandom) {
  oracle::Rng rng(41);
  for (int t = 0; t < 10; ++t) {
    const PackingProblem p = oracle::random_bounded_packing(rng, 2 + t % 5, 1 + t % 4, 1 + t % 3);
    SolveOptions opts;
    const Solution s = solve_sdp(p, opts);
    EXPECT_GE(s.dual_objective, s.objective - 10.0 * opts.tol);
    EXPECT_TRUE(s.kkt.pass) << "instance " << t;
  }
}

TEST(Sdp, ZeroRhsCertifiedOnFace) {
  oracle::Rng rng(42);
  for (int t = 0; t < 5; ++t) {
    const PackingProblem p = oracle::random_zero_rhs_packing(rng, 4, 3);
    const Solution s = solve_sdp(p);
    ASSERT_TRUE(s.reduced_kkt.has_value());
    EXPECT_TRUE(s.reduced_kkt->pass);
    const auto [red, map] = project_packing(p);
    const oracle::DenseReference ref = oracle::reference_sdp(*red.inner);
    ASSERT_TRUE(ref.converged);
    EXPECT_LE(std::abs(s.objective - ref.value), 1e-6 * std::max(1.0, std::abs(ref.value)));
  }
}

TEST(LowRank, DominantCoordinate) {
  const Solution s = solve_packing_lowrank(packing(diag2(1, 0), {{SymMatrix::identity(2), 1.0}}));
  EXPECT_NEAR(s.objective, 1.0, 1e-7);
  EXPECT_EQ(rank_tol(s.X, 1e-6), 1);
  EXPECT_LE((s.X.mat() - diag2(1, 0).mat()).norm(), 1e-6);
  EXPECT_EQ(s.route, "socp");
}

TEST(LowRank, EOptimalFullRank) {
  const Solution s = solve_packing_lowrank(packing(SymMatrix::identity(2), {{diag2(1, 0), 1.0}, {diag2(0, 1), 1.0}}));
  EXPECT_NEAR(s.objective, 2.0, 1e-7);
  EXPECT_EQ(rank_tol(s.X, 1e-6), 2);
  EXPECT_LE((s.X.mat() - MatrixXd::Identity(2, 2)).norm(), 1e-6);
}

TEST(LowRank, RandomRankTwoMatchesReference) {
  oracle::Rng rng(43);
  for (int t = 0; t < 5; ++t) {
    const PackingProblem p = oracle::random_bounded_packing(rng, 6, 4, 2);
    const Solution s = solve_packing_lowrank(p);
    const oracle::DenseReference ref = oracle::reference_sdp(p);
    ASSERT_TRUE(ref.converged);
    EXPECT_LE(std::abs(s.objective - ref.value), 1e-5 * std::max(1.0, std::abs(ref.value)));
    EXPECT_LE(rank_tol(s.X, 1e-6), 2);
    EXPECT_TRUE(s.certified);
    EXPECT_TRUE(nonincreasing_in_eps(s.path_values, 1e-9));
  }
}

TEST(LowRank, ErrorsOnBadInput) {
  try {
    solve_packing_lowrank(packing(diag2(1, 0), {{diag2(0, 1), 1.0}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnboundedInput);
  }
  try {
    solve_packing_lowrank(packing(diag2(1, 0), {{diag2(1, 1), -1.0}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InfeasibleInput);
  }
}

TEST(LowRank, OptimalSolutionsPassKkt) {
  oracle::Rng rng(44);
  for (int t = 0; t < 10; ++t) {
    const PackingProblem p = oracle::random_bounded_packing(rng, 3 + t % 4, 2 + t % 3, 1 + t % 3);
    const Solution s = solve_packing_lowrank(p);
    if (s.status != SolveStatus::Optimal) continue;
    EXPECT_TRUE(kkt_check(p, s.X, s.mu, 1e-6).pass) << "instance " << t;
  }
}

TEST(LowRank, RankOneRoutesAgree) {
  oracle::Rng rng(45);
  for (int t = 0; t < 5; ++t) {
    const PackingProblem p = oracle::random_bounded_packing(rng, 4, 3, 1);
    SolveOptions socp;
    socp.route = Route::Socp;
    SolveOptions eps;
    eps.route = Route::EpsPath;
    const double a = solve_packing_lowrank(p, socp).objective;
    const double b = solve_packing_lowrank(p, eps).objective;
    EXPECT_LE(std::abs(a - b), 1e-6 * std::max(1.0, std::abs(a)));
  }
}

TEST(Eta, UnattainedSupremum) {
  const CombinedSolution s = solve_combined_eta(unattained_instance());
  EXPECT_EQ(s.status, SolveStatus::AsymptoticSup);
  ASSERT_FALSE(s.gamma.empty());
  EXPECT_NEAR(s.gamma.back(), 3.1, 1e-3);
  for (std::size_t k = 1; k < s.gamma.size(); ++k) EXPECT_GE(s.gamma[k], s.gamma[k - 1] - 1e-9);
  for (int r : s.ranks) EXPECT_LE(r, 1);
}

TEST(Eta, DegenerateCombinedMatchesPacking) {
  oracle::Rng rng(46);
  const PackingProblem pk = oracle::random_bounded_packing(rng, 3, 3, 2);
  CombinedProblem cp;
  cp.C = pk.C;
  for (const auto& c : pk.constraints) cp.M.push_back(c.M);
  cp.b = pk.rhs();
  cp.h0 = VectorXd::Zero(0);
  cp.H = MatrixXd::Zero(0, pk.size());
  const CombinedSolution s = solve_combined_eta(cp);
  EXPECT_EQ(s.status, SolveStatus::Optimal);
  const double ref = solve_packing_lowrank(pk).objective;
  EXPECT_NEAR(s.objective, ref, 1e-6 * std::max(1.0, std::abs(ref)));
}

TEST(Eta, FeasibleSequenceApproachesSupremum) {
  const CombinedProblem p = unattained_instance();
  const double k = 1e6;
  const Eigen::Vector2d x(std::sqrt(3.0 + k), std::sqrt(k));
  const Eigen::Vector2d lambda(-1.0, k + 2.0);
  const SymMatrix X = SymMatrix::outer(x);
  // Feasibility of the pair, then the objective.
  for (long i = 0; i < p.size(); ++i) {
    EXPECT_LE(p.M[static_cast<std::size_t>(i)].inner(X), p.b(i) + p.H.col(i).dot(lambda) + 1e-6 * k);
  }
  const double value = p.C.inner(X) + p.h0.dot(lambda);
  EXPECT_NEAR(value, 3.1, 1e-3);
}

TEST(Kkt, Examples) {
  const PackingProblem p = packing(diag2(1, 0), {{SymMatrix::identity(2), 1.0}});
  const KktResiduals exact = kkt_check(p, diag2(1, 0), VectorXd::Ones(1), 1e-12);
  EXPECT_EQ(exact.primal, 0.0);
  EXPECT_EQ(exact.dual, 0.0);
  EXPECT_EQ(exact.complementarity, 0.0);
  EXPECT_TRUE(exact.pass);

  const KktResiduals off = kkt_check(p, diag2(1, 0), VectorXd::Constant(1, 0.5), 1e-6);
  EXPECT_NEAR(off.dual, 0.5, 1e-15);
  EXPECT_FALSE(off.pass);
}

TEST(Kkt, SocpLiftWithMappedDuals) {
  const PackingProblem p = c_optimal_instance();
  const Solution s = solve_rank1_socp(p);
  EXPECT_LE((s.mu - Eigen::Vector2d(2, 2)).norm(), 1e-6);
  EXPECT_TRUE(kkt_check(p, s.X, s.mu, 1e-8).pass);
}

TEST(RecoverDesign, Examples) {
  const VectorXd w = recover_design(Eigen::Vector2d(2, 2), Eigen::Vector2d(1, 1), RecoveryMode::Simplex);
  EXPECT_LE((w - Eigen::Vector2d(0.5, 0.5)).norm(), 1e-15);
  const VectorXd e = recover_design(Eigen::Vector3d(5, 0, 0), Eigen::Vector3d(1, 1, 1), RecoveryMode::Simplex);
  EXPECT_LE((e - Eigen::Vector3d(1, 0, 0)).norm(), 1e-15);
  try {
    recover_design(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1), RecoveryMode::Simplex);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::ZeroDual);
  }
}

TEST(RecoverDesign, ResourceScaledRespectsCaps) {
  DesignProblem d;
  d.M = {diag2(1, 0), diag2(0, 1)};
  d.K = Eigen::Vector2d(1, 1);
  d.resource = ResourceBlock{(MatrixXd(2, 2) << 1, 2, 0.5, 0.25).finished(), Eigen::Vector2d(1, 0.5)};
  const ResourcePair pair = build_resource_constrained(d);
  const ResourceSolution rs = solve_resource_design(pair, d);
  const VectorXd w = recover_design(rs.dual.x.head(2).cwiseMax(0.0), VectorXd::Ones(2), RecoveryMode::ResourceScaled,
                                    rs.dual.x(pair.t_index()));
  EXPECT_LE((d.resource->P * w - d.resource->d).maxCoeff(), 1e-8);
}

TEST(BurerMonteiro, RankTwoWithinToleranceOrFlagged) {
  const Solution ref = solve_sdp(packing(SymMatrix(MatrixXd{{2, 1, 0}, {1, 2, 0}, {0, 0, 0}}),
                                         {{SymMatrix::diagonal(Eigen::Vector3d(1, 0, 1)), 1.0},
                                          {SymMatrix(MatrixXd{{0, 0, 0}, {0, 1, 0.5}, {0, 0.5, 1}}), 2.0},
                                          {SymMatrix(MatrixXd::Ones(3, 3)), 3.0}}));
  const PackingProblem p = packing(SymMatrix(MatrixXd{{2, 1, 0}, {1, 2, 0}, {0, 0, 0}}),
                                   {{SymMatrix::diagonal(Eigen::Vector3d(1, 0, 1)), 1.0},
                                    {SymMatrix(MatrixXd{{0, 0, 0}, {0, 1, 0.5}, {0, 0.5, 1}}), 2.0},
                                    {SymMatrix(MatrixXd::Ones(3, 3)), 3.0}});
  const Solution s = solve_burer_monteiro(p);
  EXPECT_EQ(s.route, "bm");
  EXPECT_TRUE(!s.certified || std::abs(s.objective - ref.objective) <= 1e-4);
  EXPECT_LE(rank_tol(s.X, 1e-6), 2);
}

TEST(Options, ValidateSchedules) {
  SolveOptions o;
  o.eps_schedule = {1e-2, 1e-2};
  EXPECT_THROW(o.validate(), Error);
  o = SolveOptions{};
  o.tol = 0.0;
  EXPECT_THROW(o.validate(), Error);
  EXPECT_NO_THROW(SolveOptions{}.validate());
  EXPECT_EQ(parse_route("eps-path"), Route::EpsPath);
  EXPECT_THROW(parse_route("simplex"), Error);
}
