#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "sdpack/model.hpp"
#include "sdpack/reduce.hpp"

namespace sdpack {

enum class Route { Auto, Socp, EpsPath, BurerMonteiro };

std::string_view to_string(Route route);
/// Accepts "auto", "socp", "eps-path", "bm". Throws InvalidInput.
Route parse_route(std::string_view text);

struct SolveOptions {
  double tol = 1e-8;
  int max_iter = 200;
  std::vector<double> eps_schedule = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
  std::vector<double> eta_schedule = {1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  double rank_threshold = 1e-6;
  Route route = Route::Auto;

  /// Throws InvalidInput when a schedule is empty, not strictly decreasing or
  /// not positive, or when a tolerance is not positive.
  void validate() const;
};

/// Default options with tol taken from SDPACK_TOL when it is set.
SolveOptions default_options();

enum class SocpStatus { Optimal, Unbounded, Infeasible, NearUnattained, MaxIterations, NumericalFailure };
std::string_view to_string(SocpStatus status);

struct SolveReport {
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double complementarity = 0.0;
};

struct SocpResult {
  SocpStatus status = SocpStatus::NumericalFailure;
  Eigen::VectorXd x;  // Unbounded: an improving ray
  std::vector<Eigen::VectorXd> cone_duals;  // (z0, z1) per cone
  Eigen::VectorXd ineq_duals;
  Eigen::VectorXd eq_duals;
  SolveReport report;
};

SocpResult solve_socp(const SocpProblem& s, const SolveOptions& opts = {});

/// Dense interior-point solve of the packing problem and its dual.
/// Throws MaxIterations / NumericalFailure when the solver does not converge.
Solution solve_sdp(const PackingProblem& p, const SolveOptions& opts = {});

/// Dense solve of the dual of a combined problem:
/// min b'mu, sum mu M - C psd, R0 + sum mu R nsd, h0 + H mu = 0, mu >= 0.
struct CombinedDual {
  Eigen::VectorXd mu;
  double value = 0.0;
  SocpStatus status = SocpStatus::NumericalFailure;
  double tol = 0.0;  // gap target of the returned solve
};
CombinedDual solve_combined_dual(const CombinedProblem& p, const SolveOptions& opts = {});

/// Primal feasibility, dual feasibility and complementarity residuals,
/// each a max-norm; pass iff all are <= tol * scale.
KktResiduals kkt_check(const PackingProblem& p, const SymMatrix& X, const Eigen::VectorXd& mu, double tol);

/// Low-rank solve: reduction to the strictly feasible face, then the cone
/// route for rank-one objectives or the eps-perturbation path otherwise.
/// Throws InfeasibleInput, UnboundedInput, PathDiverged.
Solution solve_packing_lowrank(const PackingProblem& p, const SolveOptions& opts = {});

/// Rank-one cone route on a problem whose b_i are all positive. Maps the cone
/// duals back to mu.
Solution solve_rank1_socp(const PackingProblem& p, const SolveOptions& opts = {});

/// Trace-capped path for combined problems. Throws InfeasiblePrimal,
/// InfeasibleDual, PathNotMonotone.
CombinedSolution solve_combined_eta(const CombinedProblem& p, const SolveOptions& opts = {});

/// Cone route for combined problems (rank-one C, R = 0, h0 = 0).
CombinedSolution solve_combined_socp(const CombinedProblem& p, const SolveOptions& opts = {});

/// Factorized X = R R' with an augmented Lagrangian; certified only when the
/// multipliers pass kkt_check. Width defaults to rank C (at least 1).
Solution solve_burer_monteiro(const PackingProblem& p, const SolveOptions& opts = {},
                              std::optional<int> width = std::nullopt);

enum class RecoveryMode { Simplex, ResourceScaled };

/// Simplex: w = mu / (mu'b). ResourceScaled: w = mu / t. Throws ZeroDual.
Eigen::VectorXd recover_design(const Eigen::VectorXd& mu, const Eigen::VectorXd& b, RecoveryMode mode,
                               double t = 1.0);

struct ResourceSolution {
  SocpResult primal;
  SocpResult dual;
  Eigen::VectorXd weights;  // mu / t
  double variance = 0.0;    // squared primal value
  double resource_violation = 0.0;  // max(P w - d)_+
};

ResourceSolution solve_resource_design(const ResourcePair& pair, const DesignProblem& d,
                                       const SolveOptions& opts = {});

}  // namespace sdpack
