#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "sdpack/model.hpp"

namespace sdpack {

struct LiftMap {
  Eigen::MatrixXd UV;  // n x n', orthonormal columns

  long ambient() const { return UV.rows(); }
  long reduced() const { return UV.cols(); }
};

/// Restriction of a feasible, bounded packing problem to the face where it is
/// strictly feasible on both sides.
struct ReducedProblem {
  // Absent when the face is {0} (n' = 0); the optimum is then X = 0.
  std::optional<PackingProblem> inner;
  long original_dim = 0;
  long original_size = 0;
  std::vector<int> kept;      // original index of each inner constraint (0-based)
  std::vector<int> zero_rhs;  // constraints with b_i = 0 (they pin the face)
  std::vector<int> vacuous;   // M_i = 0, or M_i vanishing on the face
  double primal_eps = 0.0;    // eps I is strictly feasible for the inner problem
  double primal_margin = 0.0; // min_i b_i - eps tr M_i'
  double dual_lambda = 0.0;   // lambda sum M_i' - C' is positive definite
  double dual_margin = 0.0;   // its minimum eigenvalue
  bool primal_strict = false;
  bool dual_strict = false;
};

/// b_i counts as zero when |b_i| <= 1e-12 max(1, |b|_inf).
double zero_rhs_threshold(const Eigen::VectorXd& b);

/// Throws InfeasibleInput or UnboundedInput when the certificates fail.
std::pair<ReducedProblem, LiftMap> project_packing(const PackingProblem& p);

/// X = UV Z UV'.
SymMatrix lift_solution(const SymMatrix& Z, const LiftMap& map);

/// maximize (or minimize) objective' x subject to
///   |F_k x + g_k| <= f_k' x + d_k   for each cone k,
///   A_ineq x <= b_ineq,  A_eq x = b_eq.
struct SocCone {
  Eigen::MatrixXd F;
  Eigen::VectorXd g;
  Eigen::VectorXd f;
  double d = 0.0;
};

struct SocpProblem {
  Eigen::VectorXd objective;
  bool maximize = true;
  std::vector<SocCone> cones;
  Eigen::MatrixXd A_ineq;
  Eigen::VectorXd b_ineq;
  Eigen::MatrixXd A_eq;
  Eigen::VectorXd b_eq;

  long num_vars() const { return objective.size(); }
  /// Throws DimensionMismatch.
  void validate() const;
};

/// Empty linear blocks with the right column count.
SocpProblem make_socp(Eigen::VectorXd objective, bool maximize = true);

/// c with C = c c', c = sqrt(lambda_1) q_1, first nonzero entry positive.
/// Throws RankNotOne.
Eigen::VectorXd rank_one_vector(const SymMatrix& C);

/// max c'x  s.t. |A_i x| <= sqrt(b_i). Throws RankNotOne, InfeasibleInput.
SocpProblem to_socp_rank1(const PackingProblem& p);

/// Cone route for combined problems with rank-one C, R_i = 0 and h_0 = 0.
/// Variables are (x, lambda).
SocpProblem combined_to_socp(const CombinedProblem& p);

/// Feasibility of the combined pair, each decided by an auxiliary conic
/// solve; a side is reported infeasible only on a returned certificate.
struct CombinedFeasibility {
  bool primal = true;
  bool dual = true;
};
CombinedFeasibility check_combined_feasibility(const CombinedProblem& p);

PackingProblem build_c_optimal(const DesignProblem& d);
PackingProblem build_a_optimal(const DesignProblem& d);
PackingProblem build_e_optimal(const DesignProblem& d);

/// Resource-constrained c-optimal design as a primal/dual SOCP pair.
///   primal vars: x (n), lambda (q)
///   dual vars:   mu (l), t, alpha (l), z_1..z_l
struct ResourcePair {
  SocpProblem primal;
  SocpProblem dual;
  long n = 0;
  long q = 0;
  long l = 0;
  std::vector<long> z_offset;  // start of z_i in the dual variable vector
  Eigen::VectorXd positive_design;  // the w > 0 found by the feasibility check

  long mu_index(long i) const { return i; }
  long t_index() const { return l; }
  long alpha_index(long i) const { return l + 1 + i; }
};

/// Throws WrongCriterion, InfeasibleDesign.
ResourcePair build_resource_constrained(const DesignProblem& d);

/// Observation factors of a design, computing A_i = psd_factor(M_i) when the
/// design only carries M_i.
std::vector<Eigen::MatrixXd> design_factors(const DesignProblem& d);

}  // namespace sdpack
