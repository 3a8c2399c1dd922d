#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sdpack/linalg.hpp"

namespace sdpack {

struct PackingConstraint {
  SymMatrix M;
  double b = 0.0;
  // Optional factor with A^T A = M; kept so the cone route can use it directly.
  std::optional<Eigen::MatrixXd> A;
};

/// maximize <C, X>  s.t.  <M_i, X> <= b_i,  X psd.
struct PackingProblem {
  SymMatrix C = SymMatrix::zero(1);
  std::vector<PackingConstraint> constraints;

  long dim() const { return C.dim(); }
  long size() const { return static_cast<long>(constraints.size()); }
  Eigen::VectorXd rhs() const;
  SymMatrix constraint_sum() const;

  /// Throws ValidationError / DimensionMismatch with a witness.
  void validate() const;
};

/// maximize <C, X> + <R0, Y> + h0' lambda
/// s.t. <M_i, X> <= b_i + <R_i, Y> + h_i' lambda,  X, Y psd,  lambda free.
/// p = 0 (no Y block) and q = 0 (no lambda) are allowed.
struct CombinedProblem {
  SymMatrix C = SymMatrix::zero(1);
  std::vector<SymMatrix> M;
  std::optional<SymMatrix> R0;  // absent iff p = 0
  std::vector<SymMatrix> R;     // empty iff p = 0
  Eigen::VectorXd h0;           // length q
  Eigen::MatrixXd H;            // q x l, column i is h_i
  Eigen::VectorXd b;            // length l

  long dim() const { return C.dim(); }
  long size() const { return static_cast<long>(M.size()); }
  long y_dim() const { return R0 ? R0->dim() : 0; }
  long lambda_dim() const { return h0.size(); }

  void validate() const;
};

enum class Criterion { COptimal, AOptimal, EOptimal };

struct ResourceBlock {
  Eigen::MatrixXd P;  // q x l, nonnegative
  Eigen::VectorXd d;  // length q
};

struct DesignProblem {
  std::optional<std::vector<Eigen::MatrixXd>> A;  // observation maps, each rows x n
  std::vector<SymMatrix> M;                       // information matrices A_i^T A_i
  Eigen::MatrixXd K;                              // n x r
  Criterion criterion = Criterion::COptimal;
  std::optional<ResourceBlock> resource;

  long dim() const { return K.rows(); }
  long size() const { return static_cast<long>(M.size()); }
  long functionals() const { return K.cols(); }

  void validate() const;
};

enum class SolveStatus { Optimal, Unbounded, Infeasible, AsymptoticSup, NearUnattained };

struct KktResiduals {
  double primal = 0.0;
  double dual = 0.0;
  double complementarity = 0.0;
  double scale = 1.0;
  bool pass = false;
};

struct Solution {
  SymMatrix X = SymMatrix::zero(1);
  double objective = 0.0;
  double dual_objective = 0.0;
  int numerical_rank = 0;
  Eigen::VectorXd mu;
  SolveStatus status = SolveStatus::Optimal;
  KktResiduals kkt;
  // KKT residuals of the problem restricted to its strictly feasible face;
  // set when b_i = 0 constraints were eliminated, since the full dual need
  // not be attained then.
  std::optional<KktResiduals> reduced_kkt;
  std::optional<Eigen::VectorXd> ray;  // set when Unbounded
  std::string route;
  bool certified = true;
  std::vector<double> path_values;  // OPT(eps) along the perturbation schedule
  double path_estimate = 0.0;       // |last two path values|
  int iterations = 0;
};

struct CombinedSolution {
  SymMatrix X = SymMatrix::zero(1);
  std::optional<SymMatrix> Y;
  Eigen::VectorXd lambda;
  double objective = 0.0;
  SolveStatus status = SolveStatus::Optimal;
  std::vector<double> eta;
  std::vector<double> gamma;  // value along the eta schedule
  std::vector<int> ranks;     // rank of X at each eta
  Eigen::VectorXd mu;         // dual at the last eta
  std::string route;
};

using Problem = std::variant<PackingProblem, CombinedProblem, DesignProblem>;

std::string_view to_string(SolveStatus status);
std::string_view to_string(Criterion criterion);

/// Parses and validates. Throws SchemaError for malformed documents and
/// ValidationError / DimensionMismatch for invalid data.
Problem parse_problem(std::string_view text);
PackingProblem parse_packing(std::string_view text);
Solution parse_solution(std::string_view text);
CombinedSolution parse_combined_solution(std::string_view text);

std::string serialize(const PackingProblem& p);
std::string serialize(const CombinedProblem& p);
std::string serialize(const DesignProblem& p);
std::string serialize(const Solution& s);
std::string serialize(const CombinedSolution& s);
std::string serialize(const Problem& p);

}  // namespace sdpack
