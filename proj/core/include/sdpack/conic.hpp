#pragma once

// Dense primal-dual interior-point solver for linear cone programs
//
//   minimize    c'x
//   subject to  G x + s = h,  A x = b,  s in K
//
// with dual
//
//   maximize    -h'z - b'y
//   subject to  G'z + A'y + c = 0,  z in K.
//
// K is a product of a nonnegative orthant, second-order cones
// {(u0, u1) : u0 >= ||u1||} and positive semidefinite cones. PSD blocks are
// stored in svec form (see linalg.hpp), so every inner product is a plain dot
// product. The iteration is a homogeneous self-dual embedding with
// Nesterov-Todd scaling and a Mehrotra predictor-corrector step; it returns
// certificates when the primal or the dual is infeasible.

#include <Eigen/Dense>
#include <vector>

namespace sdpack::conic {

struct ConeDims {
  long nonneg = 0;
  std::vector<long> soc;  // cone dimensions, each >= 1
  std::vector<long> psd;  // matrix orders, each >= 1

  long total() const;
  /// Barrier degree: nonneg + #soc + sum of psd orders.
  long degree() const;
};

struct ConeProgram {
  Eigen::VectorXd c;
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
  Eigen::MatrixXd A;  // may have zero rows
  Eigen::VectorXd b;
  ConeDims dims;

  long num_vars() const { return c.size(); }
};

enum class ConeStatus { Optimal, PrimalInfeasible, DualInfeasible, MaxIterations, NumericalFailure };

const char* to_string(ConeStatus status);

struct ConeOptions {
  double abstol = 1e-8;
  double reltol = 1e-8;
  double feastol = 1e-8;
  int max_iter = 200;
  int refinement = 1;
};

struct ConeResult {
  ConeStatus status = ConeStatus::NumericalFailure;
  // On Optimal: a primal-dual solution. On PrimalInfeasible: (y, z) with
  // G'z + A'y ~ 0 and h'z + b'y = -1. On DualInfeasible: (x, s) with
  // Gx + s ~ 0, Ax ~ 0 and c'x = -1. Otherwise the last iterate divided by tau.
  Eigen::VectorXd x, y, s, z;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double gap = 0.0;
  double relative_gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
};

ConeResult solve(const ConeProgram& program, const ConeOptions& options = {});

// Jordan-algebra helpers, exposed for testing.
namespace detail {

/// max alpha >= 0 such that lambda + alpha * d stays in the cone (lambda
/// must be the NT-scaled point; for PSD blocks it is diagonal). Returns +inf
/// when the ray never leaves the cone.
double max_step(const Eigen::VectorXd& lambda, const Eigen::VectorXd& d, const ConeDims& dims);

Eigen::VectorXd jordan_product(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                               const ConeDims& dims);

Eigen::VectorXd identity_element(const ConeDims& dims);

/// Nesterov-Todd scaling for interior s, z: W with W z = W^{-T} s = lambda.
struct Scaling {
  Eigen::MatrixXd W;
  Eigen::MatrixXd Winv;
  Eigen::VectorXd lambda;
  std::vector<Eigen::VectorXd> psd_eigs;  // lambda blocks of the psd cones
};

/// Throws sdpack::Error(NumericalFailure) when s or z leaves the interior.
Scaling nt_scaling(const Eigen::VectorXd& s, const Eigen::VectorXd& z, const ConeDims& dims);

}  // namespace detail

}  // namespace sdpack::conic
