#pragma once

// Shared plumbing for the solve sources. Internal.

#include <algorithm>
#include <vector>

#include "sdpack/conic.hpp"
#include "sdpack/solve.hpp"

namespace sdpack::solve_detail {

inline conic::ConeOptions cone_options(const SolveOptions& opts, double tol) {
  conic::ConeOptions c;
  c.abstol = tol;
  c.reltol = tol;
  c.feastol = tol;
  c.max_iter = opts.max_iter;
  return c;
}

inline conic::ConeOptions cone_options(const SolveOptions& opts) { return cone_options(opts, opts.tol); }

// Path points are solved tighter than the user tolerance so the 1e-9
// monotonicity check compares converged values, not IPM noise.
inline double path_tol(const SolveOptions& opts) { return std::min(opts.tol, 1e-10); }

// KKT tolerance for returned solutions.
inline double kkt_tol(const SolveOptions& opts) { return std::max(1e-6, 10.0 * opts.tol); }

// Tight solve first, then the user tolerance if the tight one stalls.
conic::ConeResult solve_tight(const conic::ConeProgram& cp, const SolveOptions& opts);

// Top eigenvectors of X whose eigenvalues exceed threshold * lambda_max,
// at most cap of them.
Eigen::MatrixXd leading_vectors(const SymMatrix& X, double threshold, long cap);

// Least-squares correction of mu so that (sum mu M - C) vanishes on the range
// of X, with mu_i = 0 on constraints that have slack. Returns whichever of
// the input and the corrected mu has the smaller KKT residual.
Eigen::VectorXd refine_dual(const PackingProblem& p, const SymMatrix& X, const Eigen::VectorXd& mu,
                            double rank_threshold);

// Multipliers for b_i = 0 constraints cost nothing in the objective; picks
// a common value for them that makes the full dual as feasible as possible.
Eigen::VectorXd complete_mu(const PackingProblem& p, const SymMatrix& X, Eigen::VectorXd mu,
                            const std::vector<int>& zero_rhs, double tol);

struct KktPoint {
  SymMatrix X;
  Eigen::VectorXd mu;
};

// Newton iteration on the factorized KKT system X = R R', (sum mu M - C) R = 0,
// <M_i, R R'> = b_i on the active set. Width of R is the numerical rank of X.
// Returns the input when the result does not lower the KKT residual.
KktPoint newton_polish(const PackingProblem& p, const SymMatrix& X, const Eigen::VectorXd& mu,
                       double rank_threshold);

}  // namespace sdpack::solve_detail
