#pragma once

// Reference computations that do not go through the library's solvers, plus
// seeded instance generators shared by the unit and acceptance tests.

#include <Eigen/Dense>
#include <functional>
#include <random>
#include <vector>

#include "sdpack/model.hpp"

namespace sdpack::oracle {

// Textbook infeasible-start primal-dual path following (HKM direction,
// Mehrotra-style centering) on the packing problem, written against plain
// Eigen. The problem is first restricted to Im(sum M_i), where the dual has
// an interior point.
struct DenseReference {
  double value = 0.0;       // primal objective
  double dual_value = 0.0;  // b'y
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  bool converged = false;
  int iterations = 0;
};
DenseReference reference_sdp(const PackingProblem& p, double tol = 1e-10, int max_iter = 200);

// min over w in the simplex (two experiments, w = (s, 1-s), grid step h) of
// the given criterion of (w1 M1 + w2 M2); returns {value, s}.
struct GridResult {
  double value = 0.0;
  Eigen::VectorXd w;
};
GridResult grid_two_experiments(const Eigen::MatrixXd& M1, const Eigen::MatrixXd& M2,
                                const std::function<double(const Eigen::MatrixXd&)>& criterion, double h = 1e-4);

// min over the box 0 <= w_i <= cap_i (2-D grid, step h) of c'(sum w M)^+ c.
GridResult grid_box_variance(const Eigen::MatrixXd& M1, const Eigen::MatrixXd& M2, const Eigen::VectorXd& c,
                             const Eigen::Vector2d& cap, double h);

// c' A^+ c with the pseudoinverse from a fresh eigendecomposition; +inf when
// c leaves the range of A.
double pinv_quadratic(const Eigen::MatrixXd& A, const Eigen::VectorXd& c);

// Best rank-one value for n = 2: max over unit u(theta) of
// u'Cu * min_i b_i / u'M_i u, on `points` angles in [0, pi).
double rank_one_brute_force(const PackingProblem& p, int points = 10000);

// Generators. All take an explicit engine so every suite is reproducible.
using Rng = std::mt19937_64;

Eigen::MatrixXd gaussian(Rng& rng, long rows, long cols);
SymMatrix random_psd(Rng& rng, long n, long rank);

// Feasible and bounded: b_i > 0 and Im C inside Im sum M_i. Constraint
// ranks vary, so sum M_i is often singular.
PackingProblem random_bounded_packing(Rng& rng, long n, long l, long rank_c);

// C lives on span(e_1..e_k), every M_i on the orthogonal complement.
PackingProblem random_unbounded_packing(Rng& rng, long n, long l);

// Some b_i = 0 and sum M_i rank deficient; still feasible and bounded.
// Needs n >= 3 and l >= 2.
PackingProblem random_zero_rhs_packing(Rng& rng, long n, long l);

}  // namespace sdpack::oracle
