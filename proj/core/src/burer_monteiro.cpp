#include <ceres/ceres.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "sdpack/analysis.hpp"
#include "sdpack/error.hpp"
#include "sdpack/solve.hpp"
#include "solve_common.hpp"

namespace sdpack {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Augmented Lagrangian in R for X = R R':
//   -<C, RR'> + (1 / 2rho) sum_i (max(0, y_i + rho g_i)^2 - y_i^2),
//   g_i = <M_i, RR'> - b_i.
class AugmentedLagrangian final : public ceres::FirstOrderFunction {
 public:
  AugmentedLagrangian(const PackingProblem& p, long width, const VectorXd& y, double rho)
      : p_(p), n_(p.dim()), k_(width), y_(y), rho_(rho) {}

  bool Evaluate(const double* params, double* cost, double* gradient) const override {
    const Eigen::Map<const MatrixXd> R(params, n_, k_);
    const MatrixXd CR = p_.C.mat() * R;
    double f = -R.cwiseProduct(CR).sum();
    MatrixXd G = -2.0 * CR;
    for (long i = 0; i < p_.size(); ++i) {
      const auto& c = p_.constraints[static_cast<std::size_t>(i)];
      const MatrixXd MR = c.M.mat() * R;
      const double g = R.cwiseProduct(MR).sum() - c.b;
      const double m = std::max(0.0, y_(i) + rho_ * g);
      f += (m * m - y_(i) * y_(i)) / (2.0 * rho_);
      if (m > 0.0) G += 2.0 * m * MR;
    }
    *cost = f;
    if (gradient != nullptr) Eigen::Map<MatrixXd>(gradient, n_, k_) = G;
    return std::isfinite(f);
  }

  int NumParameters() const override { return static_cast<int>(n_ * k_); }

 private:
  const PackingProblem& p_;
  long n_;
  long k_;
  VectorXd y_;
  double rho_;
};

VectorXd constraint_values(const PackingProblem& p, const MatrixXd& R) {
  VectorXd g(p.size());
  for (long i = 0; i < p.size(); ++i) {
    const auto& c = p.constraints[static_cast<std::size_t>(i)];
    g(i) = R.cwiseProduct(c.M.mat() * R).sum() - c.b;
  }
  return g;
}

}  // namespace

Solution solve_burer_monteiro(const PackingProblem& p, const SolveOptions& opts, std::optional<int> width) {
  opts.validate();
  p.validate();
  const FeasibilityResult feas = check_feasible(p);
  if (!feas.feasible) throw Error(ErrorCode::InfeasibleInput, "some b_i is negative", Witness{.index = feas.index});
  if (!check_bounded(p).bounded) {
    throw Error(ErrorCode::UnboundedInput, "range of C is not contained in the range of sum M_i");
  }
  const long n = p.dim();
  const long k = width ? *width : std::max(1, rank_tol(p.C));
  if (k < 1 || k > n) {
    throw Error(ErrorCode::InvalidInput, "factor width must lie in [1, n]",
                Witness{.dimensions = std::pair<long, long>{n, k}});
  }

  // Deterministic start, scaled to sit inside every constraint with b_i > 0.
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal;
  MatrixXd R(n, k);
  for (long j = 0; j < R.size(); ++j) R.data()[j] = normal(rng);
  double worst = 0.0;
  for (const auto& c : p.constraints) {
    const double used = R.cwiseProduct(c.M.mat() * R).sum();
    if (c.b > 0.0) worst = std::max(worst, used / c.b);
  }
  if (worst > 0.0) R *= std::sqrt(0.5 / worst);

  const VectorXd b = p.rhs();
  const double scale = std::max({1.0, p.C.frobenius(), b.size() > 0 ? b.cwiseAbs().maxCoeff() : 0.0});
  VectorXd y = VectorXd::Zero(p.size());
  double rho = 10.0 / scale;
  double prev_viol = std::numeric_limits<double>::infinity();
  int iterations = 0;

  ceres::GradientProblemSolver::Options copt;
  copt.line_search_direction_type = ceres::LBFGS;
  copt.max_num_iterations = 2000;
  copt.function_tolerance = 1e-15;
  copt.gradient_tolerance = 1e-13;
  copt.parameter_tolerance = 1e-15;
  copt.logging_type = ceres::SILENT;
  copt.minimizer_progress_to_stdout = false;

  for (int outer = 0; outer < opts.max_iter; ++outer) {
    ceres::GradientProblem problem(new AugmentedLagrangian(p, k, y, rho));
    ceres::GradientProblemSolver::Summary summary;
    ceres::Solve(copt, problem, R.data(), &summary);
    iterations += static_cast<int>(summary.iterations.size());

    const VectorXd g = constraint_values(p, R);
    const VectorXd y_next = (y + rho * g).cwiseMax(0.0);
    const double viol = std::max(0.0, g.size() > 0 ? g.maxCoeff() : 0.0);
    const double comp = g.size() > 0 ? y_next.cwiseProduct(g).cwiseAbs().maxCoeff() : 0.0;
    const double step = (y_next - y).cwiseAbs().maxCoeff();
    y = y_next;
    if (viol <= opts.tol * scale && comp <= opts.tol * scale && step <= std::sqrt(opts.tol) * std::max(1.0, y.norm())) {
      break;
    }
    if (viol > 0.25 * prev_viol) rho = std::min(rho * 10.0, 1e10 / scale);
    prev_viol = viol;
  }

  Solution sol;
  sol.route = "bm";
  sol.X = SymMatrix(R * R.transpose());
  sol.mu = y;
  sol.objective = p.C.inner(sol.X);
  sol.dual_objective = y.dot(b);
  sol.numerical_rank = rank_tol(sol.X, opts.rank_threshold);
  sol.iterations = iterations;
  sol.kkt = kkt_check(p, sol.X, sol.mu, solve_detail::kkt_tol(opts));
  sol.certified = sol.kkt.pass;
  sol.status = SolveStatus::Optimal;
  return sol;
}

}  // namespace sdpack
