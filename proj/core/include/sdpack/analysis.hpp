#pragma once

#include <Eigen/Dense>
#include <optional>

#include "sdpack/model.hpp"

namespace sdpack {

struct FeasibilityResult {
  bool feasible = true;
  std::optional<int> index;  // 1-based index of the most negative b_i
};

/// Feasible iff every b_i >= 0; X = 0 is then a witness.
FeasibilityResult check_feasible(const PackingProblem& p);

struct BoundednessCertificate {
  bool bounded = true;
  double lambda = 0.0;                // bounded: lambda * sum M_i - C is psd
  std::optional<Eigen::VectorXd> ray;  // unbounded: unit h with M_i h = 0 and h'Ch > 0
  double ray_gain = 0.0;               // h'Ch
  double range_residual = 0.0;         // max_k |(I - P) c_k| / |c_k|
};

BoundednessCertificate check_bounded(const PackingProblem& p);

/// sum_k c_k' (sum M_i)^+ c_k, where C = sum_k c_k c_k'. Throws
/// RangeInclusionFails when Im C is not contained in Im sum M_i.
double dual_scalar_bound(const PackingProblem& p);

/// floor((sqrt(8l + 1) - 1) / 2)
int barvinok_pataki(long l);

struct GapBound {
  long l = 0;
  long mu_bar = 0;  // min(l, max_i rank M_i)
  double factor = 0.0;
  bool degenerate = false;  // mu_bar == 0, factor undefined
};

/// Ratio between the packing optimum and its best rank-one value:
/// 2 ln(2 l mu_bar).
GapBound nrt_bound(const PackingProblem& p);

/// Relative threshold of the range-inclusion test.
inline constexpr double kRangeTol = 1e-8;

}  // namespace sdpack
