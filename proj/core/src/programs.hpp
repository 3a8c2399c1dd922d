#pragma once

// Cone-program assembly for the problem families. Internal.

#include "sdpack/conic.hpp"
#include "sdpack/model.hpp"
#include "sdpack/reduce.hpp"

namespace sdpack::programs {

/// Columns svec(M_i).
Eigen::MatrixXd svec_columns(const std::vector<SymMatrix>& ms, long n);

/// min -<C, X>  s.t. <M_i + shift I, X> <= b_i, X psd.
/// Variables svec(X); rows: l inequalities, then the psd block.
conic::ConeProgram packing(const PackingProblem& p, double shift = 0.0);

/// SOCP in cone form: inequality rows first, then one cone per SocCone.
conic::ConeProgram socp(const SocpProblem& s);

/// Dual of a combined problem with variables mu. With objective = false the
/// program is a pure feasibility problem.
conic::ConeProgram combined_dual(const CombinedProblem& p, bool objective);

/// Trace-capped primal with variables [svec X, svec Y, lambda]:
/// rows: l constraints, the cap eta (tr X + tr Y) <= 1, psd X, psd Y.
conic::ConeProgram combined_eta(const CombinedProblem& p, double eta);

}  // namespace sdpack::programs
