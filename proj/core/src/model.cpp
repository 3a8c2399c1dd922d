#include "sdpack/model.hpp"

#include <cmath>
#include <string>

#include "model_json.hpp"
#include "sdpack/error.hpp"

namespace sdpack {

using json_support::json;

namespace {

void require_psd(const SymMatrix& m, const std::string& what, std::optional<int> index) {
  const PsdCheck chk = is_psd(m);
  if (!chk.psd) {
    throw Error(ErrorCode::ValidationError, what + " is not positive semidefinite",
                Witness{.eigenvalue = chk.min_eigenvalue, .index = index});
  }
}

void require_dim(long expected, long got, const std::string& what) {
  if (expected != got) {
    throw Error(ErrorCode::DimensionMismatch, what,
                Witness{.dimensions = std::pair<long, long>{expected, got}});
  }
}

void require_factor(const Eigen::MatrixXd& A, const SymMatrix& M, int index) {
  require_dim(M.dim(), A.cols(), "factor A_" + std::to_string(index) + " has wrong column count");
  const double err = (A.transpose() * A - M.mat()).norm();
  if (err > 1e-8 * std::max(1.0, M.frobenius())) {
    throw Error(ErrorCode::ValidationError,
                "A_" + std::to_string(index) + "^T A_" + std::to_string(index) + " does not match M_" +
                    std::to_string(index),
                Witness{.index = index});
  }
}

}  // namespace

Eigen::VectorXd PackingProblem::rhs() const {
  Eigen::VectorXd b(size());
  for (long i = 0; i < size(); ++i) b(i) = constraints[static_cast<std::size_t>(i)].b;
  return b;
}

SymMatrix PackingProblem::constraint_sum() const {
  SymMatrix s = SymMatrix::zero(dim());
  for (const auto& c : constraints) s += c.M;
  return s;
}

void PackingProblem::validate() const {
  if (constraints.empty()) throw Error(ErrorCode::ValidationError, "at least one constraint is required");
  require_psd(C, "C", std::nullopt);
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    const int idx = static_cast<int>(i) + 1;
    const auto& c = constraints[i];
    require_dim(dim(), c.M.dim(), "M_" + std::to_string(idx) + " has wrong dimension");
    if (!std::isfinite(c.b)) throw Error(ErrorCode::ValidationError, "b is not finite", Witness{.index = idx});
    require_psd(c.M, "M_" + std::to_string(idx), idx);
    if (c.A) require_factor(*c.A, c.M, idx);
  }
}

void CombinedProblem::validate() const {
  const long l = size();
  if (l < 1) throw Error(ErrorCode::ValidationError, "at least one constraint is required");
  require_psd(C, "C", std::nullopt);
  for (long i = 0; i < l; ++i) {
    const int idx = static_cast<int>(i) + 1;
    require_dim(dim(), M[static_cast<std::size_t>(i)].dim(), "M_" + std::to_string(idx) + " has wrong dimension");
    require_psd(M[static_cast<std::size_t>(i)], "M_" + std::to_string(idx), idx);
  }
  require_dim(l, b.size(), "b has wrong length");
  if (!b.allFinite() || !h0.allFinite() || !H.allFinite()) {
    throw Error(ErrorCode::ValidationError, "non-finite vector data");
  }
  if (R0) {
    require_dim(l, static_cast<long>(R.size()), "R must have one matrix per constraint");
    for (long i = 0; i < l; ++i) {
      require_dim(R0->dim(), R[static_cast<std::size_t>(i)].dim(), "R_" + std::to_string(i + 1) + " has wrong dimension");
    }
  } else if (!R.empty()) {
    throw Error(ErrorCode::ValidationError, "R given without R0");
  }
  require_dim(h0.size(), H.rows(), "H row count must equal the length of h0");
  require_dim(l, H.cols(), "H must have one column per constraint");
}

void DesignProblem::validate() const {
  const long l = size();
  if (l < 1) throw Error(ErrorCode::ValidationError, "at least one experiment is required");
  if (K.cols() < 1 || K.rows() < 1) throw Error(ErrorCode::ValidationError, "K must have at least one column");
  if (!K.allFinite()) throw Error(ErrorCode::ValidationError, "K is not finite");
  if (criterion == Criterion::COptimal && K.cols() != 1) {
    throw Error(ErrorCode::ValidationError, "c-optimal design needs a single column",
                Witness{.dimensions = std::pair<long, long>{1, K.cols()}});
  }
  for (long i = 0; i < l; ++i) {
    const int idx = static_cast<int>(i) + 1;
    require_dim(dim(), M[static_cast<std::size_t>(i)].dim(), "M_" + std::to_string(idx) + " has wrong dimension");
    require_psd(M[static_cast<std::size_t>(i)], "M_" + std::to_string(idx), idx);
    if (A) require_factor((*A)[static_cast<std::size_t>(i)], M[static_cast<std::size_t>(i)], idx);
  }
  if (A) require_dim(l, static_cast<long>(A->size()), "A must have one matrix per experiment");
  if (resource) {
    require_dim(l, resource->P.cols(), "P must have one column per experiment");
    require_dim(resource->P.rows(), resource->d.size(), "d must have one entry per row of P");
    if (!resource->P.allFinite() || !resource->d.allFinite()) {
      throw Error(ErrorCode::ValidationError, "resource block is not finite");
    }
    for (long r = 0; r < resource->P.rows(); ++r) {
      for (long c = 0; c < resource->P.cols(); ++c) {
        if (resource->P(r, c) < 0.0) {
          throw Error(ErrorCode::ValidationError, "P has a negative entry",
                      Witness{.index = static_cast<int>(c) + 1,
                              .dimensions = std::pair<long, long>{r + 1, c + 1}});
        }
      }
    }
  }
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Unbounded: return "Unbounded";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::AsymptoticSup: return "AsymptoticSup";
    case SolveStatus::NearUnattained: return "NearUnattained";
  }
  return "Unknown";
}

std::string_view to_string(Criterion criterion) {
  switch (criterion) {
    case Criterion::COptimal: return "c";
    case Criterion::AOptimal: return "a";
    case Criterion::EOptimal: return "e";
  }
  return "?";
}

namespace {

SolveStatus status_from(const std::string& s) {
  for (SolveStatus st : {SolveStatus::Optimal, SolveStatus::Unbounded, SolveStatus::Infeasible,
                         SolveStatus::AsymptoticSup, SolveStatus::NearUnattained}) {
    if (to_string(st) == s) return st;
  }
  json_support::schema_error("unknown status \"" + s + "\"");
}

Criterion criterion_from(const json& j) {
  if (!j.is_string()) json_support::schema_error("criterion must be a string");
  const std::string s = j.get<std::string>();
  if (s == "c") return Criterion::COptimal;
  if (s == "a") return Criterion::AOptimal;
  if (s == "e") return Criterion::EOptimal;
  json_support::schema_error("criterion must be one of \"c\", \"a\", \"e\"");
}

std::string kind_of(const json& j) {
  if (!j.is_object()) json_support::schema_error("document must be a JSON object");
  const json& k = json_support::field(j, "kind");
  if (!k.is_string()) json_support::schema_error("\"kind\" must be a string");
  return k.get<std::string>();
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    json_support::schema_error(std::string("malformed JSON: ") + e.what());
  }
}

std::vector<SymMatrix> sym_list(const json& j, const std::string& what) {
  if (!j.is_array()) json_support::schema_error(what + " must be an array of matrices");
  std::vector<SymMatrix> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(json_support::sym_from(j[i], what + "_" + std::to_string(i + 1)));
  return out;
}

json sym_list_json(const std::vector<SymMatrix>& v) {
  json out = json::array();
  for (const auto& m : v) out.push_back(json_support::to_json(m));
  return out;
}

CombinedProblem combined_from_json(const json& j) {
  using namespace json_support;
  const json& cons = field(j, "constraints");
  if (!cons.is_array()) schema_error("\"constraints\" must be an array");
  CombinedProblem p{sym_from(field(j, "C"), "C"), {}, std::nullopt, {}, {}, {}, {}};
  const long l = static_cast<long>(cons.size());
  p.b.resize(l);
  for (long i = 0; i < l; ++i) {
    const json& c = cons[static_cast<std::size_t>(i)];
    p.M.push_back(sym_from(field(c, "M"), "M_" + std::to_string(i + 1)));
    p.b(i) = number(field(c, "b"), "b");
  }
  if (j.contains("R0")) p.R0 = sym_from(j.at("R0"), "R0");
  if (j.contains("R")) p.R = sym_list(j.at("R"), "R");
  p.h0 = j.contains("h0") ? vector_from(j.at("h0"), "h0") : Eigen::VectorXd(0);
  const long q = p.h0.size();
  p.H = Eigen::MatrixXd::Zero(q, l);
  if (j.contains("h")) {
    const json& h = j.at("h");
    if (!h.is_array() || static_cast<long>(h.size()) != l) schema_error("\"h\" must have one vector per constraint");
    for (long i = 0; i < l; ++i) {
      const Eigen::VectorXd hi = vector_from(h[static_cast<std::size_t>(i)], "h_" + std::to_string(i + 1));
      require_dim(q, hi.size(), "h_" + std::to_string(i + 1) + " has wrong length");
      p.H.col(i) = hi;
    }
  }
  if (j.contains("H")) {
    const Eigen::MatrixXd H = q == 0 ? Eigen::MatrixXd::Zero(0, l) : matrix_from(j.at("H"), "H");
    if (H.rows() != q || H.cols() != l) {
      throw Error(ErrorCode::DimensionMismatch, "H has wrong shape",
                  Witness{.dimensions = std::pair<long, long>{H.rows(), H.cols()}});
    }
    if (j.contains("h") && (H - p.H).cwiseAbs().maxCoeff() > 0.0) {
      throw Error(ErrorCode::ValidationError, "H disagrees with the columns h_i");
    }
    p.H = H;
  }
  p.validate();
  return p;
}

json combined_to_json(const CombinedProblem& p) {
  using namespace json_support;
  json j;
  j["kind"] = "combined";
  j["C"] = to_json(p.C);
  json cons = json::array();
  for (long i = 0; i < p.size(); ++i) {
    cons.push_back({{"M", to_json(p.M[static_cast<std::size_t>(i)])}, {"b", p.b(i)}});
  }
  j["constraints"] = cons;
  if (p.R0) {
    j["R0"] = to_json(*p.R0);
    j["R"] = sym_list_json(p.R);
  }
  j["h0"] = to_json(p.h0);
  json h = json::array();
  for (long i = 0; i < p.size(); ++i) h.push_back(to_json(Eigen::VectorXd(p.H.col(i))));
  j["h"] = h;
  return j;
}

DesignProblem design_from_json(const json& j) {
  using namespace json_support;
  DesignProblem d;
  if (j.contains("A")) {
    const json& a = j.at("A");
    if (!a.is_array()) schema_error("\"A\" must be an array of matrices");
    std::vector<Eigen::MatrixXd> maps;
    for (std::size_t i = 0; i < a.size(); ++i) maps.push_back(matrix_from(a[i], "A_" + std::to_string(i + 1)));
    if (j.contains("M")) {
      d.M = sym_list(j.at("M"), "M");
    } else {
      for (std::size_t i = 0; i < maps.size(); ++i) {
        if (maps[i].rows() == 0) schema_error("A_" + std::to_string(i + 1) + " is empty");
        d.M.push_back(SymMatrix(maps[i].transpose() * maps[i]));
      }
    }
    d.A = std::move(maps);
  } else if (j.contains("M")) {
    d.M = sym_list(j.at("M"), "M");
  } else {
    schema_error("design needs \"A\" or \"M\"");
  }
  if (j.contains("K")) {
    d.K = matrix_from(j.at("K"), "K");
  } else if (j.contains("c")) {
    d.K = vector_from(j.at("c"), "c");
  } else {
    schema_error("design needs \"K\" or \"c\"");
  }
  d.criterion = criterion_from(field(j, "criterion"));
  if (j.contains("resource")) {
    const json& r = j.at("resource");
    ResourceBlock rb{matrix_from(field(r, "P"), "P"), vector_from(field(r, "d"), "d")};
    d.resource = std::move(rb);
  }
  if (d.M.empty()) schema_error("design needs at least one experiment");
  if (d.K.rows() != d.M.front().dim()) {
    throw Error(ErrorCode::DimensionMismatch, "K row count must equal the parameter dimension",
                Witness{.dimensions = std::pair<long, long>{d.M.front().dim(), d.K.rows()}});
  }
  d.validate();
  return d;
}

json design_to_json(const DesignProblem& d) {
  using namespace json_support;
  json j;
  j["kind"] = "design";
  if (d.A) {
    json a = json::array();
    for (const auto& m : *d.A) a.push_back(to_json(m));
    j["A"] = a;
  }
  j["M"] = sym_list_json(d.M);
  j["K"] = to_json(d.K);
  j["criterion"] = std::string(to_string(d.criterion));
  if (d.resource) j["resource"] = {{"P", to_json(d.resource->P)}, {"d", to_json(d.resource->d)}};
  return j;
}

json combined_solution_to_json(const CombinedSolution& s) {
  using namespace json_support;
  json j;
  j["kind"] = "combined_solution";
  j["status"] = std::string(to_string(s.status));
  j["objective"] = s.objective;
  j["X"] = to_json(s.X);
  if (s.Y) j["Y"] = to_json(*s.Y);
  j["lambda"] = to_json(s.lambda);
  j["eta"] = s.eta;
  j["gamma"] = s.gamma;
  j["ranks"] = s.ranks;
  j["mu"] = to_json(s.mu);
  j["route"] = s.route;
  return j;
}

}  // namespace

namespace json_support {

json packing_to_json(const PackingProblem& p) {
  json j;
  j["kind"] = "packing";
  j["C"] = to_json(p.C);
  json cons = json::array();
  for (const auto& c : p.constraints) {
    json e{{"M", to_json(c.M)}, {"b", c.b}};
    if (c.A) e["A"] = to_json(*c.A);
    cons.push_back(std::move(e));
  }
  j["constraints"] = cons;
  return j;
}

PackingProblem packing_from_json(const json& j) {
  const json& cons = field(j, "constraints");
  if (!cons.is_array()) schema_error("\"constraints\" must be an array");
  PackingProblem p{sym_from(field(j, "C"), "C"), {}};
  for (std::size_t i = 0; i < cons.size(); ++i) {
    const json& c = cons[i];
    const std::string tag = std::to_string(i + 1);
    std::optional<Eigen::MatrixXd> A;
    if (c.contains("A")) A = matrix_from(c.at("A"), "A_" + tag);
    std::optional<SymMatrix> M;
    if (c.contains("M")) {
      M = sym_from(c.at("M"), "M_" + tag);
    } else if (A && A->rows() > 0) {
      M = SymMatrix(A->transpose() * *A);
    } else {
      schema_error("constraint " + tag + " needs \"M\" or \"A\"");
    }
    if (A && A->rows() == 0) A = Eigen::MatrixXd::Zero(0, M->dim());
    p.constraints.push_back({*M, number(field(c, "b"), "b_" + tag), A});
  }
  p.validate();
  return p;
}

namespace {

json kkt_to_json(const KktResiduals& k) {
  return {{"primal", k.primal}, {"dual", k.dual}, {"complementarity", k.complementarity}, {"scale", k.scale},
          {"pass", k.pass}};
}

KktResiduals kkt_from_json(const json& k, const std::string& what) {
  KktResiduals r;
  r.primal = number(field(k, "primal"), what + ".primal");
  r.dual = number(field(k, "dual"), what + ".dual");
  r.complementarity = number(field(k, "complementarity"), what + ".complementarity");
  if (k.contains("scale")) r.scale = number(k.at("scale"), what + ".scale");
  if (k.contains("pass")) r.pass = k.at("pass").get<bool>();
  return r;
}

}  // namespace

json solution_to_json(const Solution& s) {
  json j;
  j["kind"] = "solution";
  j["status"] = std::string(to_string(s.status));
  j["objective"] = s.objective;
  j["dual_objective"] = s.dual_objective;
  j["numerical_rank"] = s.numerical_rank;
  j["X"] = to_json(s.X);
  j["mu"] = to_json(s.mu);
  j["kkt"] = kkt_to_json(s.kkt);
  if (s.reduced_kkt) j["reduced_kkt"] = kkt_to_json(*s.reduced_kkt);
  if (s.ray) j["ray"] = to_json(*s.ray);
  j["route"] = s.route;
  j["certified"] = s.certified;
  j["path_values"] = s.path_values;
  j["path_estimate"] = s.path_estimate;
  j["iterations"] = s.iterations;
  return j;
}

Solution solution_from_json(const json& j) {
  Solution s;
  const json& st = field(j, "status");
  if (!st.is_string()) schema_error("\"status\" must be a string");
  s.status = status_from(st.get<std::string>());
  s.objective = number(field(j, "objective"), "objective");
  s.X = sym_from(field(j, "X"), "X");
  s.mu = vector_from(field(j, "mu"), "mu");
  if (j.contains("dual_objective")) s.dual_objective = number(j.at("dual_objective"), "dual_objective");
  if (j.contains("numerical_rank")) s.numerical_rank = j.at("numerical_rank").get<int>();
  if (j.contains("kkt")) s.kkt = kkt_from_json(j.at("kkt"), "kkt");
  if (j.contains("reduced_kkt")) s.reduced_kkt = kkt_from_json(j.at("reduced_kkt"), "reduced_kkt");
  if (j.contains("ray")) s.ray = vector_from(j.at("ray"), "ray");
  if (j.contains("route")) s.route = j.at("route").get<std::string>();
  if (j.contains("certified")) s.certified = j.at("certified").get<bool>();
  if (j.contains("path_values")) s.path_values = j.at("path_values").get<std::vector<double>>();
  if (j.contains("path_estimate")) s.path_estimate = number(j.at("path_estimate"), "path_estimate");
  if (j.contains("iterations")) s.iterations = j.at("iterations").get<int>();
  return s;
}

}  // namespace json_support

Problem parse_problem(std::string_view text) {
  const json j = parse_json(text);
  const std::string kind = kind_of(j);
  try {
    if (kind == "packing") return json_support::packing_from_json(j);
    if (kind == "combined") return combined_from_json(j);
    if (kind == "design") return design_from_json(j);
  } catch (const json::exception& e) {
    json_support::schema_error(e.what());
  }
  json_support::schema_error("unknown kind \"" + kind + "\"");
}

PackingProblem parse_packing(std::string_view text) {
  Problem p = parse_problem(text);
  if (auto* pk = std::get_if<PackingProblem>(&p)) return std::move(*pk);
  json_support::schema_error("expected a packing problem");
}

Solution parse_solution(std::string_view text) {
  const json j = parse_json(text);
  if (kind_of(j) != "solution") json_support::schema_error("expected a solution document");
  try {
    return json_support::solution_from_json(j);
  } catch (const json::exception& e) {
    json_support::schema_error(e.what());
  }
}

CombinedSolution parse_combined_solution(std::string_view text) {
  using namespace json_support;
  const json j = parse_json(text);
  if (kind_of(j) != "combined_solution") schema_error("expected a combined solution document");
  try {
    CombinedSolution s;
    s.status = status_from(field(j, "status").get<std::string>());
    s.objective = number(field(j, "objective"), "objective");
    s.X = sym_from(field(j, "X"), "X");
    if (j.contains("Y")) s.Y = sym_from(j.at("Y"), "Y");
    s.lambda = vector_from(field(j, "lambda"), "lambda");
    if (j.contains("eta")) s.eta = j.at("eta").get<std::vector<double>>();
    if (j.contains("gamma")) s.gamma = j.at("gamma").get<std::vector<double>>();
    if (j.contains("ranks")) s.ranks = j.at("ranks").get<std::vector<int>>();
    if (j.contains("mu")) s.mu = vector_from(j.at("mu"), "mu");
    if (j.contains("route")) s.route = j.at("route").get<std::string>();
    return s;
  } catch (const json::exception& e) {
    schema_error(e.what());
  }
}

std::string serialize(const PackingProblem& p) { return json_support::packing_to_json(p).dump(2); }
std::string serialize(const CombinedProblem& p) { return combined_to_json(p).dump(2); }
std::string serialize(const DesignProblem& p) { return design_to_json(p).dump(2); }
std::string serialize(const Solution& s) { return json_support::solution_to_json(s).dump(2); }
std::string serialize(const CombinedSolution& s) { return combined_solution_to_json(s).dump(2); }

std::string serialize(const Problem& p) {
  return std::visit([](const auto& x) { return serialize(x); }, p);
}

}  // namespace sdpack
