#include "sdpack/conic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "sdpack/error.hpp"
#include "sdpack/linalg.hpp"

namespace sdpack::conic {

using Eigen::MatrixXd;
using Eigen::VectorXd;

long ConeDims::total() const {
  long t = nonneg;
  for (long q : soc) t += q;
  for (long n : psd) t += svec_size(n);
  return t;
}

long ConeDims::degree() const {
  long d = nonneg + static_cast<long>(soc.size());
  for (long n : psd) d += n;
  return d;
}

const char* to_string(ConeStatus status) {
  switch (status) {
    case ConeStatus::Optimal: return "Optimal";
    case ConeStatus::PrimalInfeasible: return "PrimalInfeasible";
    case ConeStatus::DualInfeasible: return "DualInfeasible";
    case ConeStatus::MaxIterations: return "MaxIterations";
    case ConeStatus::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

namespace detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Visit each cone block with its offset.
template <class FNonneg, class FSoc, class FPsd>
void for_blocks(const ConeDims& dims, FNonneg&& on_nonneg, FSoc&& on_soc, FPsd&& on_psd) {
  long off = 0;
  if (dims.nonneg > 0) on_nonneg(off, dims.nonneg);
  off += dims.nonneg;
  for (long q : dims.soc) {
    on_soc(off, q);
    off += q;
  }
  std::size_t k = 0;
  for (long n : dims.psd) {
    on_psd(off, n, k++);
    off += svec_size(n);
  }
}

double soc_det(const VectorXd& u) { return u(0) * u(0) - u.tail(u.size() - 1).squaredNorm(); }

}  // namespace

VectorXd identity_element(const ConeDims& dims) {
  VectorXd e = VectorXd::Zero(dims.total());
  for_blocks(
      dims, [&](long off, long len) { e.segment(off, len).setOnes(); },
      [&](long off, long) { e(off) = 1.0; },
      [&](long off, long n, std::size_t) {
        e.segment(off, svec_size(n)) = svec(MatrixXd::Identity(n, n));
      });
  return e;
}

VectorXd jordan_product(const VectorXd& u, const VectorXd& v, const ConeDims& dims) {
  VectorXd w(u.size());
  for_blocks(
      dims,
      [&](long off, long len) { w.segment(off, len) = u.segment(off, len).cwiseProduct(v.segment(off, len)); },
      [&](long off, long q) {
        w(off) = u.segment(off, q).dot(v.segment(off, q));
        w.segment(off + 1, q - 1) = u(off) * v.segment(off + 1, q - 1) + v(off) * u.segment(off + 1, q - 1);
      },
      [&](long off, long n, std::size_t) {
        const long d = svec_size(n);
        const MatrixXd U = smat(u.segment(off, d), n);
        const MatrixXd V = smat(v.segment(off, d), n);
        w.segment(off, d) = svec(0.5 * (U * V + V * U));
      });
  return w;
}

// Smallest t with u + t e in the cone.
double cone_margin(const VectorXd& u, const ConeDims& dims) {
  double t = -kInf;
  for_blocks(
      dims, [&](long off, long len) { t = std::max(t, -u.segment(off, len).minCoeff()); },
      [&](long off, long q) { t = std::max(t, u.segment(off + 1, q - 1).norm() - u(off)); },
      [&](long off, long n, std::size_t) {
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(smat(u.segment(off, svec_size(n)), n),
                                                   Eigen::EigenvaluesOnly);
        t = std::max(t, -es.eigenvalues()(0));
      });
  return t;
}

double max_step(const VectorXd& lambda, const VectorXd& d, const ConeDims& dims) {
  double alpha = kInf;
  for_blocks(
      dims,
      [&](long off, long len) {
        for (long i = off; i < off + len; ++i) {
          if (d(i) < 0.0) alpha = std::min(alpha, -lambda(i) / d(i));
        }
      },
      [&](long off, long q) {
        // f(a) = (l0 + a d0)^2 - |l1 + a d1|^2 = qa a^2 + 2 qb a + qc
        const VectorXd l = lambda.segment(off, q);
        const VectorXd dd = d.segment(off, q);
        const double qa = soc_det(dd);
        const double qb = l(0) * dd(0) - l.tail(q - 1).dot(dd.tail(q - 1));
        const double qc = soc_det(l);
        const double disc = qb * qb - qa * qc;
        if (qa < 0.0 || (qb < 0.0 && disc >= 0.0)) {
          alpha = std::min(alpha, qc / (-qb + std::sqrt(std::max(disc, 0.0))));
        } else if (q == 1 && dd(0) < 0.0) {
          alpha = std::min(alpha, -l(0) / dd(0));
        }
      },
      [&](long off, long n, std::size_t) {
        const long sz = svec_size(n);
        const MatrixXd L = smat(lambda.segment(off, sz), n);
        const VectorXd isq = L.diagonal().cwiseSqrt().cwiseInverse();
        const MatrixXd D = isq.asDiagonal() * smat(d.segment(off, sz), n) * isq.asDiagonal();
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(D, Eigen::EigenvaluesOnly);
        const double mn = es.eigenvalues()(0);
        if (mn < 0.0) alpha = std::min(alpha, -1.0 / mn);
      });
  return alpha;
}

Scaling nt_scaling(const VectorXd& s, const VectorXd& z, const ConeDims& dims) {
  const long m = dims.total();
  Scaling sc;
  sc.W = MatrixXd::Zero(m, m);
  sc.Winv = MatrixXd::Zero(m, m);
  sc.lambda = VectorXd::Zero(m);
  auto fail = [] { throw Error(ErrorCode::NumericalFailure, "iterate left the cone interior"); };

  for_blocks(
      dims,
      [&](long off, long len) {
        for (long i = off; i < off + len; ++i) {
          if (!(s(i) > 0.0) || !(z(i) > 0.0)) fail();
          const double w = std::sqrt(s(i) / z(i));
          sc.W(i, i) = w;
          sc.Winv(i, i) = 1.0 / w;
          sc.lambda(i) = std::sqrt(s(i) * z(i));
        }
      },
      [&](long off, long q) {
        const VectorXd sb0 = s.segment(off, q);
        const VectorXd zb0 = z.segment(off, q);
        const double sd = soc_det(sb0);
        const double zd = soc_det(zb0);
        if (!(sd > 0.0) || !(zd > 0.0) || sb0(0) <= 0.0 || zb0(0) <= 0.0) fail();
        const VectorXd sb = sb0 / std::sqrt(sd);
        const VectorXd zb = zb0 / std::sqrt(zd);
        const double gamma = std::sqrt(0.5 * (1.0 + sb.dot(zb)));
        VectorXd w = sb;
        w.tail(q - 1) -= zb.tail(q - 1);
        w(0) += zb(0);
        w /= 2.0 * gamma;
        const double beta = std::pow(sd / zd, 0.25);
        // H = 2 v v' - J with v = (w + e) / sqrt(2 (w0 + 1)), v'Jv = 1
        VectorXd v = w;
        v(0) += 1.0;
        v /= std::sqrt(2.0 * (w(0) + 1.0));
        MatrixXd J = -MatrixXd::Identity(q, q);
        J(0, 0) = 1.0;
        const MatrixXd H = 2.0 * v * v.transpose() - J;
        const VectorXd Jw = J * v;
        const MatrixXd Hinv = 2.0 * Jw * Jw.transpose() - J;
        sc.W.block(off, off, q, q) = beta * H;
        sc.Winv.block(off, off, q, q) = Hinv / beta;
        sc.lambda.segment(off, q) = beta * (H * zb0);
      },
      [&](long off, long n, std::size_t) {
        const long sz = svec_size(n);
        Eigen::LLT<MatrixXd> c1(smat(s.segment(off, sz), n));
        Eigen::LLT<MatrixXd> c2(smat(z.segment(off, sz), n));
        if (c1.info() != Eigen::Success || c2.info() != Eigen::Success) fail();
        const MatrixXd L1 = c1.matrixL();
        const MatrixXd L2 = c2.matrixL();
        Eigen::JacobiSVD<MatrixXd> svd(L2.transpose() * L1, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const VectorXd l = svd.singularValues();
        if (!(l.minCoeff() > 0.0)) fail();
        const MatrixXd R = L1 * svd.matrixV() * l.cwiseSqrt().cwiseInverse().asDiagonal();
        const MatrixXd Rinv = l.cwiseSqrt().asDiagonal() * svd.matrixV().transpose() *
                              L1.triangularView<Eigen::Lower>().solve(MatrixXd::Identity(n, n));
        VectorXd ek = VectorXd::Zero(sz);
        for (long k = 0; k < sz; ++k) {
          ek(k) = 1.0;
          const MatrixXd E = smat(ek, n);
          sc.W.block(off, off + k, sz, 1) = svec(R.transpose() * E * R);
          sc.Winv.block(off, off + k, sz, 1) = svec(Rinv.transpose() * E * Rinv);
          ek(k) = 0.0;
        }
        sc.lambda.segment(off, sz) = svec(MatrixXd(l.asDiagonal()));
        sc.psd_eigs.push_back(l);
      });
  return sc;
}

// Solve lambda o u = v.
VectorXd jordan_divide(const Scaling& sc, const VectorXd& v, const ConeDims& dims) {
  const VectorXd& lam = sc.lambda;
  VectorXd u(v.size());
  for_blocks(
      dims,
      [&](long off, long len) { u.segment(off, len) = v.segment(off, len).cwiseQuotient(lam.segment(off, len)); },
      [&](long off, long q) {
        const double l0 = lam(off);
        const auto l1 = lam.segment(off + 1, q - 1);
        const double det = l0 * l0 - l1.squaredNorm();
        const double u0 = (l0 * v(off) - l1.dot(v.segment(off + 1, q - 1))) / det;
        u(off) = u0;
        u.segment(off + 1, q - 1) = (v.segment(off + 1, q - 1) - u0 * l1) / l0;
      },
      [&](long off, long n, std::size_t k) {
        const VectorXd& l = sc.psd_eigs[k];
        long idx = off;
        for (long j = 0; j < n; ++j) {
          for (long i = j; i < n; ++i, ++idx) u(idx) = 2.0 * v(idx) / (l(i) + l(j));
        }
      });
  return u;
}

}  // namespace detail

namespace {

using detail::Scaling;

// Factored reduced KKT system for the current scaling.
class KktSolver {
 public:
  KktSolver(const ConeProgram& p, const Scaling& sc, int refinement)
      : p_(p), sc_(sc), refinement_(refinement) {
    // Augmented form in (ux, uy, W uz); better conditioned than the normal
    // equations when the iterates approach a degenerate face.
    const MatrixXd H = sc.Winv.transpose() * p.G;
    const long n = p.num_vars();
    const long q = p.A.rows();
    const long m = H.rows();
    MatrixXd K = MatrixXd::Zero(n + q + m, n + q + m);
    K.block(0, n, n, q) = p.A.transpose();
    K.block(0, n + q, n, m) = H.transpose();
    K.block(n, 0, q, n) = p.A;
    K.block(n + q, 0, m, n) = H;
    K.bottomRightCorner(m, m) = -MatrixXd::Identity(m, m);
    lu_.compute(K);
  }

  // [0 A' G'; A 0 0; G 0 -W'W] (ux, uy, uz) = (bx, by, bz)
  void solve(const VectorXd& bx, const VectorXd& by, const VectorXd& bz, VectorXd& ux,
             VectorXd& uy, VectorXd& uz) const {
    solve_once(bx, by, bz, ux, uy, uz);
    for (int it = 0; it < refinement_; ++it) {
      const VectorXd rx = bx - p_.A.transpose() * uy - p_.G.transpose() * uz;
      const VectorXd ry = by - p_.A * ux;
      const VectorXd rz = bz - p_.G * ux + sc_.W.transpose() * (sc_.W * uz);
      VectorXd dx, dy, dz;
      solve_once(rx, ry, rz, dx, dy, dz);
      ux += dx;
      uy += dy;
      uz += dz;
    }
  }

 private:
  void solve_once(const VectorXd& bx, const VectorXd& by, const VectorXd& bz, VectorXd& ux,
                  VectorXd& uy, VectorXd& uz) const {
    const long n = p_.num_vars();
    const long q = p_.A.rows();
    const long m = bz.size();
    VectorXd rhs(n + q + m);
    rhs.head(n) = bx;
    rhs.segment(n, q) = by;
    rhs.tail(m) = sc_.Winv.transpose() * bz;
    const VectorXd sol = lu_.solve(rhs);
    ux = sol.head(n);
    uy = sol.segment(n, q);
    uz = sc_.Winv * sol.tail(m);
  }

  const ConeProgram& p_;
  const Scaling& sc_;
  int refinement_;
  Eigen::PartialPivLU<MatrixXd> lu_;
};

void validate(const ConeProgram& p) {
  const long n = p.num_vars();
  const long m = p.dims.total();
  auto bad = [](const char* what) { throw Error(ErrorCode::DimensionMismatch, what); };
  if (n < 1) bad("cone program needs at least one variable");
  if (p.G.rows() != m || p.G.cols() != n || p.h.size() != m) bad("G/h do not match the cone dimensions");
  if (p.A.cols() != n && p.A.rows() > 0) bad("A has the wrong number of columns");
  if (p.A.rows() != p.b.size()) bad("A and b disagree");
  for (long q : p.dims.soc) {
    if (q < 1) bad("second-order cone of dimension < 1");
  }
  for (long k : p.dims.psd) {
    if (k < 1) bad("psd cone of order < 1");
  }
  if (!p.c.allFinite() || !p.G.allFinite() || !p.h.allFinite() || !p.A.allFinite() || !p.b.allFinite()) {
    throw Error(ErrorCode::InvalidInput, "cone program has non-finite data");
  }
}

// Replace A x = b by an equivalent system with independent rows. Returns the
// map from reduced to original multipliers (y = T y_red), or a certificate
// direction when the equalities are inconsistent.
struct EqualityPresolve {
  MatrixXd A;
  VectorXd b;
  MatrixXd T;
  std::optional<VectorXd> inconsistency;  // y with A'y = 0, b'y = -1
};

EqualityPresolve presolve_equalities(const MatrixXd& A, const VectorXd& b, long n) {
  EqualityPresolve out;
  if (A.rows() == 0) {
    out.A = MatrixXd::Zero(0, n);
    out.b = VectorXd::Zero(0);
    out.T = MatrixXd::Zero(0, 0);
    return out;
  }
  Eigen::JacobiSVD<MatrixXd> svd(A, Eigen::ComputeFullU);
  const VectorXd sv = svd.singularValues();
  const double tol = std::max(A.rows(), A.cols()) * std::numeric_limits<double>::epsilon() *
                     (sv.size() > 0 ? sv(0) : 0.0) * 10.0;
  long r = 0;
  while (r < sv.size() && sv(r) > tol) ++r;
  const MatrixXd U = svd.matrixU().leftCols(r);
  out.T = U;
  out.A = U.transpose() * A;
  out.b = U.transpose() * b;
  const VectorXd resid = b - U * out.b;
  if (resid.norm() > 1e-9 * std::max(1.0, b.norm())) {
    out.inconsistency = -resid / resid.squaredNorm();
  }
  return out;
}

struct ColumnPresolve {
  std::optional<MatrixXd> basis;  // orthonormal basis of the row space of [G; A]
};

ColumnPresolve presolve_columns(const ConeProgram& p) {
  const long n = p.num_vars();
  MatrixXd Q(p.G.rows() + p.A.rows(), n);
  Q << p.G, p.A;
  Eigen::ColPivHouseholderQR<MatrixXd> qr(Q.transpose());
  qr.setThreshold(1e-12);
  const long r = qr.rank();
  ColumnPresolve out;
  if (r < n) {
    const MatrixXd full = qr.householderQ();
    out.basis = full.leftCols(r);
  }
  return out;
}

}  // namespace

ConeResult solve(const ConeProgram& input, const ConeOptions& opt) {
  validate(input);
  const ConeDims& dims = input.dims;
  const long n = input.num_vars();
  const long m = dims.total();
  const double deg = static_cast<double>(dims.degree());

  EqualityPresolve eq = presolve_equalities(input.A, input.b, n);
  ConeResult res;
  if (eq.inconsistency) {
    res.status = ConeStatus::PrimalInfeasible;
    res.x = VectorXd::Zero(n);
    res.s = VectorXd::Zero(m);
    res.z = VectorXd::Zero(m);
    res.y = *eq.inconsistency;
    return res;
  }
  ConeProgram p{input.c, input.G, input.h, eq.A, eq.b, dims};
  const long q = p.A.rows();
  auto lift_y = [&](const VectorXd& y) -> VectorXd {
    return input.A.rows() == 0 ? VectorXd::Zero(0) : VectorXd(eq.T * y);
  };

  // Directions x with Gx = 0 and Ax = 0 are invisible to the constraints. If
  // c sees them the dual is infeasible; otherwise solve over the complement.
  const ColumnPresolve cols = presolve_columns(p);
  if (cols.basis && cols.basis->cols() > 0) {
    const MatrixXd& N = *cols.basis;
    const VectorXd cr = N.transpose() * p.c;
    const VectorXd resid = p.c - N * cr;
    if (resid.norm() > 1e-9 * std::max(1.0, p.c.norm())) {
      res.status = ConeStatus::DualInfeasible;
      res.x = -resid / resid.squaredNorm();
      res.s = VectorXd::Zero(m);
      res.y = VectorXd::Zero(input.A.rows());
      res.z = VectorXd::Zero(m);
      return res;
    }
    ConeProgram reduced{cr, p.G * N, p.h, p.A * N, p.b, dims};
    ConeResult r = solve(reduced, opt);
    r.x = N * r.x;
    if (input.A.rows() > 0 && r.y.size() == q) r.y = eq.T * r.y;
    if (r.y.size() != input.A.rows()) r.y = VectorXd::Zero(input.A.rows());
    return r;
  }

  const VectorXd e = detail::identity_element(dims);
  const double resx0 = std::max(1.0, p.c.norm());
  const double resy0 = std::max(1.0, p.b.norm());
  const double resz0 = std::max(1.0, p.h.norm());

  VectorXd x, y, s, z;
  try {
    detail::Scaling id;
    id.W = MatrixXd::Identity(m, m);
    id.Winv = MatrixXd::Identity(m, m);
    id.lambda = e;
    KktSolver k0(p, id, opt.refinement);
    VectorXd y0, zt;
    k0.solve(VectorXd::Zero(n), p.b, p.h, x, y0, zt);
    s = -zt;
    VectorXd x1;
    k0.solve(-p.c, VectorXd::Zero(q), VectorXd::Zero(m), x1, y, z);
  } catch (const Error&) {
    res.status = ConeStatus::NumericalFailure;
    return res;
  }
  if (!x.allFinite() || !s.allFinite() || !y.allFinite() || !z.allFinite()) {
    res.status = ConeStatus::NumericalFailure;
    res.x = VectorXd::Zero(n);
    res.y = VectorXd::Zero(input.A.rows());
    res.s = VectorXd::Zero(m);
    res.z = VectorXd::Zero(m);
    return res;
  }
  {
    const double ts = detail::cone_margin(s, dims);
    if (ts >= -1e-8 * std::max(1.0, s.norm())) s += (1.0 + ts) * e;
    const double tz = detail::cone_margin(z, dims);
    if (tz >= -1e-8 * std::max(1.0, z.norm())) z += (1.0 + tz) * e;
  }
  double tau = 1.0;
  double kappa = 1.0;

  auto fill = [&](ConeResult& r, double scale) {
    r.x = x / scale;
    r.y = lift_y(y / scale);
    r.s = s / scale;
    r.z = z / scale;
  };

  for (int iter = 0;; ++iter) {
    const VectorXd rx = p.A.transpose() * y + p.G.transpose() * z + tau * p.c;
    const VectorXd ry = p.A * x - tau * p.b;
    const VectorXd rz = p.G * x + s - tau * p.h;
    const double cx = p.c.dot(x);
    const double by = p.b.dot(y);
    const double hz = p.h.dot(z);
    const double rt = kappa + cx + by + hz;
    const double sz = s.dot(z);
    const double mu = (sz + tau * kappa) / (deg + 1.0);

    const double pcost = cx / tau;
    const double dcost = -(by + hz) / tau;
    const double gap = sz / (tau * tau);
    double relgap = std::numeric_limits<double>::infinity();
    if (pcost < 0.0) {
      relgap = gap / -pcost;
    } else if (dcost > 0.0) {
      relgap = gap / dcost;
    }
    const double pres = std::max(ry.norm() / resy0, rz.norm() / resz0) / tau;
    const double dres = rx.norm() / resx0 / tau;

    const double hresx = (p.A.transpose() * y + p.G.transpose() * z).norm();
    const double hresy = (p.A * x).norm();
    const double hresz = (p.G * x + s).norm();
    const double pinfres = (hz + by < 0.0) ? hresx / resx0 / (-hz - by) : std::numeric_limits<double>::infinity();
    const double dinfres = (cx < 0.0) ? std::max(hresy / resy0, hresz / resz0) / (-cx) : std::numeric_limits<double>::infinity();

    res.iterations = iter;
    res.primal_objective = pcost;
    res.dual_objective = dcost;
    res.gap = gap;
    res.relative_gap = relgap;
    res.primal_residual = pres;
    res.dual_residual = dres;

    if (pres <= opt.feastol && dres <= opt.feastol && (gap <= opt.abstol || relgap <= opt.reltol)) {
      res.status = ConeStatus::Optimal;
      fill(res, tau);
      return res;
    }
    if (pinfres <= opt.feastol) {
      res.status = ConeStatus::PrimalInfeasible;
      const double scale = -hz - by;
      res.x = VectorXd::Zero(n);
      res.s = VectorXd::Zero(m);
      res.y = lift_y(y / scale);
      res.z = z / scale;
      return res;
    }
    if (dinfres <= opt.feastol) {
      res.status = ConeStatus::DualInfeasible;
      res.x = x / -cx;
      res.s = s / -cx;
      res.y = VectorXd::Zero(input.A.rows());
      res.z = VectorXd::Zero(m);
      return res;
    }
    if (iter >= opt.max_iter) {
      res.status = ConeStatus::MaxIterations;
      fill(res, tau);
      return res;
    }

    try {
      const detail::Scaling sc = detail::nt_scaling(s, z, dims);
      const KktSolver kkt(p, sc, opt.refinement);

      VectorXd dx1, dy1, dz1;
      kkt.solve(-p.c, p.b, p.h, dx1, dy1, dz1);
      const double wdz1 = (sc.W * dz1).squaredNorm();
      if (!std::isfinite(wdz1)) throw Error(ErrorCode::NumericalFailure, "kkt solve failed");

      const VectorXd lam2 = detail::jordan_product(sc.lambda, sc.lambda, dims);
      VectorXd ds_aff, dz_aff;
      double dtau_aff = 0.0, dkappa_aff = 0.0;
      double sigma = 0.0;
      VectorXd dx, dy, dz, ds;
      double dtau = 0.0, dkappa = 0.0;

      for (int pass = 0; pass < 2; ++pass) {
        VectorXd rhs_s = -lam2;
        double rhs_k = -tau * kappa;
        if (pass == 1) {
          rhs_s += sigma * mu * e - detail::jordan_product(ds_aff, dz_aff, dims);
          rhs_k += sigma * mu - dtau_aff * dkappa_aff;
        }
        const VectorXd t = detail::jordan_divide(sc, rhs_s, dims);
        VectorXd dx0, dy0, dz0;
        kkt.solve(-rx, -ry, -rz - sc.W.transpose() * t, dx0, dy0, dz0);
        dtau = (rhs_k / tau + rt + p.c.dot(dx0) + p.b.dot(dy0) + p.h.dot(dz0)) / (wdz1 + kappa / tau);
        dx = dx0 + dtau * dx1;
        dy = dy0 + dtau * dy1;
        dz = dz0 + dtau * dz1;
        dkappa = (rhs_k - kappa * dtau) / tau;
        const VectorXd dzs = sc.W * dz;
        // ds from the linearized primal equation rather than W'(t - W dz):
        // the two agree in exact arithmetic, but this one keeps the primal
        // residual shrinking when W is badly conditioned.
        ds = -rz - p.G * dx + dtau * p.h;
        const VectorXd dss = sc.Winv.transpose() * ds;
        if (!dx.allFinite() || !ds.allFinite() || !std::isfinite(dtau)) {
          throw Error(ErrorCode::NumericalFailure, "search direction is not finite");
        }

        double amax = std::min(detail::max_step(sc.lambda, dss, dims), detail::max_step(sc.lambda, dzs, dims));
        if (dtau < 0.0) amax = std::min(amax, -tau / dtau);
        if (dkappa < 0.0) amax = std::min(amax, -kappa / dkappa);
        if (pass == 0) {
          const double a = std::min(1.0, amax);
          sigma = std::pow(1.0 - a, 3);
          ds_aff = dss;
          dz_aff = dzs;
          dtau_aff = dtau;
          dkappa_aff = dkappa;
        } else {
          const double a = std::min(1.0, 0.99 * amax);
          if (!(a > 1e-14)) throw Error(ErrorCode::NumericalFailure, "step length collapsed");
          x += a * dx;
          y += a * dy;
          s += a * ds;
          z += a * dz;
          tau += a * dtau;
          kappa += a * dkappa;
        }
      }
    } catch (const Error&) {
      res.status = ConeStatus::NumericalFailure;
      fill(res, tau);
      return res;
    }
  }
}

}  // namespace sdpack::conic
