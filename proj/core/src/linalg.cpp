#include "sdpack/linalg.hpp"

#include <cmath>
#include <numbers>

#include "sdpack/error.hpp"

namespace sdpack {

namespace {

double resolve_tol(std::optional<double> tol, long n) {
  const double t = tol.value_or(default_tol(n));
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidInput, "tolerance must be positive");
  return t;
}

double spectral_scale(const Eigen::VectorXd& values) {
  return values.size() == 0 ? 0.0 : values.cwiseAbs().maxCoeff();
}

}  // namespace

SymMatrix::SymMatrix(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::InvalidInput, "matrix is not square",
                Witness{.dimensions = std::pair<long, long>{m.rows(), m.cols()}});
  }
  if (m.rows() < 1) throw Error(ErrorCode::InvalidInput, "matrix dimension must be at least 1");
  if (!m.allFinite()) throw Error(ErrorCode::InvalidInput, "matrix has non-finite entries");
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::zero(long n) { return SymMatrix(Eigen::MatrixXd::Zero(n, n)); }

SymMatrix SymMatrix::identity(long n) { return SymMatrix(Eigen::MatrixXd::Identity(n, n)); }

SymMatrix SymMatrix::diagonal(const Eigen::VectorXd& d) {
  return SymMatrix(Eigen::MatrixXd(d.asDiagonal()));
}

SymMatrix SymMatrix::outer(const Eigen::VectorXd& v) { return SymMatrix(v * v.transpose()); }

double SymMatrix::inner(const SymMatrix& other) const {
  if (other.dim() != dim()) {
    throw Error(ErrorCode::DimensionMismatch, "inner product of matrices of different size",
                Witness{.dimensions = std::pair<long, long>{dim(), other.dim()}});
  }
  return m_.cwiseProduct(other.m_).sum();
}

SymMatrix SymMatrix::congruence(const Eigen::MatrixXd& b) const {
  if (b.rows() != dim()) {
    throw Error(ErrorCode::DimensionMismatch, "congruence factor has wrong row count",
                Witness{.dimensions = std::pair<long, long>{dim(), b.rows()}});
  }
  return SymMatrix(b.transpose() * m_ * b);
}

SymMatrix SymMatrix::operator+(const SymMatrix& o) const {
  SymMatrix r = *this;
  r += o;
  return r;
}

SymMatrix SymMatrix::operator-(const SymMatrix& o) const {
  if (o.dim() != dim()) {
    throw Error(ErrorCode::DimensionMismatch, "difference of matrices of different size",
                Witness{.dimensions = std::pair<long, long>{dim(), o.dim()}});
  }
  return SymMatrix(Eigen::MatrixXd(m_ - o.m_), Trusted{});
}

SymMatrix SymMatrix::operator*(double s) const { return SymMatrix(Eigen::MatrixXd(m_ * s), Trusted{}); }

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
  if (o.dim() != dim()) {
    throw Error(ErrorCode::DimensionMismatch, "sum of matrices of different size",
                Witness{.dimensions = std::pair<long, long>{dim(), o.dim()}});
  }
  m_ += o.m_;
  return *this;
}

double default_tol(long n) { return static_cast<double>(n) * 1e-12; }

EigenDecomp eigh(const SymMatrix& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.mat());
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::NumericalFailure, "symmetric eigensolver did not converge");
  }
  EigenDecomp out;
  out.values = es.eigenvalues().reverse();
  out.vectors = es.eigenvectors().rowwise().reverse();
  return out;
}

int rank_tol(const SymMatrix& s, std::optional<double> tol) {
  const double t = resolve_tol(tol, s.dim());
  const EigenDecomp ed = eigh(s);
  const double scale = spectral_scale(ed.values);
  if (scale == 0.0) return 0;
  int r = 0;
  for (double v : ed.values) {
    if (std::abs(v) > t * scale) ++r;
  }
  return r;
}

namespace {

struct Split {
  Eigen::MatrixXd range;
  Eigen::MatrixXd kernel;
  Eigen::VectorXd range_values;
};

Split split_psd(const SymMatrix& s, double t) {
  const EigenDecomp ed = eigh(s);
  const double scale = spectral_scale(ed.values);
  const long n = s.dim();
  if (n > 0 && ed.values(n - 1) < -t * std::max(1.0, scale)) {
    throw Error(ErrorCode::NotPsd, "matrix is not positive semidefinite",
                Witness{.eigenvalue = ed.values(n - 1)});
  }
  long r = 0;
  if (scale > 0.0) {
    while (r < n && ed.values(r) > t * scale) ++r;
  }
  return Split{ed.vectors.leftCols(r), ed.vectors.rightCols(n - r), ed.values.head(r)};
}

}  // namespace

OrthonormalBasis range_basis(const SymMatrix& s, std::optional<double> tol) {
  Split sp = split_psd(s, resolve_tol(tol, s.dim()));
  return OrthonormalBasis{s.dim(), std::move(sp.range)};
}

OrthonormalBasis null_basis(const SymMatrix& s, std::optional<double> tol) {
  Split sp = split_psd(s, resolve_tol(tol, s.dim()));
  return OrthonormalBasis{s.dim(), std::move(sp.kernel)};
}

Eigen::MatrixXd psd_factor(const SymMatrix& m, std::optional<double> tol) {
  const Split sp = split_psd(m, resolve_tol(tol, m.dim()));
  // A = Lambda_+^{1/2} Q_+^T
  return sp.range_values.cwiseSqrt().asDiagonal() * sp.range.transpose();
}

SymMatrix pinv(const SymMatrix& s, std::optional<double> tol) {
  const double t = resolve_tol(tol, s.dim());
  const EigenDecomp ed = eigh(s);
  const double scale = spectral_scale(ed.values);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(ed.values.size());
  for (long k = 0; k < ed.values.size(); ++k) {
    if (std::abs(ed.values(k)) > t * scale) inv(k) = 1.0 / ed.values(k);
  }
  return SymMatrix(ed.vectors * inv.asDiagonal() * ed.vectors.transpose());
}

PsdCheck is_psd(const SymMatrix& s, std::optional<double> tol) {
  const double t = resolve_tol(tol, s.dim());
  const EigenDecomp ed = eigh(s);
  const double min_eig = ed.values(ed.values.size() - 1);
  const double scale = std::max(1.0, spectral_scale(ed.values));
  return PsdCheck{min_eig >= -t * scale, min_eig};
}

long svec_size(long n) { return n * (n + 1) / 2; }

Eigen::VectorXd svec(const Eigen::MatrixXd& a) {
  const long n = a.rows();
  Eigen::VectorXd v(svec_size(n));
  long k = 0;
  for (long j = 0; j < n; ++j) {
    v(k++) = a(j, j);
    for (long i = j + 1; i < n; ++i) v(k++) = std::numbers::sqrt2 * 0.5 * (a(i, j) + a(j, i));
  }
  return v;
}

Eigen::MatrixXd smat(const Eigen::Ref<const Eigen::VectorXd>& v, long n) {
  Eigen::MatrixXd a(n, n);
  long k = 0;
  for (long j = 0; j < n; ++j) {
    a(j, j) = v(k++);
    for (long i = j + 1; i < n; ++i) {
      const double x = v(k++) / std::numbers::sqrt2;
      a(i, j) = x;
      a(j, i) = x;
    }
  }
  return a;
}

}  // namespace sdpack
