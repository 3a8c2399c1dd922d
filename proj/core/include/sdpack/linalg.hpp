#pragma once

#include <Eigen/Dense>
#include <optional>

namespace sdpack {

/// Dense symmetric matrix. Symmetry is enforced at construction by averaging
/// with the transpose, so the stored entries satisfy a(i,j) == a(j,i) exactly.
class SymMatrix {
 public:
  /// Throws InvalidInput on non-square, empty or non-finite input.
  explicit SymMatrix(const Eigen::MatrixXd& m);

  static SymMatrix zero(long n);
  static SymMatrix identity(long n);
  static SymMatrix diagonal(const Eigen::VectorXd& d);
  /// v v^T
  static SymMatrix outer(const Eigen::VectorXd& v);

  long dim() const { return m_.rows(); }
  const Eigen::MatrixXd& mat() const { return m_; }
  double operator()(long i, long j) const { return m_(i, j); }

  /// Trace inner product <A, B> = trace(A^T B).
  double inner(const SymMatrix& other) const;
  double frobenius() const { return m_.norm(); }
  double trace() const { return m_.trace(); }

  /// B^T S B for a (possibly rectangular) B with dim() rows.
  SymMatrix congruence(const Eigen::MatrixXd& b) const;

  SymMatrix operator+(const SymMatrix& o) const;
  SymMatrix operator-(const SymMatrix& o) const;
  SymMatrix operator*(double s) const;
  SymMatrix& operator+=(const SymMatrix& o);

 private:
  struct Trusted {};
  SymMatrix(Eigen::MatrixXd m, Trusted) : m_(std::move(m)) {}

  Eigen::MatrixXd m_;
};

inline SymMatrix operator*(double s, const SymMatrix& m) { return m * s; }

struct EigenDecomp {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // column k pairs with values(k)
};

struct OrthonormalBasis {
  long ambient = 0;
  Eigen::MatrixXd columns;  // ambient x size()

  long size() const { return columns.cols(); }
};

struct PsdCheck {
  bool psd = false;
  double min_eigenvalue = 0.0;
};

/// Relative rank threshold n * 1e-12.
double default_tol(long n);

EigenDecomp eigh(const SymMatrix& s);

/// Number of eigenvalues with |lambda| > tol * max|lambda|; zero for S = 0.
int rank_tol(const SymMatrix& s, std::optional<double> tol = std::nullopt);

/// Eigenvectors of the eigenvalues above the rank threshold. Throws NotPsd
/// when some eigenvalue is below -tol * scale.
OrthonormalBasis range_basis(const SymMatrix& s, std::optional<double> tol = std::nullopt);

/// Orthogonal complement of range_basis.
OrthonormalBasis null_basis(const SymMatrix& s, std::optional<double> tol = std::nullopt);

/// A with A^T A = M and rank_tol(M) rows, built from the eigendecomposition.
Eigen::MatrixXd psd_factor(const SymMatrix& m, std::optional<double> tol = std::nullopt);

/// Moore-Penrose pseudoinverse; eigenvalues below the rank threshold are
/// treated as zero.
SymMatrix pinv(const SymMatrix& s, std::optional<double> tol = std::nullopt);

/// psd iff min eigenvalue >= -tol * max(1, max|lambda|).
PsdCheck is_psd(const SymMatrix& s, std::optional<double> tol = std::nullopt);

// Symmetric vectorization: lower triangle column by column, off-diagonal
// entries scaled by sqrt(2) so that svec(A).dot(svec(B)) == <A, B>.
long svec_size(long n);
Eigen::VectorXd svec(const Eigen::MatrixXd& a);
Eigen::MatrixXd smat(const Eigen::Ref<const Eigen::VectorXd>& v, long n);

}  // namespace sdpack
