#include "l2sc/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace l2sc {

namespace {

// Flip column j of m (and the paired column of other, if given) so that the
// entry with the largest magnitude ends up positive. First such entry wins.
void fix_column_sign(Matrix& m, int j, Matrix* other = nullptr) {
  Eigen::Index at = 0;
  m.col(j).cwiseAbs().maxCoeff(&at);
  if (m(at, j) < 0.0) {
    m.col(j) = -m.col(j);
    if (other) other->col(j) = -other->col(j);
  }
}

}  // namespace

ThinSvd thin_svd(const Matrix& a) {
  require_finite(a, "thin_svd: a");
  if (a.rows() == 0 || a.cols() == 0)
    throw InvalidInput("thin_svd: empty matrix");

  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  ThinSvd out{svd.matrixU(), svd.singularValues(), svd.matrixV()};
  for (int j = 0; j < out.u.cols(); ++j) fix_column_sign(out.u, j, &out.v);
  return out;
}

Matrix stiefel_project(const Matrix& x) {
  if (x.rows() < x.cols())
    throw InvalidInput("stiefel_project: need rows >= cols");
  ThinSvd svd = thin_svd(x);
  if (svd.singular(svd.singular.size() - 1) < 1e-12)
    throw RankDeficient("stiefel_project: numerically rank-deficient input");
  return svd.u * svd.v.transpose();
}

Matrix sym_eig_topk(const Matrix& s, int k) {
  require_finite(s, "sym_eig_topk: s");
  if (s.rows() != s.cols())
    throw InvalidInput("sym_eig_topk: matrix must be square");
  if (k < 1 || k > s.rows())
    throw InvalidInput("sym_eig_topk: k out of range");
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw InvalidInput("sym_eig_topk: matrix not symmetric within 1e-10");

  // Symmetrize exactly before handing off; the solver assumes it.
  Matrix sym = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success)
    throw NumericalFailure("sym_eig_topk: eigensolver did not converge");

  // Eigen returns eigenvalues ascending; take the last k, largest first.
  const Eigen::Index p = s.rows();
  Matrix top(p, k);
  for (int j = 0; j < k; ++j) top.col(j) = eig.eigenvectors().col(p - 1 - j);
  for (int j = 0; j < k; ++j) fix_column_sign(top, j);
  return top;
}

}  // namespace l2sc
