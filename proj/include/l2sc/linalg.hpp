#pragma once

#include "l2sc/matrix.hpp"

namespace l2sc {

struct ThinSvd {
  Matrix u;         // n x p
  Vector singular;  // p, nonincreasing
  Matrix v;         // k x p
};

/// Thin SVD of an n x k matrix, p = min(n, k).
///
/// Signs are made deterministic: each (u, v) column pair is flipped so the
/// largest-magnitude entry of the u column is positive. Ties go to the lowest
/// row index.
ThinSvd thin_svd(const Matrix& a);

/// Nearest matrix with orthonormal columns in Frobenius norm: u * v^T from
/// the thin SVD. Requires rows >= cols; throws RankDeficient when the
/// smallest singular value is below 1e-12 (callers that can tolerate this
/// retry with an explicit small perturbation).
Matrix stiefel_project(const Matrix& x);

/// Eigenvectors of the k largest eigenvalues of a symmetric matrix, as
/// columns ordered by nonincreasing eigenvalue. Input must be symmetric
/// within 1e-10 (symmetrize first if unsure). Same sign convention as
/// thin_svd: largest-magnitude entry of each column positive.
Matrix sym_eig_topk(const Matrix& s, int k);

}  // namespace l2sc
