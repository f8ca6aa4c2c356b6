#pragma once

#include <Eigen/Dense>
#include <string>

#include "l2sc/errors.hpp"

namespace l2sc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Throws InvalidInput if m contains NaN or Inf. `what` names the offending
// argument in the message.
inline void require_finite(const Matrix& m, const std::string& what) {
  if (!m.allFinite())
    throw InvalidInput(what + ": non-finite entries are not accepted");
}

inline void require_finite(const Vector& v, const std::string& what) {
  if (!v.allFinite())
    throw InvalidInput(what + ": non-finite entries are not accepted");
}

// Max |Q^T Q - I|, the usual orthonormality defect of a column frame.
inline double orthonormality_defect(const Matrix& q) {
  return (q.transpose() * q - Matrix::Identity(q.cols(), q.cols()))
      .cwiseAbs()
      .maxCoeff();
}

}  // namespace l2sc
