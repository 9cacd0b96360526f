#pragma once

#include <Eigen/Dense>

#include "aqclab/pauli.hpp"

// Conversions between SQH form and explicit dense matrices. Dense matrices
// are a diagnostic device (decomposition of small operators, the fallback
// eigensolver); none of the simulation paths materialize them.

namespace aqclab {

// 2^n x 2^n matrix of the operator, assembled column by column from term
// images.
Eigen::MatrixXcd to_dense(const SqhOperator& op);

// Projects a Hermitian matrix onto the generalized Pauli basis,
// m_i = Tr(H S_i) / 2^n, keeping coefficients with |m_i| >= drop_tolerance.
// Capped at n <= 6 (4^n products): this is a verification device, not a
// production path.
SqhOperator decompose_dense(const Eigen::MatrixXcd& h,
                            double hermiticity_tolerance = 1e-10,
                            double drop_tolerance = 1e-12);

}  // namespace aqclab
