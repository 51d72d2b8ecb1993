#pragma once

#include "randqb/dense.hpp"
#include "randqb/rand_qb.hpp"

namespace rqb {

// Column-pivoted modified Gram-Schmidt, k steps. Picks the largest residual
// column each step; with reorth every new q gets one extra pass against the
// previous ones. Stops early (fewer columns) once the residual is zero.
PivotedQRFactors cpqr_partial(const Matrix& a, std::size_t k, bool reorth = true,
                              Exec exec = Exec::serial);

// Greedy single-vector scheme: q_j = y/||y||, y = (R R^T)^p R omega on the
// current residual R, reprojected against earlier q. Stops early once the
// residual is exhausted.
QBFactors greedy_rand_single(const Matrix& a, std::size_t k, std::size_t p, RngStream& stream,
                             Exec exec = Exec::serial);

// Leading k singular triplets of a.
SVDFactors truncated_svd_oracle(const Matrix& a, std::size_t k, Exec exec = Exec::serial);

// All singular values of a, no vectors.
SingularValues singular_values(const Matrix& a, Exec exec = Exec::serial);

}  // namespace rqb
