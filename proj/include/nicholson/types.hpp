#pragma once

#include <Eigen/Dense>

namespace nicholson {

/** Scalar type used throughout the library. */
using scalar_t = double;

/** Dense column vector. */
using vector_t = Eigen::Matrix<scalar_t, Eigen::Dynamic, 1>;

/** Dense matrix. */
using matrix_t = Eigen::Matrix<scalar_t, Eigen::Dynamic, Eigen::Dynamic>;

/** Integer index vector (permutations, index sets). */
using index_vector_t = Eigen::Matrix<int, Eigen::Dynamic, 1>;

/** Boolean matrix (zero patterns). */
using bool_matrix_t = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

}  // namespace nicholson
