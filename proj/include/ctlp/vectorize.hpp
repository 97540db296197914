#pragma once

#include <Eigen/Core>

namespace ctlp {

/// Column-stacking vectorization. |vec(X)| equals the Frobenius norm of X.
Eigen::VectorXd vec(const Eigen::MatrixXd& X);

/// Inverse of vec for the given shape.
Eigen::MatrixXd vec_inv(const Eigen::VectorXd& v, Eigen::Index rows,
                        Eigen::Index cols);

/// Half-vectorization of a symmetric matrix: row-major upper triangle,
/// diagonal entries unscaled, off-diagonal entries scaled by sqrt(2) so that
/// |vecs(Y)| = ||Y||_F. Inputs with relative asymmetry above 1e-8 are
/// rejected; milder asymmetry is symmetrized by (Y + Y^T)/2 first.
Eigen::VectorXd vecs(const Eigen::MatrixXd& Y);

/// Inverse of vecs; the matrix dimension is recovered from the length.
Eigen::MatrixXd vecs_inv(const Eigen::VectorXd& v);

/// v -> v~ with v^T Y v == quad_vec(v) . vecs(Y) for any symmetric Y.
Eigen::VectorXd quad_vec(const Eigen::VectorXd& v);

/// n(n+1)/2.
Eigen::Index sym_vec_size(Eigen::Index n);

/// Matrix dimension n such that sym_vec_size(n) == s; throws if s is not a
/// triangular number.
Eigen::Index sym_dim_from_size(Eigen::Index s);

}  // namespace ctlp
