#include "ctlp/vectorize.hpp"

#include <cmath>
#include <string>

#include "ctlp/errors.hpp"

namespace ctlp {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
}

Eigen::VectorXd vec(const Eigen::MatrixXd& X) {
  return Eigen::Map<const Eigen::VectorXd>(X.data(), X.size());
}

Eigen::MatrixXd vec_inv(const Eigen::VectorXd& v, Eigen::Index rows,
                        Eigen::Index cols) {
  if (v.size() != rows * cols) {
    throw DimensionMismatch("vec_inv: vector of length " +
                            std::to_string(v.size()) + " cannot fill a " +
                            std::to_string(rows) + "x" + std::to_string(cols) +
                            " matrix");
  }
  return Eigen::Map<const Eigen::MatrixXd>(v.data(), rows, cols);
}

Eigen::Index sym_vec_size(Eigen::Index n) { return n * (n + 1) / 2; }

Eigen::Index sym_dim_from_size(Eigen::Index s) {
  const auto n = static_cast<Eigen::Index>(
      std::llround((std::sqrt(8.0 * static_cast<double>(s) + 1.0) - 1.0) / 2.0));
  if (n < 0 || sym_vec_size(n) != s) {
    throw DimensionMismatch("vecs_inv: length " + std::to_string(s) +
                            " is not a triangular number");
  }
  return n;
}

Eigen::VectorXd vecs(const Eigen::MatrixXd& Y) {
  if (Y.rows() != Y.cols()) {
    throw DimensionMismatch("vecs: input must be square");
  }
  if ((Y - Y.transpose()).norm() > 1e-8 * Y.norm()) {
    throw AsymmetricInput("vecs: input asymmetry exceeds 1e-8 relative");
  }
  const Eigen::MatrixXd S = 0.5 * (Y + Y.transpose());
  const Eigen::Index n = S.rows();
  Eigen::VectorXd out(sym_vec_size(n));
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    out[k++] = S(i, i);
    for (Eigen::Index j = i + 1; j < n; ++j) out[k++] = kSqrt2 * S(i, j);
  }
  return out;
}

Eigen::MatrixXd vecs_inv(const Eigen::VectorXd& v) {
  const Eigen::Index n = sym_dim_from_size(v.size());
  Eigen::MatrixXd Y(n, n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    Y(i, i) = v[k++];
    for (Eigen::Index j = i + 1; j < n; ++j) {
      Y(i, j) = Y(j, i) = v[k++] / kSqrt2;
    }
  }
  return Y;
}

Eigen::VectorXd quad_vec(const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  Eigen::VectorXd out(sym_vec_size(n));
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    out[k++] = v[i] * v[i];
    for (Eigen::Index j = i + 1; j < n; ++j) out[k++] = kSqrt2 * v[i] * v[j];
  }
  return out;
}

}  // namespace ctlp
