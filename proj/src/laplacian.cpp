#include "xld/laplacian.hpp"

#include "xld/errors.hpp"

#include <string>

namespace xld {

ClassLaplacian::ClassLaplacian(int n) : n_(n) {
  if (n < 1) {
    throw InvalidArgumentError("class Laplacian needs at least one vertex, got " +
                               std::to_string(n));
  }
}

double ClassLaplacian::quad_form(const Eigen::VectorXd& f) const {
  if (f.size() != n_) {
    throw DimensionMismatchError("quad_form: vector length " +
                                 std::to_string(f.size()) +
                                 " does not match class size " +
                                 std::to_string(n_));
  }
  if (n_ < 2) return 0.0;
  const double n = static_cast<double>(n_);
  const double mean = f.mean();
  return n / (n - 1.0) * (f.squaredNorm() - n * mean * mean);
}

Eigen::MatrixXd ClassLaplacian::rhs_term(const Eigen::MatrixXd& Xc) const {
  if (Xc.cols() != n_) {
    throw DimensionMismatchError("rhs_term: block has " +
                                 std::to_string(Xc.cols()) +
                                 " columns, class size is " +
                                 std::to_string(n_));
  }
  if (n_ == 1) return -Xc;
  const double scale = -1.0 / (n_ - 1);
  Eigen::VectorXd row_sums = Xc.rowwise().sum();
  Eigen::MatrixXd out(Xc.rows(), Xc.cols());
  for (int j = 0; j < Xc.cols(); ++j) {
    out.col(j) = scale * (row_sums - Xc.col(j));
  }
  return out;
}

BlockLaplacian::BlockLaplacian(const std::vector<int>& class_sizes) : total_(0) {
  blocks_.reserve(class_sizes.size());
  for (int n : class_sizes) {
    blocks_.emplace_back(n);
    total_ += n;
  }
}

double BlockLaplacian::total_variation(const Eigen::MatrixXd& X) const {
  if (X.cols() != total_) {
    throw DimensionMismatchError("total_variation: " + std::to_string(X.cols()) +
                                 " columns, Laplacian covers " +
                                 std::to_string(total_));
  }
  double sum = 0.0;
  int offset = 0;
  for (const ClassLaplacian& block : blocks_) {
    const int n = block.size();
    if (n >= 2) {
      auto Xb = X.middleCols(offset, n);
      const Eigen::VectorXd row_means = Xb.rowwise().mean();
      const double dn = static_cast<double>(n);
      sum += dn / (dn - 1.0) * (Xb.squaredNorm() - dn * row_means.squaredNorm());
    }
    offset += n;
  }
  return sum;
}

}  // namespace xld
