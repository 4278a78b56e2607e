#pragma once

#include <Eigen/Core>

#include <vector>

namespace xld {

/// Normalized Laplacian of the complete graph over one class's samples.
///
/// For n >= 2 the matrix has unit diagonal and off-diagonal entries
/// -1/(n-1); a single vertex has no edges, so its Laplacian is the zero
/// operator. Only the scalar pair is stored; products and quadratic forms
/// use O(n) closed forms.
class ClassLaplacian {
 public:
  explicit ClassLaplacian(int n);

  int size() const { return n_; }
  double diagonal_entry() const { return n_ > 1 ? 1.0 : 0.0; }
  double off_diagonal_entry() const { return n_ > 1 ? -1.0 / (n_ - 1) : 0.0; }

  /// f^T L f, evaluated as (n/(n-1)) * (|f|^2 - n * mean(f)^2).
  double quad_form(const Eigen::VectorXd& f) const;

  /// Xc * (L - I): column j is -1/(n-1) times the sum of the other columns
  /// (-Xc when n = 1). This is the coupling term on the right-hand side of
  /// the batch code update.
  Eigen::MatrixXd rhs_term(const Eigen::MatrixXd& Xc) const;

 private:
  int n_;
};

/// Block-diagonal normalized Laplacian, one complete-graph block per class.
class BlockLaplacian {
 public:
  explicit BlockLaplacian(const std::vector<int>& class_sizes);

  const std::vector<ClassLaplacian>& blocks() const { return blocks_; }
  int size() const { return total_; }

  /// tr(X L X^T), with X's columns blocked by class.
  double total_variation(const Eigen::MatrixXd& X) const;

 private:
  std::vector<ClassLaplacian> blocks_;
  int total_;
};

}  // namespace xld
