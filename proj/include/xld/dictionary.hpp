#pragma once

#include <Eigen/Core>

#include <vector>

namespace xld {

/// Partition of dictionary atom indices into a shared block and one block
/// per class label. Ordering is canonical and fixed: shared atoms first,
/// then class 1, class 2, ... Selectors, classifiers, and the model file
/// all rely on this ordering.
class LabelLayout {
 public:
  /// particular_counts[c-1] atoms for class c (each >= 1); shared_count >= 0.
  LabelLayout(std::vector<int> particular_counts, int shared_count);

  static LabelLayout uniform(int class_count, int per_class, int shared_count);

  int class_count() const { return static_cast<int>(particular_counts_.size()); }
  int shared_count() const { return shared_count_; }
  int atom_count() const { return atom_count_; }

  /// Block 0 is the shared block; blocks 1..C are label-particular.
  int block_size(int c) const;
  int block_offset(int c) const;

  friend bool operator==(const LabelLayout& a, const LabelLayout& b) {
    return a.shared_count_ == b.shared_count_ &&
           a.particular_counts_ == b.particular_counts_;
  }

 private:
  std::vector<int> particular_counts_;
  std::vector<int> block_offsets_;  // size C+2, last entry = atom_count
  int shared_count_;
  int atom_count_;
};

/// Diagonal 0/1 extractor picking the coefficients a class-c sample should
/// not load on: every atom outside the shared block and block c. Stored as
/// the list of active indices; all algebra uses the diagonal structure.
class SuppressionSelector {
 public:
  SuppressionSelector(const LabelLayout& layout, int c);

  int class_label() const { return class_label_; }
  const std::vector<int>& active_indices() const { return active_; }

  /// |P X|_F^2 for a class code block (or |P x|^2 for one code column).
  double squared_mass(Eigen::Ref<const Eigen::MatrixXd> X) const;

 private:
  int class_label_;
  int code_length_;
  std::vector<int> active_;
};

/// Dictionary atoms plus their label layout. Every column has unit
/// Euclidean norm; construction rejects anything off by more than 1e-8.
class StructuredDictionary {
 public:
  StructuredDictionary(Eigen::MatrixXd atoms, LabelLayout layout);

  int feature_dim() const { return static_cast<int>(atoms_.rows()); }
  int atom_count() const { return layout_.atom_count(); }
  const LabelLayout& layout() const { return layout_; }
  const Eigen::MatrixXd& atoms() const { return atoms_; }

  /// Part-dictionary for block c (0 = shared).
  Eigen::Ref<const Eigen::MatrixXd> block(int c) const;

  /// Training-time access; callers must keep columns unit-norm.
  Eigen::MatrixXd& mutable_atoms() { return atoms_; }

 private:
  Eigen::MatrixXd atoms_;
  LabelLayout layout_;
};

/// [D^0, D^c]: the shared atoms followed by class c's atoms, in stored order.
Eigen::MatrixXd combined_part_dictionary(const StructuredDictionary& dict, int c);

}  // namespace xld
