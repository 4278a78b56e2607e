#include "xld/dictionary.hpp"

#include "xld/errors.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace xld {

LabelLayout::LabelLayout(std::vector<int> particular_counts, int shared_count)
    : particular_counts_(std::move(particular_counts)),
      shared_count_(shared_count) {
  if (particular_counts_.empty()) {
    throw InvalidArgumentError("layout needs at least one class");
  }
  if (shared_count_ < 0) {
    throw InvalidArgumentError("shared atom count must be >= 0");
  }
  block_offsets_.resize(particular_counts_.size() + 2);
  block_offsets_[0] = 0;
  block_offsets_[1] = shared_count_;
  for (std::size_t c = 0; c < particular_counts_.size(); ++c) {
    if (particular_counts_[c] < 1) {
      throw InvalidArgumentError("class " + std::to_string(c + 1) +
                                 " has no particular atoms");
    }
    block_offsets_[c + 2] = block_offsets_[c + 1] + particular_counts_[c];
  }
  atom_count_ = block_offsets_.back();
}

LabelLayout LabelLayout::uniform(int class_count, int per_class,
                                 int shared_count) {
  if (class_count < 1) {
    throw InvalidArgumentError("layout needs at least one class");
  }
  return LabelLayout(std::vector<int>(class_count, per_class), shared_count);
}

int LabelLayout::block_size(int c) const {
  if (c < 0 || c > class_count()) {
    throw InvalidArgumentError("block index " + std::to_string(c) +
                               " outside 0.." + std::to_string(class_count()));
  }
  return c == 0 ? shared_count_ : particular_counts_[c - 1];
}

int LabelLayout::block_offset(int c) const {
  if (c < 0 || c > class_count()) {
    throw InvalidArgumentError("block index " + std::to_string(c) +
                               " outside 0.." + std::to_string(class_count()));
  }
  return block_offsets_[c];
}

SuppressionSelector::SuppressionSelector(const LabelLayout& layout, int c)
    : class_label_(c), code_length_(layout.atom_count()) {
  if (c < 1 || c > layout.class_count()) {
    throw InvalidArgumentError("selector class " + std::to_string(c) +
                               " outside 1.." +
                               std::to_string(layout.class_count()));
  }
  active_.reserve(layout.atom_count() - layout.shared_count() -
                  layout.block_size(c));
  for (int other = 1; other <= layout.class_count(); ++other) {
    if (other == c) continue;
    const int begin = layout.block_offset(other);
    const int end = begin + layout.block_size(other);
    for (int k = begin; k < end; ++k) active_.push_back(k);
  }
}

double SuppressionSelector::squared_mass(Eigen::Ref<const Eigen::MatrixXd> X) const {
  if (X.rows() != code_length_) {
    throw DimensionMismatchError("selector expects code length " +
                                 std::to_string(code_length_) + ", got " +
                                 std::to_string(X.rows()));
  }
  double sum = 0.0;
  for (int k : active_) sum += X.row(k).squaredNorm();
  return sum;
}

StructuredDictionary::StructuredDictionary(Eigen::MatrixXd atoms,
                                           LabelLayout layout)
    : atoms_(std::move(atoms)), layout_(std::move(layout)) {
  if (atoms_.cols() != layout_.atom_count()) {
    throw DimensionMismatchError("dictionary has " +
                                 std::to_string(atoms_.cols()) +
                                 " atoms, layout expects " +
                                 std::to_string(layout_.atom_count()));
  }
  if (!atoms_.allFinite()) {
    throw NonFiniteValueError("dictionary contains non-finite entries");
  }
  for (int k = 0; k < atoms_.cols(); ++k) {
    if (std::abs(atoms_.col(k).norm() - 1.0) > 1e-8) {
      throw InvalidArgumentError("atom " + std::to_string(k) +
                                 " is not unit-norm");
    }
  }
}

Eigen::Ref<const Eigen::MatrixXd> StructuredDictionary::block(int c) const {
  return atoms_.middleCols(layout_.block_offset(c), layout_.block_size(c));
}

Eigen::MatrixXd combined_part_dictionary(const StructuredDictionary& dict,
                                         int c) {
  const LabelLayout& layout = dict.layout();
  if (c < 1 || c > layout.class_count()) {
    throw InvalidArgumentError("class " + std::to_string(c) + " outside 1.." +
                               std::to_string(layout.class_count()));
  }
  Eigen::MatrixXd combined(dict.feature_dim(),
                           layout.shared_count() + layout.block_size(c));
  combined.leftCols(layout.shared_count()) = dict.block(0);
  combined.rightCols(layout.block_size(c)) = dict.block(c);
  return combined;
}

}  // namespace xld
