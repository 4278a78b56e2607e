#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace xld {

/// Labeled feature matrix with samples as columns, grouped contiguously by
/// class (class 1 first). Labels are 1-based everywhere. Immutable after
/// construction and safe to share across threads.
class LabeledDataset {
 public:
  /// Accepts samples in any column order and canonicalizes to class-grouped
  /// order. Every class in 1..max(label) must have at least one sample and
  /// all entries must be finite.
  LabeledDataset(Eigen::MatrixXd features, std::vector<int> labels);

  /// As above, but carries through the positions the columns had in the
  /// source they were taken from.
  LabeledDataset(Eigen::MatrixXd features, std::vector<int> labels,
                 std::vector<int> original_indices);

  int feature_dim() const { return static_cast<int>(features_.rows()); }
  int sample_count() const { return static_cast<int>(features_.cols()); }
  int class_count() const { return static_cast<int>(class_sizes_.size()); }

  const Eigen::MatrixXd& features() const { return features_; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<int>& class_sizes() const { return class_sizes_; }

  int class_size(int c) const;
  /// First column of class c's block, c in 1..C.
  int class_offset(int c) const;
  /// The class-c column block of the feature matrix.
  Eigen::Ref<const Eigen::MatrixXd> class_block(int c) const;

  /// Source position of each canonical column, for traceability.
  const std::vector<int>& original_indices() const { return original_indices_; }

 private:
  void canonicalize_and_validate();

  Eigen::MatrixXd features_;
  std::vector<int> labels_;
  std::vector<int> class_sizes_;
  std::vector<int> class_offsets_;
  std::vector<int> original_indices_;
};

enum class DatasetFormat { Csv, Binary };

/// Stratified split request. `value` is the per-class train count, the train
/// fraction in (0,1), or the fold count, depending on `mode`.
struct SplitSpec {
  enum class Mode { PerClassCount, Fraction, KFold };
  Mode mode = Mode::PerClassCount;
  double value = 1;
  std::uint64_t seed = 0;
};

LabeledDataset load_dataset(const std::string& path, DatasetFormat format);
/// Sniffs the XLDD magic and falls back to CSV.
LabeledDataset load_dataset(const std::string& path);
void save_dataset(const LabeledDataset& ds, const std::string& path,
                  DatasetFormat format);

/// Rescales every column to unit Euclidean norm. Idempotent.
LabeledDataset normalize_columns(const LabeledDataset& ds);

/// Keeps the given columns (indices into the canonical order).
LabeledDataset subset(const LabeledDataset& ds, const std::vector<int>& columns);

/// Stratified train/test split, deterministic given spec.seed. Rejects
/// SplitSpec::Mode::KFold; use split_k_folds for that.
std::pair<LabeledDataset, LabeledDataset> split_train_test(
    const LabeledDataset& ds, const SplitSpec& spec);

/// k stratified folds; element f is (train, held-out) for fold f.
std::vector<std::pair<LabeledDataset, LabeledDataset>> split_k_folds(
    const LabeledDataset& ds, int folds, std::uint64_t seed);

/// Feature columns for prediction inputs, kept in file order. `labels` is
/// empty when the source carries none (CSV without a leading `label` column).
struct QueryMatrix {
  Eigen::MatrixXd features;
  std::vector<int> labels;
};

QueryMatrix load_query_matrix(const std::string& path);

}  // namespace xld
