#include "xld/dataset.hpp"

#include "xld/errors.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <utility>

namespace xld {

namespace {

constexpr char kDatasetMagic[4] = {'X', 'L', 'D', 'D'};

void write_u32(std::ostream& out, std::uint32_t v) {
  std::array<char, 4> b;
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b.data(), 4);
}

void write_f64(std::ostream& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  std::array<char, 8> b;
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(b.data(), 8);
}

std::uint32_t read_u32(std::istream& in, const char* what) {
  std::array<unsigned char, 4> b;
  if (!in.read(reinterpret_cast<char*>(b.data()), 4)) {
    throw IoError(std::string("truncated file while reading ") + what);
  }
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

double read_f64(std::istream& in, const char* what) {
  std::array<unsigned char, 8> b;
  if (!in.read(reinterpret_cast<char*>(b.data()), 8)) {
    throw IoError(std::string("truncated file while reading ") + what);
  }
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string field = line.substr(start, comma == std::string::npos
                                               ? std::string::npos
                                               : comma - start);
    // trim surrounding blanks and a trailing CR from Windows line endings
    while (!field.empty() && (field.back() == ' ' || field.back() == '\r' ||
                              field.back() == '\t')) {
      field.pop_back();
    }
    std::size_t lead = 0;
    while (lead < field.size() && (field[lead] == ' ' || field[lead] == '\t')) {
      ++lead;
    }
    fields.push_back(field.substr(lead));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool parse_double(const std::string& field, double& out) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end && !field.empty();
}

bool parse_label(const std::string& field, int& out) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end && !field.empty();
}

struct ParsedCsv {
  Eigen::MatrixXd features;
  std::vector<int> labels;  // empty when the header has no label column
};

ParsedCsv parse_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) {
    throw FormatError(path + ": empty file, missing header");
  }
  const std::vector<std::string> header = split_fields(line);
  const bool labeled = !header.empty() && header[0] == "label";
  const int feature_dim =
      static_cast<int>(header.size()) - (labeled ? 1 : 0);
  if (feature_dim < 1) {
    throw FormatError(path + ": malformed header, no feature columns");
  }

  std::vector<double> values;
  std::vector<int> labels;
  int rows = 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (static_cast<int>(fields.size()) != feature_dim + (labeled ? 1 : 0)) {
      throw DimensionMismatchError(
          path + ": line " + std::to_string(line_no) + " has " +
          std::to_string(fields.size()) + " fields, expected " +
          std::to_string(feature_dim + (labeled ? 1 : 0)));
    }
    if (labeled) {
      int label = 0;
      if (!parse_label(fields[0], label) || label < 1) {
        throw UnknownLabelError(path + ": line " + std::to_string(line_no) +
                                ": bad label '" + fields[0] + "'");
      }
      labels.push_back(label);
    }
    for (int j = 0; j < feature_dim; ++j) {
      const std::string& f = fields[j + (labeled ? 1 : 0)];
      double v = 0;
      if (!parse_double(f, v)) {
        throw FormatError(path + ": line " + std::to_string(line_no) +
                          ": cannot parse value '" + f + "'");
      }
      if (!std::isfinite(v)) {
        throw NonFiniteValueError(path + ": line " + std::to_string(line_no) +
                                  ": non-finite value '" + f + "'");
      }
      values.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw FormatError(path + ": no samples");

  // rows in the file become columns: samples are column vectors
  Eigen::MatrixXd features(feature_dim, rows);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < feature_dim; ++j) {
      features(j, i) = values[static_cast<std::size_t>(i) * feature_dim + j];
    }
  }
  return {std::move(features), std::move(labels)};
}

struct ParsedBinary {
  Eigen::MatrixXd features;
  std::vector<int> labels;
  int declared_classes = 0;
};

ParsedBinary parse_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);

  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kDatasetMagic, 4) != 0) {
    throw IoError(path + ": not an XLDD dataset file");
  }
  const std::uint32_t m = read_u32(in, "feature dimension");
  const std::uint32_t n = read_u32(in, "sample count");
  const std::uint32_t c = read_u32(in, "class count");
  if (m == 0 || n == 0 || c == 0) {
    throw FormatError(path + ": header declares an empty dataset");
  }

  Eigen::MatrixXd features(m, n);
  std::vector<int> labels(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t label = read_u32(in, "label");
    if (label < 1 || label > c) {
      throw UnknownLabelError(path + ": sample " + std::to_string(i + 1) +
                              " has label " + std::to_string(label) +
                              " outside 1.." + std::to_string(c));
    }
    labels[i] = static_cast<int>(label);
    for (std::uint32_t j = 0; j < m; ++j) {
      const double v = read_f64(in, "feature");
      if (!std::isfinite(v)) {
        throw NonFiniteValueError(path + ": sample " + std::to_string(i + 1) +
                                  " has a non-finite feature");
      }
      features(j, i) = v;
    }
  }
  return {std::move(features), std::move(labels), static_cast<int>(c)};
}

}  // namespace

LabeledDataset::LabeledDataset(Eigen::MatrixXd features,
                               std::vector<int> labels)
    : features_(std::move(features)), labels_(std::move(labels)) {
  original_indices_.resize(labels_.size());
  std::iota(original_indices_.begin(), original_indices_.end(), 0);
  canonicalize_and_validate();
}

LabeledDataset::LabeledDataset(Eigen::MatrixXd features,
                               std::vector<int> labels,
                               std::vector<int> original_indices)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      original_indices_(std::move(original_indices)) {
  if (original_indices_.size() != labels_.size()) {
    throw DimensionMismatchError("original index list does not match labels");
  }
  canonicalize_and_validate();
}

void LabeledDataset::canonicalize_and_validate() {
  if (static_cast<int>(labels_.size()) != features_.cols()) {
    throw DimensionMismatchError("label count " +
                                 std::to_string(labels_.size()) +
                                 " does not match column count " +
                                 std::to_string(features_.cols()));
  }
  if (!features_.allFinite()) {
    throw NonFiniteValueError("dataset contains non-finite entries");
  }

  int max_label = 0;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] < 1) {
      throw UnknownLabelError("sample " + std::to_string(i + 1) +
                              " has label " + std::to_string(labels_[i]));
    }
    max_label = std::max(max_label, labels_[i]);
  }

  class_sizes_.assign(max_label, 0);
  for (int label : labels_) ++class_sizes_[label - 1];
  for (int c = 0; c < max_label; ++c) {
    if (class_sizes_[c] == 0) {
      throw UnknownLabelError("class " + std::to_string(c + 1) +
                              " has no samples");
    }
  }
  class_offsets_.assign(max_label + 1, 0);
  for (int c = 0; c < max_label; ++c) {
    class_offsets_[c + 1] = class_offsets_[c] + class_sizes_[c];
  }

  // stable class-grouped permutation
  std::vector<int> order(labels_.size());
  std::vector<int> next(class_offsets_.begin(), class_offsets_.end() - 1);
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    order[next[labels_[i] - 1]++] = static_cast<int>(i);
  }

  bool already_sorted = true;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i] != static_cast<int>(i)) {
      already_sorted = false;
      break;
    }
  }
  if (already_sorted) return;

  Eigen::MatrixXd sorted_features(features_.rows(), features_.cols());
  std::vector<int> sorted_labels(labels_.size());
  std::vector<int> sorted_original(labels_.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    sorted_features.col(static_cast<int>(i)) = features_.col(order[i]);
    sorted_labels[i] = labels_[order[i]];
    sorted_original[i] = original_indices_[order[i]];
  }
  features_ = std::move(sorted_features);
  labels_ = std::move(sorted_labels);
  original_indices_ = std::move(sorted_original);
}

int LabeledDataset::class_size(int c) const {
  if (c < 1 || c > class_count()) {
    throw InvalidArgumentError("class " + std::to_string(c) + " outside 1.." +
                               std::to_string(class_count()));
  }
  return class_sizes_[c - 1];
}

int LabeledDataset::class_offset(int c) const {
  if (c < 1 || c > class_count()) {
    throw InvalidArgumentError("class " + std::to_string(c) + " outside 1.." +
                               std::to_string(class_count()));
  }
  return class_offsets_[c - 1];
}

Eigen::Ref<const Eigen::MatrixXd> LabeledDataset::class_block(int c) const {
  return features_.middleCols(class_offset(c), class_size(c));
}

LabeledDataset load_dataset(const std::string& path, DatasetFormat format) {
  if (format == DatasetFormat::Csv) {
    ParsedCsv parsed = parse_csv(path);
    if (parsed.labels.empty()) {
      throw FormatError(path + ": malformed header, first column must be 'label'");
    }
    return LabeledDataset(std::move(parsed.features), std::move(parsed.labels));
  }
  ParsedBinary parsed = parse_binary(path);
  LabeledDataset ds(std::move(parsed.features), std::move(parsed.labels));
  if (ds.class_count() != parsed.declared_classes) {
    throw UnknownLabelError(path + ": header declares " +
                            std::to_string(parsed.declared_classes) +
                            " classes but only " +
                            std::to_string(ds.class_count()) + " appear");
  }
  return ds;
}

LabeledDataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[4] = {0, 0, 0, 0};
  in.read(magic, 4);
  in.close();
  const bool binary = std::memcmp(magic, kDatasetMagic, 4) == 0;
  return load_dataset(path, binary ? DatasetFormat::Binary : DatasetFormat::Csv);
}

void save_dataset(const LabeledDataset& ds, const std::string& path,
                  DatasetFormat format) {
  if (format == DatasetFormat::Csv) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "label";
    for (int j = 1; j <= ds.feature_dim(); ++j) out << ",f" << j;
    out << "\n";
    char buf[64];
    for (int i = 0; i < ds.sample_count(); ++i) {
      out << ds.labels()[i];
      for (int j = 0; j < ds.feature_dim(); ++j) {
        std::snprintf(buf, sizeof(buf), "%.17g", ds.features()(j, i));
        out << ',' << buf;
      }
      out << "\n";
    }
    if (!out) throw IoError("write failed for " + path);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out.write(kDatasetMagic, 4);
  write_u32(out, static_cast<std::uint32_t>(ds.feature_dim()));
  write_u32(out, static_cast<std::uint32_t>(ds.sample_count()));
  write_u32(out, static_cast<std::uint32_t>(ds.class_count()));
  for (int i = 0; i < ds.sample_count(); ++i) {
    write_u32(out, static_cast<std::uint32_t>(ds.labels()[i]));
    for (int j = 0; j < ds.feature_dim(); ++j) {
      write_f64(out, ds.features()(j, i));
    }
  }
  if (!out) throw IoError("write failed for " + path);
}

LabeledDataset normalize_columns(const LabeledDataset& ds) {
  Eigen::MatrixXd features = ds.features();
  for (int j = 0; j < features.cols(); ++j) {
    const double norm = features.col(j).norm();
    if (norm < std::numeric_limits<double>::min()) {
      throw DegenerateSampleError("column " + std::to_string(j + 1) +
                                  " has zero norm");
    }
    features.col(j) /= norm;
  }
  return LabeledDataset(std::move(features), ds.labels(),
                        ds.original_indices());
}

LabeledDataset subset(const LabeledDataset& ds,
                      const std::vector<int>& columns) {
  Eigen::MatrixXd features(ds.feature_dim(),
                           static_cast<int>(columns.size()));
  std::vector<int> labels(columns.size());
  std::vector<int> original(columns.size());
  for (std::size_t i = 0; i < columns.size(); ++i) {
    const int col = columns[i];
    if (col < 0 || col >= ds.sample_count()) {
      throw InvalidArgumentError("column index " + std::to_string(col) +
                                 " out of range");
    }
    features.col(static_cast<int>(i)) = ds.features().col(col);
    labels[i] = ds.labels()[col];
    original[i] = ds.original_indices()[col];
  }
  return LabeledDataset(std::move(features), std::move(labels),
                        std::move(original));
}

namespace {

int min_class_size(const LabeledDataset& ds) {
  int m = ds.sample_count();
  for (int s : ds.class_sizes()) m = std::min(m, s);
  return m;
}

std::vector<std::vector<int>> shuffled_class_indices(const LabeledDataset& ds,
                                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<int>> per_class(ds.class_count());
  for (int c = 1; c <= ds.class_count(); ++c) {
    std::vector<int>& idx = per_class[c - 1];
    idx.resize(ds.class_size(c));
    std::iota(idx.begin(), idx.end(), ds.class_offset(c));
    std::shuffle(idx.begin(), idx.end(), rng);
  }
  return per_class;
}

}  // namespace

std::pair<LabeledDataset, LabeledDataset> split_train_test(
    const LabeledDataset& ds, const SplitSpec& spec) {
  if (spec.mode == SplitSpec::Mode::KFold) {
    throw InvalidArgumentError("k-fold requested; use split_k_folds");
  }
  if (spec.mode == SplitSpec::Mode::PerClassCount) {
    const int count = static_cast<int>(spec.value);
    if (count < 1 || count > min_class_size(ds)) {
      throw InvalidArgumentError(
          "per-class train count " + std::to_string(count) +
          " outside 1.." + std::to_string(min_class_size(ds)));
    }
  } else {
    if (!(spec.value > 0.0 && spec.value < 1.0)) {
      throw InvalidArgumentError("train fraction must lie in (0,1)");
    }
  }

  const auto per_class = shuffled_class_indices(ds, spec.seed);
  std::vector<int> train_cols, test_cols;
  for (int c = 1; c <= ds.class_count(); ++c) {
    const std::vector<int>& idx = per_class[c - 1];
    const int size = static_cast<int>(idx.size());
    int n_train = spec.mode == SplitSpec::Mode::PerClassCount
                      ? static_cast<int>(spec.value)
                      : static_cast<int>(std::lround(spec.value * size));
    n_train = std::clamp(n_train, 0, size);
    train_cols.insert(train_cols.end(), idx.begin(), idx.begin() + n_train);
    test_cols.insert(test_cols.end(), idx.begin() + n_train, idx.end());
  }
  return {subset(ds, train_cols), subset(ds, test_cols)};
}

std::vector<std::pair<LabeledDataset, LabeledDataset>> split_k_folds(
    const LabeledDataset& ds, int folds, std::uint64_t seed) {
  if (folds < 2 || folds > min_class_size(ds)) {
    throw InvalidArgumentError("fold count " + std::to_string(folds) +
                               " outside 2.." +
                               std::to_string(min_class_size(ds)));
  }
  const auto per_class = shuffled_class_indices(ds, seed);
  std::vector<std::pair<LabeledDataset, LabeledDataset>> out;
  out.reserve(folds);
  for (int f = 0; f < folds; ++f) {
    std::vector<int> train_cols, test_cols;
    for (const std::vector<int>& idx : per_class) {
      const int size = static_cast<int>(idx.size());
      const int begin = static_cast<int>(static_cast<long long>(size) * f / folds);
      const int end =
          static_cast<int>(static_cast<long long>(size) * (f + 1) / folds);
      for (int i = 0; i < size; ++i) {
        (i >= begin && i < end ? test_cols : train_cols).push_back(idx[i]);
      }
    }
    out.emplace_back(subset(ds, train_cols), subset(ds, test_cols));
  }
  return out;
}

QueryMatrix load_query_matrix(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw IoError("cannot open " + path);
  char magic[4] = {0, 0, 0, 0};
  probe.read(magic, 4);
  probe.close();

  if (std::memcmp(magic, kDatasetMagic, 4) == 0) {
    ParsedBinary parsed = parse_binary(path);
    return {std::move(parsed.features), std::move(parsed.labels)};
  }
  ParsedCsv parsed = parse_csv(path);
  return {std::move(parsed.features), std::move(parsed.labels)};
}

}  // namespace xld
