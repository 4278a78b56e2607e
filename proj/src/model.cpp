#include "xld/model.hpp"

#include "xld/errors.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

namespace xld {

namespace {

constexpr char kModelMagic[4] = {'X', 'L', 'D', 'M'};
constexpr std::uint32_t kModelVersion = 1;

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
    throw IoError(std::string("truncated model file while reading ") + what);
  }
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

double read_f64(std::istream& in, const char* what) {
  std::array<unsigned char, 8> b;
  if (!in.read(reinterpret_cast<char*>(b.data()), 8)) {
    throw IoError(std::string("truncated model file while reading ") + what);
  }
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

}  // namespace

void save_model(const Model& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);

  const LabelLayout& layout = model.dictionary.layout();
  out.write(kModelMagic, 4);
  write_u32(out, kModelVersion);
  write_u32(out, static_cast<std::uint32_t>(model.dictionary.feature_dim()));
  write_u32(out, static_cast<std::uint32_t>(layout.class_count()));
  write_u32(out, static_cast<std::uint32_t>(layout.shared_count()));
  for (int c = 1; c <= layout.class_count(); ++c) {
    write_u32(out, static_cast<std::uint32_t>(layout.block_size(c)));
  }
  const Eigen::MatrixXd& atoms = model.dictionary.atoms();
  for (int k = 0; k < atoms.cols(); ++k) {
    for (int j = 0; j < atoms.rows(); ++j) write_f64(out, atoms(j, k));
  }
  write_f64(out, model.beta);
  write_f64(out, model.lambda);
  write_f64(out, model.gamma);
  const char tag = static_cast<char>(model.classifier);
  out.write(&tag, 1);
  if (!out) throw IoError("write failed for " + path);
}

Model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);

  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kModelMagic, 4) != 0) {
    throw IoError(path + ": not an XLDM model file");
  }
  const std::uint32_t version = read_u32(in, "version");
  if (version != kModelVersion) {
    throw FormatError(path + ": unsupported model version " +
                      std::to_string(version));
  }
  const std::uint32_t m = read_u32(in, "feature dimension");
  const std::uint32_t classes = read_u32(in, "class count");
  const std::uint32_t shared = read_u32(in, "shared atom count");
  if (m == 0 || classes == 0) {
    throw FormatError(path + ": model header declares an empty dictionary");
  }
  std::vector<int> per_class(classes);
  for (std::uint32_t c = 0; c < classes; ++c) {
    per_class[c] = static_cast<int>(read_u32(in, "per-class atom count"));
  }
  LabelLayout layout(per_class, static_cast<int>(shared));

  Eigen::MatrixXd atoms(m, layout.atom_count());
  for (int k = 0; k < atoms.cols(); ++k) {
    for (int j = 0; j < atoms.rows(); ++j) atoms(j, k) = read_f64(in, "atom");
  }

  Model model{StructuredDictionary(std::move(atoms), std::move(layout)),
              read_f64(in, "beta"), read_f64(in, "lambda"),
              read_f64(in, "gamma"), ClassifierKind::Gcc};
  char tag;
  if (!in.read(&tag, 1)) throw IoError(path + ": truncated classifier tag");
  if (tag != 0 && tag != 1) {
    throw FormatError(path + ": unknown classifier tag " +
                      std::to_string(static_cast<int>(tag)));
  }
  model.classifier = tag == 0 ? ClassifierKind::Gcc : ClassifierKind::Lcc;
  return model;
}

}  // namespace xld
