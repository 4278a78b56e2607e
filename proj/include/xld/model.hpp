#pragma once

#include "xld/dictionary.hpp"

#include <cstdint>
#include <string>

namespace xld {

enum class ClassifierKind : std::uint8_t { Gcc = 0, Lcc = 1 };

/// Trained artifact: the dictionary plus the hyperparameters needed at
/// query time and the classifier chosen at training time.
struct Model {
  StructuredDictionary dictionary;
  double beta = 0;
  double lambda = 0;
  double gamma = 0;
  ClassifierKind classifier = ClassifierKind::Gcc;
};

/// Binary model file: magic XLDM, u32 version, u32 M, u32 C, u32 shared
/// count, C u32 per-class counts, the atoms column by column as f64, then
/// beta, lambda, gamma as f64 and a u8 classifier tag. All little-endian.
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

}  // namespace xld
