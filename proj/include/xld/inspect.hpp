#pragma once

#include "xld/dataset.hpp"
#include "xld/model.hpp"

#include <Eigen/Core>

#include <vector>

namespace xld {

/// Code-distribution diagnostics for a labeled set: per-class mean absolute
/// code over the atom indices (the waveform data), and the ratio of
/// in-block (shared + own particular) to cross-block absolute coefficient
/// mass. A class with zero cross-block mass reports +infinity.
struct InspectReport {
  Eigen::MatrixXd profiles;  ///< C x K, row c-1 = mean |code| of class c
  std::vector<double> in_block_mass;
  std::vector<double> cross_block_mass;
  std::vector<double> block_mass_ratio;
};

InspectReport inspect_codes(const Model& model, const LabeledDataset& data);

}  // namespace xld
