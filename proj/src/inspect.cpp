#include "xld/inspect.hpp"

#include "xld/classify.hpp"
#include "xld/errors.hpp"

#include <limits>
#include <string>

namespace xld {

InspectReport inspect_codes(const Model& model, const LabeledDataset& data) {
  const LabelLayout& layout = model.dictionary.layout();
  if (data.class_count() != layout.class_count()) {
    throw InvalidArgumentError("dataset has " +
                               std::to_string(data.class_count()) +
                               " classes, model has " +
                               std::to_string(layout.class_count()));
  }
  if (data.sample_count() == 0) throw InvalidArgumentError("empty dataset");

  const int classes = layout.class_count();
  const int atoms = layout.atom_count();
  CodingClassifier clf(model);

  InspectReport report;
  report.profiles = Eigen::MatrixXd::Zero(classes, atoms);
  for (int j = 0; j < data.sample_count(); ++j) {
    report.profiles.row(data.labels()[j] - 1) +=
        clf.gcc_code(data.features().col(j)).cwiseAbs().transpose();
  }
  for (int c = 0; c < classes; ++c) {
    report.profiles.row(c) /= data.class_sizes()[c];
  }

  report.in_block_mass.resize(classes);
  report.cross_block_mass.resize(classes);
  report.block_mass_ratio.resize(classes);
  for (int c = 1; c <= classes; ++c) {
    const auto row = report.profiles.row(c - 1);
    const double shared = row.head(layout.shared_count()).sum();
    const double own =
        row.segment(layout.block_offset(c), layout.block_size(c)).sum();
    const double in_mass = shared + own;
    const double cross_mass = row.sum() - in_mass;
    report.in_block_mass[c - 1] = in_mass;
    report.cross_block_mass[c - 1] = cross_mass;
    report.block_mass_ratio[c - 1] =
        cross_mass > 0.0 ? in_mass / cross_mass
                         : std::numeric_limits<double>::infinity();
  }
  return report;
}

}  // namespace xld
