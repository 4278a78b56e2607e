#pragma once

#include "xld/dataset.hpp"
#include "xld/dictionary.hpp"
#include "xld/learning.hpp"
#include "xld/model.hpp"

#include <Eigen/Core>
#include <Eigen/Cholesky>

#include <memory>
#include <mutex>
#include <vector>

namespace xld {

struct Prediction {
  int label = 0;               ///< 1..C
  std::vector<double> scores;  ///< per class, lower is better
  Eigen::VectorXd code;        ///< the coding used (winning block's for LCC)
};

/// Read-only classification engine over a model. Factorizations are built
/// lazily on first use of each scheme and cached; initialization is
/// race-free, so queries may run fully in parallel. The model must outlive
/// the classifier.
class CodingClassifier {
 public:
  explicit CodingClassifier(const Model& model);

  const Model& model() const { return *model_; }

  /// Ridge code over the whole dictionary, no suppression.
  Eigen::VectorXd gcc_code(const Eigen::VectorXd& y) const;

  /// Scores each class by the residual of its shared-plus-particular
  /// partial reconstruction divided by that block's absolute coefficient
  /// mass; zero-mass blocks score +infinity.
  Prediction gcc_classify(const Eigen::VectorXd& y) const;

  /// Codes the query over each combined part-dictionary [D^0, D^c] and
  /// scores by reconstruction residual.
  Prediction lcc_classify(const Eigen::VectorXd& y) const;

  Prediction classify(const Eigen::VectorXd& y, ClassifierKind kind) const;

 private:
  struct GccCache {
    Eigen::LLT<Eigen::MatrixXd> llt;
  };
  struct LccCache {
    std::vector<Eigen::MatrixXd> parts;           // combined part-dictionaries
    std::vector<Eigen::LLT<Eigen::MatrixXd>> llts;
  };

  const GccCache& gcc() const;
  const LccCache& lcc() const;

  const Model* model_;
  mutable std::once_flag gcc_once_;
  mutable std::once_flag lcc_once_;
  mutable std::unique_ptr<GccCache> gcc_cache_;
  mutable std::unique_ptr<LccCache> lcc_cache_;
};

/// One-shot conveniences; build no cache.
Eigen::VectorXd gcc_code(const Eigen::VectorXd& y,
                         const StructuredDictionary& dict, double beta);
Prediction gcc_classify(const Eigen::VectorXd& y,
                        const StructuredDictionary& dict, double beta);
Prediction lcc_classify(const Eigen::VectorXd& y,
                        const StructuredDictionary& dict, double beta);

struct EvalResult {
  double accuracy = 0;
  std::vector<double> per_class_accuracy;
  Eigen::MatrixXi confusion;  ///< confusion(i,j) = true class i+1 predicted j+1
};

EvalResult evaluate(const Model& model, const LabeledDataset& test,
                    ClassifierKind kind);
EvalResult evaluate(const CodingClassifier& clf, const LabeledDataset& test,
                    ClassifierKind kind);

/// k-fold cross-validation on the training set: each fold trains one
/// dictionary and evaluates both schemes on the held-out fold. Returns the
/// scheme with the higher mean accuracy; ties go to GCC.
ClassifierKind select_classifier(const LabeledDataset& train,
                                 const LabelLayout& layout,
                                 const Hyperparameters& hp, int folds);

}  // namespace xld
