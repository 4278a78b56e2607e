#include "xld/classify.hpp"

#include "xld/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace xld {

namespace {

void check_query(const Eigen::VectorXd& y, const StructuredDictionary& dict) {
  if (y.size() != dict.feature_dim()) {
    throw DimensionMismatchError("query dimension " + std::to_string(y.size()) +
                                 " does not match model dimension " +
                                 std::to_string(dict.feature_dim()));
  }
  if (!y.allFinite()) throw NonFiniteValueError("query has non-finite entries");
}

Eigen::LLT<Eigen::MatrixXd> ridge_factor(const Eigen::MatrixXd& columns,
                                         double beta) {
  Eigen::MatrixXd gram = columns.transpose() * columns;
  gram.diagonal().array() += beta;
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw SolveError("ridge factorization failed (non-finite dictionary?)");
  }
  return llt;
}

int argmin_score(const std::vector<double>& scores) {
  int best = -1;
  double best_score = std::numeric_limits<double>::infinity();
  for (int c = 0; c < static_cast<int>(scores.size()); ++c) {
    if (scores[c] < best_score) {
      best_score = scores[c];
      best = c;
    }
  }
  if (best < 0) {
    throw UnclassifiableError(
        "every class score is undefined (no block carries coefficient mass)");
  }
  return best + 1;
}

// score each class by its shared+particular partial-reconstruction residual
// over that block's absolute coefficient mass
Prediction score_gcc(const StructuredDictionary& dict, const Eigen::VectorXd& y,
                     Eigen::VectorXd code) {
  const LabelLayout& layout = dict.layout();
  const int shared = layout.shared_count();

  Eigen::VectorXd base = y;
  double shared_mass = 0.0;
  if (shared > 0) {
    base.noalias() -= dict.block(0) * code.head(shared);
    shared_mass = code.head(shared).cwiseAbs().sum();
  }

  std::vector<double> scores(layout.class_count());
  for (int c = 1; c <= layout.class_count(); ++c) {
    const auto segment =
        code.segment(layout.block_offset(c), layout.block_size(c));
    const double mass = shared_mass + segment.cwiseAbs().sum();
    if (mass > 0.0) {
      const Eigen::VectorXd residual = base - dict.block(c) * segment;
      scores[c - 1] = residual.squaredNorm() / mass;
    } else {
      scores[c - 1] = std::numeric_limits<double>::infinity();
    }
  }
  const int label = argmin_score(scores);
  return Prediction{label, std::move(scores), std::move(code)};
}

}  // namespace

CodingClassifier::CodingClassifier(const Model& model) : model_(&model) {
  if (!(model.beta > 0.0) || !std::isfinite(model.beta)) {
    throw InvalidArgumentError("model beta must be finite and > 0");
  }
}

const CodingClassifier::GccCache& CodingClassifier::gcc() const {
  std::call_once(gcc_once_, [this] {
    auto cache = std::make_unique<GccCache>();
    cache->llt = ridge_factor(model_->dictionary.atoms(), model_->beta);
    gcc_cache_ = std::move(cache);
  });
  return *gcc_cache_;
}

const CodingClassifier::LccCache& CodingClassifier::lcc() const {
  std::call_once(lcc_once_, [this] {
    auto cache = std::make_unique<LccCache>();
    const int classes = model_->dictionary.layout().class_count();
    cache->parts.reserve(classes);
    cache->llts.reserve(classes);
    for (int c = 1; c <= classes; ++c) {
      cache->parts.push_back(combined_part_dictionary(model_->dictionary, c));
      cache->llts.push_back(ridge_factor(cache->parts.back(), model_->beta));
    }
    lcc_cache_ = std::move(cache);
  });
  return *lcc_cache_;
}

Eigen::VectorXd CodingClassifier::gcc_code(const Eigen::VectorXd& y) const {
  check_query(y, model_->dictionary);
  return gcc().llt.solve(model_->dictionary.atoms().transpose() * y);
}

Prediction CodingClassifier::gcc_classify(const Eigen::VectorXd& y) const {
  return score_gcc(model_->dictionary, y, gcc_code(y));
}

Prediction CodingClassifier::lcc_classify(const Eigen::VectorXd& y) const {
  check_query(y, model_->dictionary);
  const LccCache& cache = lcc();
  const int classes = model_->dictionary.layout().class_count();

  std::vector<double> scores(classes);
  Eigen::VectorXd best_code;
  int best = 0;
  for (int c = 0; c < classes; ++c) {
    const Eigen::VectorXd code =
        cache.llts[c].solve(cache.parts[c].transpose() * y);
    scores[c] = (y - cache.parts[c] * code).squaredNorm();
    if (c == 0 || scores[c] < scores[best]) {
      best = c;
      best_code = code;
    }
  }
  return Prediction{best + 1, std::move(scores), std::move(best_code)};
}

Prediction CodingClassifier::classify(const Eigen::VectorXd& y,
                                      ClassifierKind kind) const {
  return kind == ClassifierKind::Gcc ? gcc_classify(y) : lcc_classify(y);
}

Eigen::VectorXd gcc_code(const Eigen::VectorXd& y,
                         const StructuredDictionary& dict, double beta) {
  check_query(y, dict);
  if (!(beta > 0.0)) throw InvalidArgumentError("beta must be > 0");
  return ridge_factor(dict.atoms(), beta).solve(dict.atoms().transpose() * y);
}

Prediction gcc_classify(const Eigen::VectorXd& y,
                        const StructuredDictionary& dict, double beta) {
  return score_gcc(dict, y, gcc_code(y, dict, beta));
}

Prediction lcc_classify(const Eigen::VectorXd& y,
                        const StructuredDictionary& dict, double beta) {
  check_query(y, dict);
  if (!(beta > 0.0)) throw InvalidArgumentError("beta must be > 0");
  const int classes = dict.layout().class_count();
  std::vector<double> scores(classes);
  Eigen::VectorXd best_code;
  int best = 0;
  for (int c = 0; c < classes; ++c) {
    const Eigen::MatrixXd part = combined_part_dictionary(dict, c + 1);
    const Eigen::VectorXd code =
        ridge_factor(part, beta).solve(part.transpose() * y);
    scores[c] = (y - part * code).squaredNorm();
    if (c == 0 || scores[c] < scores[best]) {
      best = c;
      best_code = code;
    }
  }
  return Prediction{best + 1, std::move(scores), std::move(best_code)};
}

EvalResult evaluate(const CodingClassifier& clf, const LabeledDataset& test,
                    ClassifierKind kind) {
  const StructuredDictionary& dict = clf.model().dictionary;
  if (test.feature_dim() != dict.feature_dim()) {
    throw DimensionMismatchError(
        "test feature dimension " + std::to_string(test.feature_dim()) +
        " does not match model dimension " +
        std::to_string(dict.feature_dim()));
  }
  const int classes = dict.layout().class_count();
  if (test.class_count() != classes) {
    throw InvalidArgumentError("test set has " +
                               std::to_string(test.class_count()) +
                               " classes, model has " +
                               std::to_string(classes));
  }
  if (test.sample_count() == 0) {
    throw InvalidArgumentError("empty test set");
  }

  EvalResult result;
  result.confusion = Eigen::MatrixXi::Zero(classes, classes);
  for (int j = 0; j < test.sample_count(); ++j) {
    const Prediction pred = clf.classify(test.features().col(j), kind);
    result.confusion(test.labels()[j] - 1, pred.label - 1) += 1;
  }
  result.accuracy =
      static_cast<double>(result.confusion.trace()) / test.sample_count();
  result.per_class_accuracy.resize(classes);
  for (int c = 0; c < classes; ++c) {
    result.per_class_accuracy[c] =
        static_cast<double>(result.confusion(c, c)) /
        result.confusion.row(c).sum();
  }
  return result;
}

EvalResult evaluate(const Model& model, const LabeledDataset& test,
                    ClassifierKind kind) {
  CodingClassifier clf(model);
  return evaluate(clf, test, kind);
}

ClassifierKind select_classifier(const LabeledDataset& train,
                                 const LabelLayout& layout,
                                 const Hyperparameters& hp, int folds) {
  double gcc_total = 0.0;
  double lcc_total = 0.0;
  for (auto& [fold_train, fold_test] : split_k_folds(train, folds, hp.seed)) {
    TrainState state = xld::train(fold_train, layout, hp);
    const Model model{std::move(state.dictionary), hp.beta, hp.lambda,
                      hp.gamma, ClassifierKind::Gcc};
    CodingClassifier clf(model);
    gcc_total += evaluate(clf, fold_test, ClassifierKind::Gcc).accuracy;
    lcc_total += evaluate(clf, fold_test, ClassifierKind::Lcc).accuracy;
  }
  return lcc_total > gcc_total ? ClassifierKind::Lcc : ClassifierKind::Gcc;
}

}  // namespace xld
