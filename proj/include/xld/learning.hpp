#pragma once

#include "xld/dataset.hpp"
#include "xld/dictionary.hpp"
#include "xld/laplacian.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <vector>

namespace xld {

/// Sequential updates each code column in order with the latest values of
/// the other columns (exact coordinate minimization); Batch performs one
/// matrix-form sweep using the previous block on the right-hand side.
enum class CodeUpdateMode { Sequential, Batch };

/// ClassKmeans clusters each class's samples (plus residual clustering for
/// shared atoms); RandomSamples draws the whole dictionary from randomly
/// selected training samples, ignoring class membership.
enum class InitMode { ClassKmeans, RandomSamples };

/// Suppression weights at or above this enable the restricted
/// (class-block-only) particular-atom update when fast_particular_update
/// is set.
inline constexpr double kFastUpdateLambdaThreshold = 100.0;

struct Hyperparameters {
  double beta = 2e-3;   ///< ridge weight, must be > 0
  double lambda = 2e2;  ///< cross-label suppression weight, >= 0
  double gamma = 1.0;   ///< group regularization weight, >= 0
  int max_iters = 30;
  double rel_tol = 1e-4;  ///< relative objective-change stopping tolerance
  CodeUpdateMode code_update_mode = CodeUpdateMode::Sequential;
  bool fast_particular_update = false;
  InitMode init_mode = InitMode::ClassKmeans;
  int kmeans_iters = 100;
  int kmeans_restarts = 3;
  std::uint64_t seed = 0;
};

void validate(const Hyperparameters& hp);

/// Representations aligned column-wise with the training samples.
struct CodeMatrix {
  Eigen::MatrixXd values;        // K x N
  std::vector<int> class_sizes;  // column block sizes for classes 1..C

  int class_offset(int c) const;
  Eigen::Ref<const Eigen::MatrixXd> class_block(int c) const;
  Eigen::Ref<Eigen::MatrixXd> class_block(int c);
};

struct ObjectiveBreakdown {
  double reconstruction = 0;  ///< sum_c |Y^c - D X^c|_F^2
  double ridge = 0;           ///< beta |X|_F^2
  double suppression = 0;     ///< lambda sum_c |P^c X^c|_F^2
  double group = 0;           ///< gamma tr(X L X^T)
  double total = 0;
};

struct IterationRecord {
  int iteration = 0;  ///< 0 is the post-initialization state
  ObjectiveBreakdown objective;
  double millis = 0;
};

/// Optional instrumentation; any hook may be left empty. on_atom_update
/// reports the reconstruction term before an atom's update and after its
/// unnormalized least-squares update, in single-threaded update order.
struct TrainHooks {
  std::function<void(const IterationRecord&)> on_iteration;
  std::function<void(int iteration, double total)> after_code_phase;
  std::function<void(int iteration, int atom, double recon_before,
                     double recon_after)>
      on_atom_update;
};

struct TrainState {
  StructuredDictionary dictionary;
  CodeMatrix codes;
  std::vector<ObjectiveBreakdown> history;  ///< [0] is post-initialization
  int iterations_run = 0;
  bool converged = false;
};

/// Lloyd k-means with k-means++ seeding, best of `restarts` runs by
/// within-cluster sum of squares. Centroids are column-normalized to unit
/// norm before return. Deterministic given seed.
Eigen::MatrixXd kmeans(const Eigen::MatrixXd& points, int k, int iters,
                       int restarts, std::uint64_t seed);

/// Class atoms from per-class k-means; shared atoms from k-means over the
/// per-class ridge-reconstruction residuals (skipped when the layout has no
/// shared atoms). RandomSamples mode draws normalized training samples
/// instead.
StructuredDictionary init_dictionary(const LabeledDataset& train,
                                     const LabelLayout& layout,
                                     const Hyperparameters& hp);

/// Ridge codes over the whole dictionary via one positive-definite solve.
CodeMatrix init_codes(const LabeledDataset& train,
                      const StructuredDictionary& dict, double beta);

/// One class's code-block update in the configured mode.
Eigen::MatrixXd update_codes_class(const Eigen::MatrixXd& Yc,
                                   const StructuredDictionary& dict,
                                   const SuppressionSelector& sel,
                                   const ClassLaplacian& lap,
                                   const Eigen::MatrixXd& Xc_prev,
                                   const Hyperparameters& hp);

/// Updates block c's atoms (0 = shared) in place, one atom at a time, each
/// the normalized least-squares direction against the residual with that
/// atom removed. Dead atoms are replaced by the normalized
/// worst-reconstructed sample and their code row zeroed, which may modify X.
void update_atoms_class(const Eigen::MatrixXd& Y, CodeMatrix& X,
                        StructuredDictionary& dict, int c,
                        const Hyperparameters& hp);

ObjectiveBreakdown objective(const Eigen::MatrixXd& Y,
                             const StructuredDictionary& dict,
                             const CodeMatrix& X, const BlockLaplacian& lap,
                             const Hyperparameters& hp);

/// Full alternating minimization: initialization, then per-iteration code
/// updates (classes 1..C) and atom updates (blocks 0..C), stopping on
/// relative objective change or max_iters. Single-threaded and bitwise
/// deterministic given identical inputs and seed.
TrainState train(const LabeledDataset& train_set, const LabelLayout& layout,
                 const Hyperparameters& hp, const TrainHooks* hooks = nullptr);

}  // namespace xld
