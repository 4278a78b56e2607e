#include "xld/learning.hpp"

#include "xld/errors.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace xld {

namespace {

// stream tags for deriving independent RNG seeds from the one user seed
constexpr std::uint64_t kStreamSharedAtoms = 0;
constexpr std::uint64_t kStreamClassAtoms = 1;  // + class index
constexpr std::uint64_t kStreamRandomInit = 1u << 20;
constexpr std::uint64_t kStreamDeadAtoms = 1u << 21;

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double elapsed_ms(std::chrono::steady_clock::time_point from) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - from)
      .count();
}

Eigen::MatrixXd kmeanspp_seed(const Eigen::MatrixXd& points, int k,
                              std::mt19937_64& rng) {
  const int n = static_cast<int>(points.cols());
  Eigen::MatrixXd centroids(points.rows(), k);
  std::uniform_int_distribution<int> uniform(0, n - 1);
  centroids.col(0) = points.col(uniform(rng));
  Eigen::VectorXd d2 =
      (points.colwise() - centroids.col(0)).colwise().squaredNorm();
  for (int i = 1; i < k; ++i) {
    const double sum = d2.sum();
    int chosen;
    if (sum > 0.0) {
      std::uniform_real_distribution<double> pick(0.0, sum);
      const double r = pick(rng);
      chosen = n - 1;
      double acc = 0.0;
      for (int j = 0; j < n; ++j) {
        acc += d2[j];
        if (acc >= r) {
          chosen = j;
          break;
        }
      }
    } else {
      chosen = uniform(rng);
    }
    centroids.col(i) = points.col(chosen);
    d2 = d2.cwiseMin(
        (points.colwise() - centroids.col(i)).colwise().squaredNorm().transpose());
  }
  return centroids;
}

bool assign_points(const Eigen::MatrixXd& points,
                   const Eigen::MatrixXd& centroids,
                   std::vector<int>& assignment) {
  const Eigen::MatrixXd gram = centroids.transpose() * points;  // k x n
  const Eigen::VectorXd half_norms =
      0.5 * centroids.colwise().squaredNorm().transpose();
  bool changed = false;
  for (int j = 0; j < points.cols(); ++j) {
    int best = 0;
    double best_score = gram(0, j) - half_norms[0];
    for (int i = 1; i < centroids.cols(); ++i) {
      const double score = gram(i, j) - half_norms[i];
      if (score > best_score) {
        best_score = score;
        best = i;
      }
    }
    if (assignment[j] != best) {
      assignment[j] = best;
      changed = true;
    }
  }
  return changed;
}

double nearest_centroid_wcss(const Eigen::MatrixXd& points,
                             const Eigen::MatrixXd& centroids) {
  double wcss = 0.0;
  for (int j = 0; j < points.cols(); ++j) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < centroids.cols(); ++i) {
      best = std::min(best, (points.col(j) - centroids.col(i)).squaredNorm());
    }
    wcss += best;
  }
  return wcss;
}

}  // namespace

void validate(const Hyperparameters& hp) {
  if (!(hp.beta > 0.0) || !std::isfinite(hp.beta)) {
    throw InvalidArgumentError("beta must be finite and > 0");
  }
  if (hp.lambda < 0.0 || !std::isfinite(hp.lambda)) {
    throw InvalidArgumentError("lambda must be finite and >= 0");
  }
  if (hp.gamma < 0.0 || !std::isfinite(hp.gamma)) {
    throw InvalidArgumentError("gamma must be finite and >= 0");
  }
  if (hp.max_iters < 1) throw InvalidArgumentError("max_iters must be >= 1");
  if (!(hp.rel_tol > 0.0)) throw InvalidArgumentError("rel_tol must be > 0");
  if (hp.kmeans_iters < 1 || hp.kmeans_restarts < 1) {
    throw InvalidArgumentError("k-means iterations and restarts must be >= 1");
  }
}

int CodeMatrix::class_offset(int c) const {
  if (c < 1 || c > static_cast<int>(class_sizes.size())) {
    throw InvalidArgumentError("class " + std::to_string(c) + " outside 1.." +
                               std::to_string(class_sizes.size()));
  }
  return std::accumulate(class_sizes.begin(), class_sizes.begin() + (c - 1), 0);
}

Eigen::Ref<const Eigen::MatrixXd> CodeMatrix::class_block(int c) const {
  return values.middleCols(class_offset(c), class_sizes[c - 1]);
}

Eigen::Ref<Eigen::MatrixXd> CodeMatrix::class_block(int c) {
  return values.middleCols(class_offset(c), class_sizes[c - 1]);
}

Eigen::MatrixXd kmeans(const Eigen::MatrixXd& points, int k, int iters,
                       int restarts, std::uint64_t seed) {
  const int n = static_cast<int>(points.cols());
  if (k < 1) throw InvalidArgumentError("k-means needs k >= 1");
  if (k > n) {
    throw InvalidArgumentError("k-means: k = " + std::to_string(k) +
                               " exceeds point count " + std::to_string(n));
  }
  if (iters < 1 || restarts < 1) {
    throw InvalidArgumentError("k-means iterations and restarts must be >= 1");
  }

  std::mt19937_64 rng(seed);
  Eigen::MatrixXd best_centroids;
  double best_wcss = std::numeric_limits<double>::infinity();

  for (int r = 0; r < restarts; ++r) {
    Eigen::MatrixXd centroids = kmeanspp_seed(points, k, rng);
    std::vector<int> assignment(n, -1);
    for (int it = 0; it < iters; ++it) {
      bool changed = assign_points(points, centroids, assignment);

      // refill empty clusters with the point that fits its own cluster worst
      std::vector<int> counts(k, 0);
      for (int a : assignment) ++counts[a];
      for (int e = 0; e < k; ++e) {
        if (counts[e] > 0) continue;
        int worst = -1;
        double worst_dist = -1.0;
        for (int j = 0; j < n; ++j) {
          if (counts[assignment[j]] < 2) continue;
          const double d =
              (points.col(j) - centroids.col(assignment[j])).squaredNorm();
          if (d > worst_dist) {
            worst_dist = d;
            worst = j;
          }
        }
        if (worst < 0) continue;
        --counts[assignment[worst]];
        assignment[worst] = e;
        ++counts[e];
        centroids.col(e) = points.col(worst);
        changed = true;
      }

      Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(points.rows(), k);
      for (int j = 0; j < n; ++j) sums.col(assignment[j]) += points.col(j);
      for (int i = 0; i < k; ++i) {
        if (counts[i] > 0) centroids.col(i) = sums.col(i) / counts[i];
      }
      if (!changed) break;
    }
    const double wcss = nearest_centroid_wcss(points, centroids);
    if (wcss < best_wcss) {
      best_wcss = wcss;
      best_centroids = std::move(centroids);
    }
  }

  // unit-normalize; a zero centroid is restarted at the worst-fit point
  std::vector<bool> used(n, false);
  for (int i = 0; i < k; ++i) {
    double norm = best_centroids.col(i).norm();
    if (norm < 1e-12) {
      int worst = -1;
      double worst_dist = -1.0;
      for (int j = 0; j < n; ++j) {
        if (used[j] || points.col(j).norm() < 1e-12) continue;
        double nearest = std::numeric_limits<double>::infinity();
        for (int ci = 0; ci < k; ++ci) {
          nearest = std::min(
              nearest, (points.col(j) - best_centroids.col(ci)).squaredNorm());
        }
        if (nearest > worst_dist) {
          worst_dist = nearest;
          worst = j;
        }
      }
      if (worst < 0) {
        throw DegenerateSampleError(
            "k-means produced a zero centroid and no nonzero point remains");
      }
      used[worst] = true;
      best_centroids.col(i) = points.col(worst);
      norm = best_centroids.col(i).norm();
    }
    best_centroids.col(i) /= norm;
  }
  return best_centroids;
}

StructuredDictionary init_dictionary(const LabeledDataset& train,
                                     const LabelLayout& layout,
                                     const Hyperparameters& hp) {
  validate(hp);
  if (train.class_count() != layout.class_count()) {
    throw DimensionMismatchError(
        "dataset has " + std::to_string(train.class_count()) +
        " classes, layout expects " + std::to_string(layout.class_count()));
  }

  Eigen::MatrixXd atoms(train.feature_dim(), layout.atom_count());

  if (hp.init_mode == InitMode::RandomSamples) {
    if (layout.atom_count() > train.sample_count()) {
      throw InvalidArgumentError("random initialization needs at least " +
                                 std::to_string(layout.atom_count()) +
                                 " samples");
    }
    std::mt19937_64 rng(derive_seed(hp.seed, kStreamRandomInit));
    std::vector<int> order(train.sample_count());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    int taken = 0;
    for (int j : order) {
      const double norm = train.features().col(j).norm();
      if (norm < 1e-12) continue;
      atoms.col(taken++) = train.features().col(j) / norm;
      if (taken == layout.atom_count()) break;
    }
    if (taken < layout.atom_count()) {
      throw DegenerateSampleError(
          "not enough nonzero samples for random initialization");
    }
    return StructuredDictionary(std::move(atoms), layout);
  }

  for (int c = 1; c <= layout.class_count(); ++c) {
    if (train.class_size(c) < layout.block_size(c)) {
      throw InvalidArgumentError(
          "class " + std::to_string(c) + " has " +
          std::to_string(train.class_size(c)) + " samples, fewer than its " +
          std::to_string(layout.block_size(c)) + " atoms");
    }
    atoms.middleCols(layout.block_offset(c), layout.block_size(c)) =
        kmeans(train.class_block(c), layout.block_size(c), hp.kmeans_iters,
               hp.kmeans_restarts, derive_seed(hp.seed, kStreamClassAtoms + c));
  }

  if (layout.shared_count() > 0) {
    if (train.sample_count() < layout.shared_count()) {
      throw InvalidArgumentError("fewer samples than shared atoms");
    }
    // shared atoms cluster what the per-class ridge reconstructions miss
    Eigen::MatrixXd residuals(train.feature_dim(), train.sample_count());
    for (int c = 1; c <= layout.class_count(); ++c) {
      const auto part =
          atoms.middleCols(layout.block_offset(c), layout.block_size(c));
      Eigen::MatrixXd gram = part.transpose() * part;
      gram.diagonal().array() += hp.beta;
      Eigen::LLT<Eigen::MatrixXd> llt(gram);
      if (llt.info() != Eigen::Success) {
        throw SolveError("initialization: ridge solve failed for class " +
                         std::to_string(c));
      }
      const auto block = train.class_block(c);
      residuals.middleCols(train.class_offset(c), train.class_size(c)) =
          block - part * llt.solve(part.transpose() * block);
    }
    atoms.leftCols(layout.shared_count()) =
        kmeans(residuals, layout.shared_count(), hp.kmeans_iters,
               hp.kmeans_restarts, derive_seed(hp.seed, kStreamSharedAtoms));
  }

  return StructuredDictionary(std::move(atoms), layout);
}

CodeMatrix init_codes(const LabeledDataset& train,
                      const StructuredDictionary& dict, double beta) {
  if (train.feature_dim() != dict.feature_dim()) {
    throw DimensionMismatchError("dataset dimension " +
                                 std::to_string(train.feature_dim()) +
                                 " does not match dictionary dimension " +
                                 std::to_string(dict.feature_dim()));
  }
  if (!(beta > 0.0)) throw InvalidArgumentError("beta must be > 0");

  Eigen::MatrixXd gram = dict.atoms().transpose() * dict.atoms();
  gram.diagonal().array() += beta;
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw SolveError("initial coding: factorization failed");
  }
  CodeMatrix codes{llt.solve(dict.atoms().transpose() * train.features()),
                   train.class_sizes()};
  if (!codes.values.allFinite()) {
    throw NonFiniteValueError("initial codes are non-finite");
  }
  return codes;
}

namespace {

// One class's code-block update from precomputed D^T D and D^T Y^c.
Eigen::MatrixXd update_codes_block(const Eigen::MatrixXd& gram,
                                   Eigen::Ref<const Eigen::MatrixXd> dty,
                                   const SuppressionSelector& sel,
                                   const ClassLaplacian& lap,
                                   Eigen::Ref<const Eigen::MatrixXd> prev,
                                   const Hyperparameters& hp) {
  const int n = lap.size();
  const bool batch = hp.code_update_mode == CodeUpdateMode::Batch;

  Eigen::MatrixXd system = gram;
  if (hp.lambda != 0.0) {
    for (int k : sel.active_indices()) system(k, k) += hp.lambda;
  }
  system.diagonal().array() +=
      batch ? hp.beta + hp.gamma : hp.beta + hp.gamma * lap.diagonal_entry();

  Eigen::LLT<Eigen::MatrixXd> llt(system);
  if (llt.info() != Eigen::Success) {
    throw SolveError("code update: factorization failed for class " +
                     std::to_string(sel.class_label()) +
                     " (non-finite input?)");
  }

  if (batch) {
    if (hp.gamma == 0.0) return llt.solve(dty);
    return llt.solve(dty - hp.gamma * lap.rhs_term(prev));
  }

  // sequential: exact minimization over one column at a time, always using
  // the other columns' latest values
  if (hp.gamma == 0.0 || n == 1) return llt.solve(dty);

  Eigen::MatrixXd codes = prev;
  Eigen::VectorXd column_sum = codes.rowwise().sum();
  const double couple = hp.gamma / (n - 1);
  for (int j = 0; j < n; ++j) {
    const Eigen::VectorXd rhs =
        dty.col(j) + couple * (column_sum - codes.col(j));
    const Eigen::VectorXd updated = llt.solve(rhs);
    column_sum += updated - codes.col(j);
    codes.col(j) = updated;
  }
  return codes;
}

Eigen::VectorXd replacement_atom(const Eigen::MatrixXd& residual,
                                 const Eigen::MatrixXd& Y, const CodeMatrix& X,
                                 int c, std::mt19937_64& rng) {
  int col0 = 0;
  int ncols = static_cast<int>(residual.cols());
  if (c >= 1) {
    col0 = X.class_offset(c);
    ncols = X.class_sizes[c - 1];
  }
  int worst = col0;
  double worst_err = -1.0;
  for (int j = col0; j < col0 + ncols; ++j) {
    const double err = residual.col(j).squaredNorm();
    if (err > worst_err) {
      worst_err = err;
      worst = j;
    }
  }
  Eigen::VectorXd atom = Y.col(worst);
  double norm = atom.norm();
  while (norm < 1e-12) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int r = 0; r < atom.size(); ++r) atom[r] = gauss(rng);
    norm = atom.norm();
  }
  return atom / norm;
}

// Updates block c's atoms against a maintained residual E = Y - D X, which
// stays exact across calls. `restricted` work (numerator and code-row norm)
// may be limited to the class's own columns; E is always kept global.
void update_atoms_block(Eigen::MatrixXd& E, const Eigen::MatrixXd& Y,
                        CodeMatrix& X, StructuredDictionary& dict, int c,
                        const Hyperparameters& hp, std::mt19937_64& rng,
                        const TrainHooks* hooks, int iteration) {
  const LabelLayout& layout = dict.layout();
  const int begin = layout.block_offset(c);
  const int size = layout.block_size(c);
  Eigen::MatrixXd& atoms = dict.mutable_atoms();

  const bool restricted = c >= 1 && hp.fast_particular_update &&
                          hp.lambda >= kFastUpdateLambdaThreshold;
  int col0 = 0;
  int ncols = static_cast<int>(X.values.cols());
  if (restricted) {
    col0 = X.class_offset(c);
    ncols = X.class_sizes[c - 1];
  }

  const bool tracking = hooks && hooks->on_atom_update;

  for (int i = begin; i < begin + size; ++i) {
    const double recon_before = tracking ? E.squaredNorm() : 0.0;
    const auto code_row = X.values.row(i).segment(col0, ncols);
    const double row_norm2 = code_row.squaredNorm();
    // least-squares numerator: (E + d_i xrow) xrow^T over the active columns
    Eigen::VectorXd numerator =
        E.middleCols(col0, ncols) * code_row.transpose() +
        row_norm2 * atoms.col(i);
    const double numerator_norm = numerator.norm();

    if (row_norm2 == 0.0 || numerator_norm < 1e-10) {
      // dead atom: fold its contribution back into the residual, zero the
      // code row, restart it at the worst-reconstructed sample
      E.noalias() += atoms.col(i) * X.values.row(i);
      X.values.row(i).setZero();
      atoms.col(i) = replacement_atom(E, Y, X, c, rng);
      if (tracking) {
        hooks->on_atom_update(iteration, i, recon_before, E.squaredNorm());
      }
      continue;
    }

    if (tracking) {
      const Eigen::VectorXd least_squares = numerator / row_norm2;
      const Eigen::MatrixXd shifted =
          E + (atoms.col(i) - least_squares) * X.values.row(i);
      hooks->on_atom_update(iteration, i, recon_before, shifted.squaredNorm());
    }

    const Eigen::VectorXd direction = numerator / numerator_norm;
    E.noalias() += (atoms.col(i) - direction) * X.values.row(i);
    atoms.col(i) = direction;
  }
}

void check_training_shapes(const Eigen::MatrixXd& Y,
                           const StructuredDictionary& dict,
                           const CodeMatrix& X) {
  if (Y.rows() != dict.feature_dim()) {
    throw DimensionMismatchError("sample dimension does not match dictionary");
  }
  if (X.values.rows() != dict.atom_count()) {
    throw DimensionMismatchError("code rows do not match atom count");
  }
  const int total =
      std::accumulate(X.class_sizes.begin(), X.class_sizes.end(), 0);
  if (Y.cols() != X.values.cols() || total != X.values.cols()) {
    throw DimensionMismatchError("code columns do not match sample count");
  }
}

}  // namespace

Eigen::MatrixXd update_codes_class(const Eigen::MatrixXd& Yc,
                                   const StructuredDictionary& dict,
                                   const SuppressionSelector& sel,
                                   const ClassLaplacian& lap,
                                   const Eigen::MatrixXd& Xc_prev,
                                   const Hyperparameters& hp) {
  validate(hp);
  if (Yc.rows() != dict.feature_dim()) {
    throw DimensionMismatchError("sample dimension does not match dictionary");
  }
  if (Yc.cols() != lap.size() || Xc_prev.cols() != lap.size()) {
    throw DimensionMismatchError("class block width does not match class size");
  }
  if (Xc_prev.rows() != dict.atom_count()) {
    throw DimensionMismatchError("code rows do not match atom count");
  }
  const Eigen::MatrixXd gram = dict.atoms().transpose() * dict.atoms();
  const Eigen::MatrixXd dty = dict.atoms().transpose() * Yc;
  return update_codes_block(gram, dty, sel, lap, Xc_prev, hp);
}

void update_atoms_class(const Eigen::MatrixXd& Y, CodeMatrix& X,
                        StructuredDictionary& dict, int c,
                        const Hyperparameters& hp) {
  validate(hp);
  check_training_shapes(Y, dict, X);
  if (c < 0 || c > dict.layout().class_count()) {
    throw InvalidArgumentError("block index " + std::to_string(c) +
                               " outside 0.." +
                               std::to_string(dict.layout().class_count()));
  }
  if (dict.layout().block_size(c) == 0) return;
  Eigen::MatrixXd residual = Y - dict.atoms() * X.values;
  std::mt19937_64 rng(derive_seed(hp.seed, kStreamDeadAtoms + c));
  update_atoms_block(residual, Y, X, dict, c, hp, rng, nullptr, 0);
}

ObjectiveBreakdown objective(const Eigen::MatrixXd& Y,
                             const StructuredDictionary& dict,
                             const CodeMatrix& X, const BlockLaplacian& lap,
                             const Hyperparameters& hp) {
  check_training_shapes(Y, dict, X);
  if (lap.size() != Y.cols()) {
    throw DimensionMismatchError("Laplacian size does not match sample count");
  }

  ObjectiveBreakdown parts;
  parts.reconstruction = (Y - dict.atoms() * X.values).squaredNorm();
  parts.ridge = hp.beta * X.values.squaredNorm();
  if (hp.lambda != 0.0) {
    double mass = 0.0;
    for (int c = 1; c <= dict.layout().class_count(); ++c) {
      mass += SuppressionSelector(dict.layout(), c)
                  .squared_mass(X.class_block(c));
    }
    parts.suppression = hp.lambda * mass;
  }
  if (hp.gamma != 0.0) {
    parts.group = hp.gamma * lap.total_variation(X.values);
  }
  parts.total =
      parts.reconstruction + parts.ridge + parts.suppression + parts.group;
  return parts;
}

TrainState train(const LabeledDataset& train_set, const LabelLayout& layout,
                 const Hyperparameters& hp, const TrainHooks* hooks) {
  validate(hp);
  if (train_set.sample_count() == 0) {
    throw InvalidArgumentError("empty training set");
  }
  if (train_set.class_count() != layout.class_count()) {
    throw DimensionMismatchError(
        "dataset has " + std::to_string(train_set.class_count()) +
        " classes, layout expects " + std::to_string(layout.class_count()));
  }

  auto started = std::chrono::steady_clock::now();

  TrainState state{init_dictionary(train_set, layout, hp),
                   CodeMatrix{},
                   {},
                   0,
                   false};
  state.codes = init_codes(train_set, state.dictionary, hp.beta);

  const Eigen::MatrixXd& Y = train_set.features();
  const BlockLaplacian laplacian(train_set.class_sizes());
  std::vector<SuppressionSelector> selectors;
  selectors.reserve(layout.class_count());
  for (int c = 1; c <= layout.class_count(); ++c) {
    selectors.emplace_back(layout, c);
  }
  std::mt19937_64 dead_atom_rng(derive_seed(hp.seed, kStreamDeadAtoms));

  ObjectiveBreakdown parts =
      objective(Y, state.dictionary, state.codes, laplacian, hp);
  if (!std::isfinite(parts.total)) {
    throw SolveError("objective is non-finite after initialization");
  }
  state.history.push_back(parts);
  if (hooks && hooks->on_iteration) {
    hooks->on_iteration({0, parts, elapsed_ms(started)});
  }

  for (int iter = 1; iter <= hp.max_iters; ++iter) {
    const auto iter_started = std::chrono::steady_clock::now();

    // code phase, classes in label order
    const Eigen::MatrixXd gram =
        state.dictionary.atoms().transpose() * state.dictionary.atoms();
    const Eigen::MatrixXd dty = state.dictionary.atoms().transpose() * Y;
    for (int c = 1; c <= layout.class_count(); ++c) {
      const int offset = state.codes.class_offset(c);
      const int width = state.codes.class_sizes[c - 1];
      state.codes.class_block(c) = update_codes_block(
          gram, dty.middleCols(offset, width), selectors[c - 1],
          laplacian.blocks()[c - 1], state.codes.class_block(c), hp);
    }
    if (hooks && hooks->after_code_phase) {
      hooks->after_code_phase(
          iter, objective(Y, state.dictionary, state.codes, laplacian, hp).total);
    }

    // atom phase, shared block first
    Eigen::MatrixXd residual = Y - state.dictionary.atoms() * state.codes.values;
    for (int c = 0; c <= layout.class_count(); ++c) {
      if (layout.block_size(c) == 0) continue;
      update_atoms_block(residual, Y, state.codes, state.dictionary, c, hp,
                         dead_atom_rng, hooks, iter);
    }

    parts = objective(Y, state.dictionary, state.codes, laplacian, hp);
    if (!std::isfinite(parts.total)) {
      throw SolveError("objective became non-finite at iteration " +
                       std::to_string(iter));
    }
    const double previous = state.history.back().total;
    state.history.push_back(parts);
    state.iterations_run = iter;
    if (hooks && hooks->on_iteration) {
      hooks->on_iteration({iter, parts, elapsed_ms(iter_started)});
    }

    const bool settled = previous > 0.0
                             ? std::abs(parts.total - previous) / previous <
                                   hp.rel_tol
                             : parts.total == previous;
    if (settled) {
      state.converged = true;
      break;
    }
  }
  return state;
}

}  // namespace xld
