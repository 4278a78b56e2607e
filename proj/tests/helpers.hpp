#pragma once

#include "xld/dataset.hpp"
#include "xld/dictionary.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

// Test-side oracles and generators. Everything here is assembled literally
// from definitions, independent of the library's closed-form code paths.
namespace xldtest {

/// Dense normalized Laplacian of a complete graph: (n-1)/(n-1) on the
/// diagonal, -1/(n-1) off it; the zero matrix for a single vertex.
inline Eigen::MatrixXd dense_class_laplacian(int n) {
  if (n <= 1) return Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd lap = Eigen::MatrixXd::Constant(n, n, -1.0 / (n - 1));
  lap.diagonal().setConstant(1.0);
  return lap;
}

inline Eigen::MatrixXd dense_block_laplacian(const std::vector<int>& sizes) {
  int total = 0;
  for (int n : sizes) total += n;
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(total, total);
  int offset = 0;
  for (int n : sizes) {
    lap.block(offset, offset, n, n) = dense_class_laplacian(n);
    offset += n;
  }
  return lap;
}

/// Dense diagonal 0/1 suppression matrix: 1 exactly on atoms outside the
/// shared block and outside class c's block.
inline Eigen::MatrixXd dense_selector(const xld::LabelLayout& layout, int c) {
  const int atoms = layout.atom_count();
  Eigen::MatrixXd sel = Eigen::MatrixXd::Identity(atoms, atoms);
  for (int k = layout.block_offset(0);
       k < layout.block_offset(0) + layout.block_size(0); ++k) {
    sel(k, k) = 0.0;
  }
  for (int k = layout.block_offset(c);
       k < layout.block_offset(c) + layout.block_size(c); ++k) {
    sel(k, k) = 0.0;
  }
  return sel;
}

inline Eigen::MatrixXd random_matrix(int rows, int cols, std::mt19937_64& rng,
                                     double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Eigen::MatrixXd out(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) out(i, j) = dist(rng);
  }
  return out;
}

inline Eigen::VectorXd random_vector(int size, std::mt19937_64& rng,
                                     double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Eigen::VectorXd out(size);
  for (int i = 0; i < size; ++i) out[i] = dist(rng);
  return out;
}

inline xld::StructuredDictionary random_dictionary(int dim,
                                                   const xld::LabelLayout& layout,
                                                   std::mt19937_64& rng) {
  Eigen::MatrixXd atoms = random_matrix(dim, layout.atom_count(), rng);
  for (int k = 0; k < atoms.cols(); ++k) atoms.col(k).normalize();
  return xld::StructuredDictionary(std::move(atoms), layout);
}

/// Dictionary whose atoms are the first K columns of a random orthonormal
/// basis (requires K <= dim).
inline xld::StructuredDictionary orthonormal_dictionary(
    int dim, const xld::LabelLayout& layout, std::mt19937_64& rng) {
  const Eigen::MatrixXd seed = random_matrix(dim, dim, rng);
  const Eigen::MatrixXd q =
      Eigen::HouseholderQR<Eigen::MatrixXd>(seed).householderQ();
  Eigen::MatrixXd atoms = q.leftCols(layout.atom_count());
  return xld::StructuredDictionary(std::move(atoms), layout);
}

/// Isotropic Gaussian classes at axis-aligned means with pairwise mean
/// distance `separation` (per-coordinate deviation `sigma`).
inline xld::LabeledDataset make_blobs(int dim, int classes, int per_class,
                                      double separation, std::uint64_t seed,
                                      double sigma = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  const double axis = separation / std::sqrt(2.0);
  Eigen::MatrixXd features(dim, classes * per_class);
  std::vector<int> labels(classes * per_class);
  int col = 0;
  for (int c = 0; c < classes; ++c) {
    for (int i = 0; i < per_class; ++i, ++col) {
      for (int r = 0; r < dim; ++r) features(r, col) = noise(rng);
      features(c % dim, col) += axis;
      labels[col] = c + 1;
    }
  }
  return xld::LabeledDataset(std::move(features), std::move(labels));
}

/// Classes with a mean direction plus low-dimensional within-class
/// variation, the regime where per-class clustering finds diverse atoms.
inline xld::LabeledDataset make_subspace_classes(int dim, int classes,
                                                 int per_class,
                                                 double mean_scale,
                                                 double sub_scale, int sub_dim,
                                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd features(dim, classes * per_class);
  std::vector<int> labels(classes * per_class);
  int col = 0;
  for (int c = 0; c < classes; ++c) {
    Eigen::MatrixXd basis(dim, sub_dim);
    for (int j = 0; j < sub_dim; ++j) {
      for (int i = 0; i < dim; ++i) basis(i, j) = gauss(rng);
    }
    for (int i = 0; i < per_class; ++i, ++col) {
      Eigen::VectorXd weights(sub_dim);
      for (int j = 0; j < sub_dim; ++j) weights[j] = gauss(rng);
      Eigen::VectorXd x = basis * (sub_scale * weights);
      for (int r = 0; r < dim; ++r) x[r] += 0.3 * gauss(rng);
      x[c % dim] += mean_scale;
      features.col(col) = x;
      labels[col] = c + 1;
    }
  }
  return xld::LabeledDataset(std::move(features), std::move(labels));
}

/// Classes dominated by one common component with a small class-specific
/// add-on, the regime where shared atoms absorb the common structure.
inline xld::LabeledDataset make_shared_structure(int dim, int classes,
                                                 int per_class,
                                                 double common_scale,
                                                 double class_scale,
                                                 double noise_scale,
                                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd common(dim);
  for (int r = 0; r < dim; ++r) common[r] = gauss(rng);
  common.normalize();
  std::vector<Eigen::VectorXd> directions(classes);
  for (int c = 0; c < classes; ++c) {
    Eigen::VectorXd v(dim);
    for (int r = 0; r < dim; ++r) v[r] = gauss(rng);
    v -= v.dot(common) * common;
    v.normalize();
    directions[c] = v;
  }
  Eigen::MatrixXd features(dim, classes * per_class);
  std::vector<int> labels(classes * per_class);
  int col = 0;
  for (int c = 0; c < classes; ++c) {
    for (int i = 0; i < per_class; ++i, ++col) {
      Eigen::VectorXd x =
          common_scale * common + class_scale * directions[c];
      for (int r = 0; r < dim; ++r) x[r] += noise_scale * gauss(rng);
      features.col(col) = x;
      labels[col] = c + 1;
    }
  }
  return xld::LabeledDataset(std::move(features), std::move(labels));
}

/// Atoms = leading canonical basis vectors: correlations with the remaining
/// basis directions are exactly zero, so zero-denominator paths are exact.
inline xld::StructuredDictionary canonical_dictionary(
    int dim, const xld::LabelLayout& layout) {
  return xld::StructuredDictionary(
      Eigen::MatrixXd::Identity(dim, layout.atom_count()), layout);
}

inline int nearest_neighbor_label(const xld::LabeledDataset& train,
                                  const Eigen::VectorXd& query) {
  int best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int j = 0; j < train.sample_count(); ++j) {
    const double d = (train.features().col(j) - query).squaredNorm();
    if (d < best_dist) {
      best_dist = d;
      best = j;
    }
  }
  return train.labels()[best];
}

// ---------------------------------------------------------------------------
// Single-column code-update oracle. The class objective, its gradient in one
// column, and the column minimizer are assembled from dense P and Laplacian
// matrices and solved with full-pivot LU, independent of the library's
// implicit closed forms and Cholesky path.
// ---------------------------------------------------------------------------

inline double dense_column_objective(const Eigen::MatrixXd& D,
                                     const Eigen::MatrixXd& Yc,
                                     const Eigen::MatrixXd& Xc, int i,
                                     const Eigen::VectorXd& x, double beta,
                                     double lambda, double gamma,
                                     const Eigen::MatrixXd& P,
                                     const Eigen::MatrixXd& L) {
  Eigen::MatrixXd codes = Xc;
  codes.col(i) = x;
  return (Yc - D * codes).squaredNorm() + beta * codes.squaredNorm() +
         lambda * (P * codes).squaredNorm() +
         gamma * (codes * L * codes.transpose()).trace();
}

inline Eigen::MatrixXd dense_column_system(const Eigen::MatrixXd& D, int i,
                                           double beta, double lambda,
                                           double gamma,
                                           const Eigen::MatrixXd& P,
                                           const Eigen::MatrixXd& L) {
  const int atoms = static_cast<int>(D.cols());
  return D.transpose() * D + lambda * P.transpose() * P +
         (beta + gamma * L(i, i)) * Eigen::MatrixXd::Identity(atoms, atoms);
}

inline Eigen::VectorXd dense_column_rhs(const Eigen::MatrixXd& D,
                                        const Eigen::MatrixXd& Yc,
                                        const Eigen::MatrixXd& Xc, int i,
                                        double gamma,
                                        const Eigen::MatrixXd& L) {
  Eigen::VectorXd rhs = D.transpose() * Yc.col(i);
  for (int j = 0; j < L.cols(); ++j) {
    if (j != i) rhs -= gamma * L(i, j) * Xc.col(j);
  }
  return rhs;
}

inline Eigen::VectorXd dense_column_minimizer(const Eigen::MatrixXd& D,
                                              const Eigen::MatrixXd& Yc,
                                              const Eigen::MatrixXd& Xc, int i,
                                              double beta, double lambda,
                                              double gamma,
                                              const Eigen::MatrixXd& P,
                                              const Eigen::MatrixXd& L) {
  const Eigen::MatrixXd system =
      dense_column_system(D, i, beta, lambda, gamma, P, L);
  return Eigen::FullPivLU<Eigen::MatrixXd>(system).solve(
      dense_column_rhs(D, Yc, Xc, i, gamma, L));
}

inline Eigen::VectorXd dense_column_gradient(const Eigen::MatrixXd& D,
                                             const Eigen::MatrixXd& Yc,
                                             const Eigen::MatrixXd& Xc, int i,
                                             const Eigen::VectorXd& x,
                                             double beta, double lambda,
                                             double gamma,
                                             const Eigen::MatrixXd& P,
                                             const Eigen::MatrixXd& L) {
  return 2.0 * (dense_column_system(D, i, beta, lambda, gamma, P, L) * x -
                dense_column_rhs(D, Yc, Xc, i, gamma, L));
}

inline Eigen::VectorXd finite_difference_gradient(
    const Eigen::MatrixXd& D, const Eigen::MatrixXd& Yc,
    const Eigen::MatrixXd& Xc, int i, const Eigen::VectorXd& x, double beta,
    double lambda, double gamma, const Eigen::MatrixXd& P,
    const Eigen::MatrixXd& L, double h) {
  Eigen::VectorXd grad(x.size());
  for (int k = 0; k < x.size(); ++k) {
    Eigen::VectorXd plus = x, minus = x;
    plus[k] += h;
    minus[k] -= h;
    grad[k] =
        (dense_column_objective(D, Yc, Xc, i, plus, beta, lambda, gamma, P, L) -
         dense_column_objective(D, Yc, Xc, i, minus, beta, lambda, gamma, P,
                                L)) /
        (2.0 * h);
  }
  return grad;
}

}  // namespace xldtest
