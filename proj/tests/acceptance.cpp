// Acceptance suite: prints one PASS/FAIL line per criterion and exits with
// the number of failures. Expected values come from the dense test-side
// oracles in helpers.hpp, never from the code paths under test.

#include "xld/classify.hpp"
#include "xld/dataset.hpp"
#include "xld/errors.hpp"
#include "xld/inspect.hpp"
#include "xld/learning.hpp"
#include "xld/model.hpp"

#include "helpers.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// regression baselines frozen from the first oracle run of criterion 7
// (observed: suppressed 1.0418, whole-random baseline 0.4527, factor 2.30)
constexpr double kFrozenSuppressedRatioMin = 1.00;
constexpr double kFrozenBaselineRatioMax = 0.50;

xld::Hyperparameters blob_hyper(double beta, double lambda, double gamma,
                                std::uint64_t seed) {
  xld::Hyperparameters hp;
  hp.beta = beta;
  hp.lambda = lambda;
  hp.gamma = gamma;
  hp.seed = seed;
  hp.max_iters = 30;
  return hp;
}

// --------------------------------------------------------------------------
// 1. closed-form column updates match the dense normal-equations oracle
// --------------------------------------------------------------------------
bool criterion_code_update_oracle(std::string& detail) {
  const auto start = Clock::now();
  std::mt19937_64 rng(2024);
  const xld::LabelLayout layout = xld::LabelLayout::uniform(2, 4, 2);
  std::uniform_real_distribution<double> beta_dist(1e-3, 1.0);
  std::uniform_real_distribution<double> lambda_dist(0.0, 1e3);
  std::uniform_real_distribution<double> gamma_dist(0.0, 10.0);

  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const xld::StructuredDictionary dict =
        xldtest::random_dictionary(8, layout, rng);
    const Eigen::MatrixXd Yc = xldtest::random_matrix(8, 5, rng);
    const Eigen::MatrixXd prev = xldtest::random_matrix(10, 5, rng);
    const int c = 1 + trial % 2;
    xld::Hyperparameters hp;
    hp.beta = beta_dist(rng);
    hp.lambda = lambda_dist(rng);
    hp.gamma = gamma_dist(rng);
    hp.code_update_mode = xld::CodeUpdateMode::Sequential;

    const Eigen::MatrixXd updated = xld::update_codes_class(
        Yc, dict, xld::SuppressionSelector(layout, c), xld::ClassLaplacian(5),
        prev, hp);

    const Eigen::MatrixXd P = xldtest::dense_selector(layout, c);
    const Eigen::MatrixXd L = xldtest::dense_class_laplacian(5);
    Eigen::MatrixXd oracle = prev;
    for (int j = 0; j < 5; ++j) {
      oracle.col(j) = xldtest::dense_column_minimizer(
          dict.atoms(), Yc, oracle, j, hp.beta, hp.lambda, hp.gamma, P, L);
    }
    worst = std::max(worst, (updated - oracle).norm() /
                                std::max(oracle.norm(), 1e-12));
  }
  const double elapsed = seconds_since(start);
  std::ostringstream oss;
  oss << "max relative deviation " << worst << ", " << elapsed << " s";
  detail = oss.str();
  return worst < 1e-8 && elapsed < 5.0;
}

// --------------------------------------------------------------------------
// 2. analytic single-column gradient vs central finite differences
// --------------------------------------------------------------------------
bool criterion_gradient_check(std::string& detail) {
  std::mt19937_64 rng(2025);
  const xld::LabelLayout layout = xld::LabelLayout::uniform(2, 4, 2);
  const Eigen::MatrixXd L = xldtest::dense_class_laplacian(5);
  std::uniform_real_distribution<double> beta_dist(1e-3, 1.0);
  std::uniform_real_distribution<double> lambda_dist(0.0, 1e3);
  std::uniform_real_distribution<double> gamma_dist(0.0, 10.0);

  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int c = 1 + trial % 2;
    const Eigen::MatrixXd P = xldtest::dense_selector(layout, c);
    const Eigen::MatrixXd D =
        xldtest::random_dictionary(8, layout, rng).atoms();
    const Eigen::MatrixXd Yc = xldtest::random_matrix(8, 5, rng);
    const Eigen::MatrixXd Xc = xldtest::random_matrix(10, 5, rng);
    const Eigen::VectorXd x = xldtest::random_vector(10, rng);
    const int i = trial % 5;
    const double beta = beta_dist(rng);
    const double lambda = lambda_dist(rng);
    const double gamma = gamma_dist(rng);

    const Eigen::VectorXd analytic = xldtest::dense_column_gradient(
        D, Yc, Xc, i, x, beta, lambda, gamma, P, L);
    const Eigen::VectorXd numeric = xldtest::finite_difference_gradient(
        D, Yc, Xc, i, x, beta, lambda, gamma, P, L, 1e-5);
    worst = std::max(worst, (analytic - numeric).cwiseAbs().maxCoeff() /
                                std::max(1.0, analytic.cwiseAbs().maxCoeff()));
  }
  std::ostringstream oss;
  oss << "max relative error " << worst;
  detail = oss.str();
  return worst < 1e-5;
}

// --------------------------------------------------------------------------
// 3. sequential-mode monotonicity over 30 iterations
// --------------------------------------------------------------------------
bool criterion_monotonicity(std::string& detail) {
  const auto start = Clock::now();
  const xld::LabeledDataset train_set = xld::normalize_columns(
      xldtest::make_blobs(20, 3, 30, 4.0 * std::sqrt(20.0), 7001));
  xld::Hyperparameters hp = blob_hyper(2e-3, 2e2, 1.0, 1);
  hp.rel_tol = 1e-30;  // run all 30 iterations

  double last_total = 0.0;
  int code_violations = 0;
  int atom_violations = 0;
  double worst_code = 0.0, worst_atom = 0.0;

  xld::TrainHooks hooks;
  hooks.on_iteration = [&](const xld::IterationRecord& rec) {
    last_total = rec.objective.total;
  };
  hooks.after_code_phase = [&](int, double total) {
    if (total > last_total * (1.0 + 1e-10) + 1e-12) {
      ++code_violations;
      worst_code = std::max(worst_code, total / last_total - 1.0);
    }
  };
  hooks.on_atom_update = [&](int, int, double before, double after) {
    if (after > before * (1.0 + 1e-10) + 1e-12) {
      ++atom_violations;
      worst_atom = std::max(worst_atom, after / before - 1.0);
    }
  };

  const xld::TrainState state =
      xld::train(train_set, xld::LabelLayout::uniform(3, 10, 3), hp, &hooks);
  const double elapsed = seconds_since(start);

  std::ostringstream oss;
  oss << state.iterations_run << " iterations, " << code_violations
      << " code-phase and " << atom_violations
      << " atom-update violations, " << elapsed << " s";
  detail = oss.str();
  return state.iterations_run == 30 && code_violations == 0 &&
         atom_violations == 0 && elapsed < 10.0;
}

// --------------------------------------------------------------------------
// 4. implicit Laplacian forms equal dense ones; PSD and constant nullspace
// --------------------------------------------------------------------------
bool criterion_laplacian(std::string& detail) {
  std::mt19937_64 rng(2026);
  double worst = 0.0;
  for (int n = 1; n <= 16; ++n) {
    const xld::ClassLaplacian lap(n);
    const Eigen::MatrixXd dense = xldtest::dense_class_laplacian(n);
    for (int trial = 0; trial < 50; ++trial) {
      const Eigen::VectorXd f = xldtest::random_vector(n, rng);
      worst = std::max(worst, std::abs(lap.quad_form(f) - f.dot(dense * f)));
    }
    const Eigen::MatrixXd codes = xldtest::random_matrix(4, n, rng);
    const Eigen::MatrixXd expected =
        codes * (dense - Eigen::MatrixXd::Identity(n, n));
    worst = std::max(worst,
                     (lap.rhs_term(codes) - expected).cwiseAbs().maxCoeff());
  }

  std::uniform_int_distribution<int> size(2, 16);
  std::uniform_real_distribution<double> constant(-5.0, 5.0);
  double psd_floor = 0.0, null_worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = size(rng);
    const xld::ClassLaplacian lap(n);
    psd_floor = std::min(psd_floor, lap.quad_form(xldtest::random_vector(n, rng)));
    null_worst = std::max(
        null_worst, std::abs(lap.quad_form(
                        Eigen::VectorXd::Constant(n, constant(rng)))));
  }
  std::ostringstream oss;
  oss << "max dense deviation " << worst << ", PSD floor " << psd_floor
      << ", constant-map residue " << null_worst;
  detail = oss.str();
  return worst < 1e-12 && psd_floor >= -1e-12 && null_worst < 1e-12;
}

// --------------------------------------------------------------------------
// 5. batch and sequential sweeps coincide when the group weight vanishes
// --------------------------------------------------------------------------
bool criterion_batch_sequential(std::string& detail) {
  std::mt19937_64 rng(2027);
  const xld::LabelLayout layout = xld::LabelLayout::uniform(2, 4, 2);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const xld::StructuredDictionary dict =
        xldtest::random_dictionary(8, layout, rng);
    const Eigen::MatrixXd Yc = xldtest::random_matrix(8, 5, rng);
    const Eigen::MatrixXd prev = xldtest::random_matrix(10, 5, rng);
    const xld::SuppressionSelector sel(layout, 1 + trial % 2);
    const xld::ClassLaplacian lap(5);
    xld::Hyperparameters hp;
    hp.beta = 0.02;
    hp.lambda = 13.0;
    hp.gamma = 0.0;
    hp.code_update_mode = xld::CodeUpdateMode::Sequential;
    const Eigen::MatrixXd seq =
        xld::update_codes_class(Yc, dict, sel, lap, prev, hp);
    hp.code_update_mode = xld::CodeUpdateMode::Batch;
    const Eigen::MatrixXd bat =
        xld::update_codes_class(Yc, dict, sel, lap, prev, hp);
    worst = std::max(worst, (seq - bat).cwiseAbs().maxCoeff());
  }
  std::ostringstream oss;
  oss << "max deviation " << worst;
  detail = oss.str();
  return worst < 1e-10;
}

// --------------------------------------------------------------------------
// 6. end-to-end synthetic classification across ten seeds
// --------------------------------------------------------------------------
bool criterion_end_to_end(std::string& detail) {
  double min_gcc = 1.0, min_lcc = 1.0;
  bool beats_nn = true;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const xld::LabeledDataset all = xld::normalize_columns(xldtest::make_blobs(
        20, 3, 60, 4.0 * std::sqrt(20.0), 9000 + seed));
    const auto [train_set, test_set] = xld::split_train_test(
        all, {xld::SplitSpec::Mode::PerClassCount, 30, seed});

    xld::TrainState state = xld::train(
        train_set, xld::LabelLayout::uniform(3, 10, 0),
        blob_hyper(2e-3, 2e2, 1.0, seed));
    const xld::Model model{std::move(state.dictionary), 2e-3, 2e2, 1.0,
                           xld::ClassifierKind::Gcc};
    const xld::CodingClassifier clf(model);
    const double gcc =
        evaluate(clf, test_set, xld::ClassifierKind::Gcc).accuracy;
    const double lcc =
        evaluate(clf, test_set, xld::ClassifierKind::Lcc).accuracy;

    int nn_correct = 0;
    for (int j = 0; j < test_set.sample_count(); ++j) {
      if (xldtest::nearest_neighbor_label(train_set,
                                          test_set.features().col(j)) ==
          test_set.labels()[j]) {
        ++nn_correct;
      }
    }
    const double nn =
        static_cast<double>(nn_correct) / test_set.sample_count();
    min_gcc = std::min(min_gcc, gcc);
    min_lcc = std::min(min_lcc, lcc);
    if (gcc < nn || lcc < nn) beats_nn = false;
  }
  std::ostringstream oss;
  oss << "min accuracy over seeds: gcc " << min_gcc << ", lcc " << min_lcc
      << (beats_nn ? ", both >= 1-NN" : ", BELOW the 1-NN baseline");
  detail = oss.str();
  return min_gcc >= 0.95 && min_lcc >= 0.95 && beats_nn;
}

// --------------------------------------------------------------------------
// 7. block-structure diagnostic: suppression vs whole-random baseline
// --------------------------------------------------------------------------
bool criterion_block_structure(std::string& detail) {
  const xld::LabeledDataset all = xld::normalize_columns(
      xldtest::make_blobs(20, 3, 60, 4.0 * std::sqrt(20.0), 9000));
  const auto [train_set, test_set] =
      xld::split_train_test(all, {xld::SplitSpec::Mode::PerClassCount, 30, 0});
  const xld::LabelLayout layout = xld::LabelLayout::uniform(3, 10, 0);

  xld::TrainState suppressed =
      xld::train(train_set, layout, blob_hyper(2e-3, 2e2, 1.0, 0));
  const xld::Model model_a{std::move(suppressed.dictionary), 2e-3, 2e2, 1.0,
                           xld::ClassifierKind::Gcc};

  xld::Hyperparameters baseline_hp = blob_hyper(2e-3, 0.0, 0.0, 0);
  baseline_hp.init_mode = xld::InitMode::RandomSamples;
  xld::TrainState baseline = xld::train(train_set, layout, baseline_hp);
  const xld::Model model_b{std::move(baseline.dictionary), 2e-3, 0.0, 0.0,
                           xld::ClassifierKind::Gcc};

  auto mean_ratio = [&](const xld::Model& model) {
    const xld::InspectReport report = xld::inspect_codes(model, test_set);
    double sum = 0.0;
    for (double r : report.block_mass_ratio) sum += r;
    return sum / report.block_mass_ratio.size();
  };
  const double ratio_a = mean_ratio(model_a);
  const double ratio_b = mean_ratio(model_b);

  std::ostringstream oss;
  oss << "suppressed ratio " << ratio_a << " vs baseline " << ratio_b;
  detail = oss.str();
  return ratio_a >= 2.0 * ratio_b && ratio_a >= kFrozenSuppressedRatioMin &&
         ratio_b <= kFrozenBaselineRatioMax;
}

// --------------------------------------------------------------------------
// 8. training wall-clock and cached per-query classification speed
// --------------------------------------------------------------------------
bool criterion_speed(std::string& detail) {
  const xld::LabeledDataset train_set = xld::normalize_columns(
      xldtest::make_blobs(300, 38, 32, 4.0 * std::sqrt(300.0), 7777));
  xld::Hyperparameters hp = blob_hyper(8e-3, 2e3, 2e-2, 0);
  hp.rel_tol = 1e-30;  // force the full 30 iterations

  const auto train_start = Clock::now();
  xld::TrainState state =
      xld::train(train_set, xld::LabelLayout::uniform(38, 10, 0), hp);
  const double train_seconds = seconds_since(train_start);

  const xld::Model model{std::move(state.dictionary), hp.beta, hp.lambda,
                         hp.gamma, xld::ClassifierKind::Gcc};
  const xld::CodingClassifier clf(model);
  clf.gcc_classify(train_set.features().col(0));  // build the cache

  const auto query_start = Clock::now();
  for (int q = 0; q < 100; ++q) {
    clf.gcc_classify(train_set.features().col(q));
  }
  const double ms_per_query = 1000.0 * seconds_since(query_start) / 100.0;

  std::ostringstream oss;
  oss << state.iterations_run << " iterations in " << train_seconds
      << " s, gcc query " << ms_per_query << " ms";
  detail = oss.str();
  return state.iterations_run == 30 && train_seconds < 60.0 &&
         ms_per_query < 1.0;
}

// --------------------------------------------------------------------------
// 9. degenerate cases complete and honor their contracts
// --------------------------------------------------------------------------
bool criterion_degenerate(std::string& detail) {
  std::mt19937_64 rng(2028);

  // single-sample classes, no shared atoms
  {
    const Eigen::MatrixXd features = xldtest::random_matrix(6, 4, rng);
    const xld::LabeledDataset tiny(features, {1, 2, 3, 4});
    xld::Hyperparameters hp = blob_hyper(1e-2, 5.0, 0.5, 0);
    hp.max_iters = 3;
    xld::TrainState state =
        xld::train(tiny, xld::LabelLayout::uniform(4, 1, 0), hp);
    if (!std::isfinite(state.history.back().total)) {
      detail = "single-sample training produced a non-finite objective";
      return false;
    }
    const xld::Model model{std::move(state.dictionary), hp.beta, hp.lambda,
                           hp.gamma, xld::ClassifierKind::Gcc};
    const xld::CodingClassifier clf(model);
    const xld::Prediction pred = clf.gcc_classify(features.col(0));
    if (pred.label < 1 || pred.label > 4) {
      detail = "single-sample prediction out of range";
      return false;
    }
  }

  // dead atom: zero code row is replaced and zeroed
  {
    Eigen::MatrixXd start(3, 1);
    start << 0, 0, 1;
    xld::StructuredDictionary dict(start, xld::LabelLayout({1}, 0));
    const Eigen::MatrixXd Y = xldtest::random_matrix(3, 4, rng);
    xld::CodeMatrix codes{Eigen::MatrixXd::Zero(1, 4), {4}};
    xld::Hyperparameters hp = blob_hyper(1e-2, 0.0, 0.0, 0);
    xld::update_atoms_class(Y, codes, dict, 1, hp);
    if (std::abs(dict.atoms().col(0).norm() - 1.0) > 1e-10 ||
        codes.values.row(0).cwiseAbs().maxCoeff() != 0.0) {
      detail = "dead-atom replacement broke its contract";
      return false;
    }
  }

  // zero GCC denominators: empty blocks score +inf, classification proceeds;
  // a query with no coefficient mass anywhere is an explicit error
  {
    const xld::LabelLayout layout = xld::LabelLayout::uniform(2, 2, 0);
    const xld::StructuredDictionary dict =
        xldtest::canonical_dictionary(8, layout);
    const xld::Prediction pred =
        xld::gcc_classify(dict.atoms().col(3), dict, 1e-3);
    if (pred.label != 2 || !std::isinf(pred.scores[0])) {
      detail = "orthogonal-block query did not score +inf";
      return false;
    }
    bool threw = false;
    try {
      xld::gcc_classify(Eigen::MatrixXd::Identity(8, 8).col(6), dict, 1e-3);
    } catch (const xld::UnclassifiableError&) {
      threw = true;
    }
    if (!threw) {
      detail = "zero-mass query did not raise the unclassifiable error";
      return false;
    }
  }

  detail = "single-sample classes, empty shared block, dead atoms, zero "
           "denominators";
  return true;
}

// --------------------------------------------------------------------------
// 10. model round-trip: bitwise-identical predictions
// --------------------------------------------------------------------------
bool criterion_round_trip(std::string& detail) {
  std::mt19937_64 rng(2029);
  const xld::LabelLayout layout = xld::LabelLayout::uniform(4, 5, 3);
  const xld::Model model{xldtest::random_dictionary(12, layout, rng), 3e-3,
                         2e2, 1.0, xld::ClassifierKind::Gcc};
  const std::string path =
      (std::filesystem::temp_directory_path() / "xld_acceptance_model.xldm")
          .string();
  xld::save_model(model, path);
  const xld::Model loaded = xld::load_model(path);
  std::remove(path.c_str());

  const xld::CodingClassifier original(model);
  const xld::CodingClassifier restored(loaded);
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::VectorXd y = xldtest::random_vector(12, rng);
    const xld::ClassifierKind kind = trial % 2 == 0
                                         ? xld::ClassifierKind::Gcc
                                         : xld::ClassifierKind::Lcc;
    const xld::Prediction a = original.classify(y, kind);
    const xld::Prediction b = restored.classify(y, kind);
    if (a.label != b.label || a.scores != b.scores) {
      detail = "prediction diverged after reload at trial " +
               std::to_string(trial);
      return false;
    }
  }
  detail = "1000 queries bitwise identical";
  return true;
}

struct Criterion {
  int id;
  const char* name;
  std::function<bool(std::string&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "code-update oracle", criterion_code_update_oracle},
      {2, "gradient check", criterion_gradient_check},
      {3, "sequential monotonicity", criterion_monotonicity},
      {4, "Laplacian correctness", criterion_laplacian},
      {5, "batch/sequential agreement", criterion_batch_sequential},
      {6, "end-to-end synthetic classification", criterion_end_to_end},
      {7, "block-structure diagnostic", criterion_block_structure},
      {8, "speed", criterion_speed},
      {9, "degenerate handling", criterion_degenerate},
      {10, "model round-trip", criterion_round_trip},
  };

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    std::string note;
    bool ok = false;
    try {
      ok = criterion.run(note);
    } catch (const std::exception& e) {
      note = std::string("exception: ") + e.what();
    }
    if (!ok) ++failures;
    std::printf("[%s] criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL",
                criterion.id, criterion.name, note.c_str());
    std::fflush(stdout);
  }
  return failures;
}
