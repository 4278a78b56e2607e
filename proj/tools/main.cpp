#include "xld/classify.hpp"
#include "xld/dataset.hpp"
#include "xld/errors.hpp"
#include "xld/inspect.hpp"
#include "xld/learning.hpp"
#include "xld/model.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace {

using nlohmann::json;

/// Semantic flag conflicts discovered after parsing; mapped to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ReportFormat { Text, Csv, JsonLines };

ReportFormat parse_format(const std::string& name) {
  if (name == "text") return ReportFormat::Text;
  if (name == "csv") return ReportFormat::Csv;
  if (name == "json-lines") return ReportFormat::JsonLines;
  throw UsageError("unknown format '" + name + "'");
}

std::string fmt_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

/// Output sink: stdout unless --out was given.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw xld::IoError("cannot write " + path);
    }
  }
  std::ostream& out() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

struct HyperFlags {
  double beta = 2e-3;
  double lambda = 2e2;
  double gamma = 1.0;
  int max_iters = 30;
  double rel_tol = 1e-4;
  std::string mode = "seq";
  bool fast = false;
  std::string init = "kmeans";
  int kmeans_iters = 100;
  int kmeans_restarts = 3;
  std::uint64_t seed = 0;

  xld::Hyperparameters to_hp() const {
    xld::Hyperparameters hp;
    hp.beta = beta;
    hp.lambda = lambda;
    hp.gamma = gamma;
    hp.max_iters = max_iters;
    hp.rel_tol = rel_tol;
    hp.code_update_mode = mode == "batch" ? xld::CodeUpdateMode::Batch
                                          : xld::CodeUpdateMode::Sequential;
    hp.fast_particular_update = fast;
    hp.init_mode = init == "random" ? xld::InitMode::RandomSamples
                                    : xld::InitMode::ClassKmeans;
    hp.kmeans_iters = kmeans_iters;
    hp.kmeans_restarts = kmeans_restarts;
    hp.seed = seed;
    return hp;
  }
};

void add_hyper_flags(CLI::App* cmd, HyperFlags& f) {
  cmd->add_option("--beta", f.beta, "ridge weight (> 0)");
  cmd->add_option("--lambda", f.lambda, "cross-label suppression weight");
  cmd->add_option("--gamma", f.gamma, "group regularization weight");
  cmd->add_option("--max-iters", f.max_iters, "outer iteration cap");
  cmd->add_option("--rel-tol", f.rel_tol, "relative objective-change tolerance");
  cmd->add_option("--mode", f.mode, "code update mode")
      ->check(CLI::IsMember({"seq", "batch"}));
  cmd->add_flag("--fast", f.fast,
                "restrict particular-atom updates to their class block when "
                "lambda is large");
  cmd->add_option("--init", f.init, "dictionary initialization")
      ->check(CLI::IsMember({"kmeans", "random"}));
  cmd->add_option("--kmeans-iters", f.kmeans_iters, "k-means iteration cap");
  cmd->add_option("--kmeans-restarts", f.kmeans_restarts, "k-means restarts");
  cmd->add_option("--seed", f.seed, "random seed (echoed in reports)");
}

struct LayoutFlags {
  int atoms_per_class = 0;  // 0 = derive as train-count-per-class minus one
  int shared = 0;
};

void add_layout_flags(CLI::App* cmd, LayoutFlags& f) {
  cmd->add_option("--atoms-per-class", f.atoms_per_class,
                  "label-particular atoms per class (default: per-class "
                  "train count minus one)");
  cmd->add_option("--shared", f.shared, "shared atom count");
}

xld::LabelLayout resolve_layout(const LayoutFlags& flags, int classes,
                                int min_train_per_class) {
  int per_class = flags.atoms_per_class;
  if (per_class <= 0) per_class = std::max(1, min_train_per_class - 1);
  return xld::LabelLayout::uniform(classes, per_class, flags.shared);
}

xld::LabeledDataset load_prepared(const std::string& path, bool normalize) {
  xld::LabeledDataset ds = xld::load_dataset(path);
  return normalize ? xld::normalize_columns(ds) : ds;
}

int min_class_size(const xld::LabeledDataset& ds) {
  int m = ds.sample_count();
  for (int s : ds.class_sizes()) m = std::min(m, s);
  return m;
}

xld::ClassifierKind resolve_classifier(const std::string& choice,
                                       const xld::LabeledDataset& train,
                                       const xld::LabelLayout& layout,
                                       const xld::Hyperparameters& hp,
                                       int folds) {
  if (choice == "gcc") return xld::ClassifierKind::Gcc;
  if (choice == "lcc") return xld::ClassifierKind::Lcc;
  return xld::select_classifier(train, layout, hp, folds);
}

void write_header(std::ostream& out, ReportFormat format,
                  const std::string& command, std::uint64_t seed) {
  switch (format) {
    case ReportFormat::Text:
    case ReportFormat::Csv:
      out << "# command=" << command << " seed=" << seed << "\n";
      break;
    case ReportFormat::JsonLines: {
      json j{{"record", "header"}, {"command", command}, {"seed", seed}};
      out << j.dump() << "\n";
      break;
    }
  }
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainOpts {
  std::string data;
  std::string model = "model.xldm";
  bool normalize = false;
  LayoutFlags layout;
  HyperFlags hyper;
  std::string classifier = "gcc";
  int folds = 5;
  std::string format = "text";
  std::string out;
};

void emit_iteration(std::ostream& out, ReportFormat format,
                    const xld::IterationRecord& rec) {
  const auto& o = rec.objective;
  switch (format) {
    case ReportFormat::Text:
      out << "iter " << rec.iteration << "  recon " << fmt_short(o.reconstruction)
          << "  ridge " << fmt_short(o.ridge) << "  suppression "
          << fmt_short(o.suppression) << "  group " << fmt_short(o.group)
          << "  total " << fmt_short(o.total) << "  ms "
          << fmt_short(rec.millis) << "\n";
      break;
    case ReportFormat::Csv:
      out << rec.iteration << ',' << fmt_full(o.reconstruction) << ','
          << fmt_full(o.ridge) << ',' << fmt_full(o.suppression) << ','
          << fmt_full(o.group) << ',' << fmt_full(o.total) << ','
          << fmt_full(rec.millis) << "\n";
      break;
    case ReportFormat::JsonLines: {
      json j{{"record", "iteration"},
             {"iteration", rec.iteration},
             {"reconstruction", o.reconstruction},
             {"ridge", o.ridge},
             {"suppression", o.suppression},
             {"group", o.group},
             {"total", o.total},
             {"millis", rec.millis}};
      out << j.dump() << "\n";
      break;
    }
  }
}

int cmd_train(const TrainOpts& opts) {
  const ReportFormat format = parse_format(opts.format);
  Sink sink(opts.out);
  std::ostream& out = sink.out();

  const xld::LabeledDataset data = load_prepared(opts.data, opts.normalize);
  const xld::Hyperparameters hp = opts.hyper.to_hp();
  const xld::LabelLayout layout =
      resolve_layout(opts.layout, data.class_count(), min_class_size(data));

  write_header(out, format, "train", hp.seed);
  if (format == ReportFormat::Csv) {
    out << "iteration,reconstruction,ridge,suppression,group,total,millis\n";
  }

  xld::TrainHooks hooks;
  hooks.on_iteration = [&](const xld::IterationRecord& rec) {
    emit_iteration(out, format, rec);
  };
  xld::TrainState state = xld::train(data, layout, hp, &hooks);

  const xld::ClassifierKind kind =
      resolve_classifier(opts.classifier, data, layout, hp, opts.folds);
  const xld::Model model{std::move(state.dictionary), hp.beta, hp.lambda,
                         hp.gamma, kind};
  xld::save_model(model, opts.model);

  const char* kind_name = kind == xld::ClassifierKind::Gcc ? "gcc" : "lcc";
  if (format == ReportFormat::JsonLines) {
    json j{{"record", "summary"},
           {"iterations", state.iterations_run},
           {"converged", state.converged},
           {"classifier", kind_name},
           {"atoms", layout.atom_count()},
           {"model", opts.model}};
    out << j.dump() << "\n";
  } else {
    out << "# trained " << layout.atom_count() << " atoms in "
        << state.iterations_run << " iterations (converged="
        << (state.converged ? "yes" : "no") << ", classifier=" << kind_name
        << ") -> " << opts.model << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// predict
// ---------------------------------------------------------------------------

struct PredictOpts {
  std::string model;
  std::string data;
  std::string out;
  std::string classifier = "auto";  // auto = the tag stored in the model
};

int cmd_predict(const PredictOpts& opts) {
  const xld::Model model = xld::load_model(opts.model);
  const xld::QueryMatrix queries = xld::load_query_matrix(opts.data);
  if (queries.features.rows() != model.dictionary.feature_dim()) {
    throw xld::DimensionMismatchError(
        "query dimension " + std::to_string(queries.features.rows()) +
        " does not match model dimension " +
        std::to_string(model.dictionary.feature_dim()));
  }
  xld::ClassifierKind kind = model.classifier;
  if (opts.classifier == "gcc") kind = xld::ClassifierKind::Gcc;
  if (opts.classifier == "lcc") kind = xld::ClassifierKind::Lcc;

  Sink sink(opts.out);
  std::ostream& out = sink.out();
  const int classes = model.dictionary.layout().class_count();
  const bool labeled = !queries.labels.empty();

  out << "sample_index";
  if (labeled) out << ",true_label";
  out << ",predicted_label";
  for (int c = 1; c <= classes; ++c) out << ",score_" << c;
  out << "\n";

  const xld::CodingClassifier clf(model);
  for (int j = 0; j < queries.features.cols(); ++j) {
    const xld::Prediction pred = clf.classify(queries.features.col(j), kind);
    out << (j + 1);
    if (labeled) out << ',' << queries.labels[j];
    out << ',' << pred.label;
    for (double score : pred.scores) out << ',' << fmt_full(score);
    out << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

struct EvalOpts {
  std::string model;
  std::string test;
  std::string data;
  double split_per_class = 0;
  double split_fraction = 0;
  int repeats = 1;
  int jobs = 1;
  bool normalize = false;
  LayoutFlags layout;
  HyperFlags hyper;
  std::string classifier = "auto";  // stored tag, or fold selection when
                                    // training inside the repeat protocol
  int folds = 5;
  std::string format = "text";
  std::string out;
};

void print_eval_result(std::ostream& out, ReportFormat format,
                       const xld::EvalResult& result) {
  const int classes = static_cast<int>(result.per_class_accuracy.size());
  switch (format) {
    case ReportFormat::Text: {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.4f", result.accuracy);
      out << "accuracy " << buf << "\n";
      out << "per-class accuracy:";
      for (int c = 0; c < classes; ++c) {
        std::snprintf(buf, sizeof(buf), " %d:%.4f", c + 1,
                      result.per_class_accuracy[c]);
        out << buf;
      }
      out << "\nconfusion (rows = true, cols = predicted):\n";
      for (int i = 0; i < classes; ++i) {
        for (int j = 0; j < classes; ++j) {
          out << result.confusion(i, j) << (j + 1 == classes ? '\n' : ' ');
        }
      }
      break;
    }
    case ReportFormat::Csv: {
      out << "accuracy," << fmt_full(result.accuracy) << "\n";
      out << "class,per_class_accuracy\n";
      for (int c = 0; c < classes; ++c) {
        out << (c + 1) << ',' << fmt_full(result.per_class_accuracy[c]) << "\n";
      }
      out << "confusion_row";
      for (int j = 0; j < classes; ++j) out << ",pred_" << (j + 1);
      out << "\n";
      for (int i = 0; i < classes; ++i) {
        out << (i + 1);
        for (int j = 0; j < classes; ++j) out << ',' << result.confusion(i, j);
        out << "\n";
      }
      break;
    }
    case ReportFormat::JsonLines: {
      json summary{{"record", "summary"}, {"accuracy", result.accuracy}};
      out << summary.dump() << "\n";
      for (int c = 0; c < classes; ++c) {
        json row{{"record", "class"},
                 {"class", c + 1},
                 {"accuracy", result.per_class_accuracy[c]}};
        std::vector<int> counts(classes);
        for (int j = 0; j < classes; ++j) counts[j] = result.confusion(c, j);
        row["confusion"] = counts;
        out << row.dump() << "\n";
      }
      break;
    }
  }
}

int cmd_eval(const EvalOpts& opts) {
  const ReportFormat format = parse_format(opts.format);
  Sink sink(opts.out);
  std::ostream& out = sink.out();

  const bool split_requested =
      opts.split_per_class > 0 || opts.split_fraction > 0;

  if (!split_requested) {
    if (opts.model.empty() || opts.test.empty()) {
      throw UsageError("eval needs --model and --test, or --data with "
                       "--split-per-class/--split-fraction");
    }
    const xld::Model model = xld::load_model(opts.model);
    const xld::LabeledDataset test = load_prepared(opts.test, opts.normalize);
    xld::ClassifierKind kind = model.classifier;
    if (opts.classifier == "gcc") kind = xld::ClassifierKind::Gcc;
    if (opts.classifier == "lcc") kind = xld::ClassifierKind::Lcc;
    write_header(out, format, "eval", opts.hyper.seed);
    print_eval_result(out, format, evaluate(model, test, kind));
    return 0;
  }

  if (opts.data.empty()) {
    throw UsageError("repeated evaluation needs --data");
  }
  const xld::LabeledDataset data = load_prepared(opts.data, opts.normalize);
  const xld::SplitSpec::Mode mode = opts.split_per_class > 0
                                        ? xld::SplitSpec::Mode::PerClassCount
                                        : xld::SplitSpec::Mode::Fraction;
  const double split_value =
      opts.split_per_class > 0 ? opts.split_per_class : opts.split_fraction;

  auto run_repeat = [&](int index) {
    const std::uint64_t seed = opts.hyper.seed + static_cast<std::uint64_t>(index);
    const auto [train_set, test_set] =
        xld::split_train_test(data, {mode, split_value, seed});
    xld::Hyperparameters hp = opts.hyper.to_hp();
    hp.seed = seed;
    const xld::LabelLayout layout = resolve_layout(
        opts.layout, train_set.class_count(), min_class_size(train_set));
    const xld::ClassifierKind kind =
        resolve_classifier(opts.classifier, train_set, layout, hp, opts.folds);
    xld::TrainState state = xld::train(train_set, layout, hp);
    const xld::Model model{std::move(state.dictionary), hp.beta, hp.lambda,
                           hp.gamma, kind};
    return evaluate(model, test_set, kind).accuracy;
  };

  std::vector<double> accuracies(opts.repeats);
  if (opts.jobs <= 1 || opts.repeats == 1) {
    for (int i = 0; i < opts.repeats; ++i) accuracies[i] = run_repeat(i);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
      for (int i = next.fetch_add(1); i < opts.repeats; i = next.fetch_add(1)) {
        try {
          accuracies[i] = run_repeat(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    const int workers = std::min(opts.jobs, opts.repeats);
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  double mean = 0;
  for (double a : accuracies) mean += a;
  mean /= opts.repeats;
  double var = 0;
  for (double a : accuracies) var += (a - mean) * (a - mean);
  const double stddev =
      opts.repeats > 1 ? std::sqrt(var / (opts.repeats - 1)) : 0.0;

  write_header(out, format, "eval", opts.hyper.seed);
  switch (format) {
    case ReportFormat::Text: {
      char buf[128];
      std::snprintf(buf, sizeof(buf), "accuracy %.4f ± %.4f over %d runs\n",
                    mean, stddev, opts.repeats);
      out << buf;
      for (int i = 0; i < opts.repeats; ++i) {
        std::snprintf(buf, sizeof(buf), "run %d seed %llu accuracy %.4f\n", i,
                      static_cast<unsigned long long>(opts.hyper.seed + i),
                      accuracies[i]);
        out << buf;
      }
      break;
    }
    case ReportFormat::Csv:
      out << "run,seed,accuracy\n";
      for (int i = 0; i < opts.repeats; ++i) {
        out << i << ',' << (opts.hyper.seed + i) << ','
            << fmt_full(accuracies[i]) << "\n";
      }
      out << "mean," << fmt_full(mean) << "\nstddev," << fmt_full(stddev)
          << "\n";
      break;
    case ReportFormat::JsonLines: {
      for (int i = 0; i < opts.repeats; ++i) {
        json j{{"record", "run"},
               {"run", i},
               {"seed", opts.hyper.seed + i},
               {"accuracy", accuracies[i]}};
        out << j.dump() << "\n";
      }
      json j{{"record", "summary"},
             {"mean", mean},
             {"stddev", stddev},
             {"repeats", opts.repeats}};
      out << j.dump() << "\n";
      break;
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// crossval
// ---------------------------------------------------------------------------

struct CrossvalOpts {
  std::string data;
  int folds = 5;
  std::vector<double> beta_grid;
  std::vector<double> lambda_grid;
  std::vector<double> gamma_grid;
  bool normalize = false;
  LayoutFlags layout;
  HyperFlags hyper;
  std::string format = "text";
  std::string out;
};

int cmd_crossval(const CrossvalOpts& opts) {
  const ReportFormat format = parse_format(opts.format);
  Sink sink(opts.out);
  std::ostream& out = sink.out();

  const xld::LabeledDataset data = load_prepared(opts.data, opts.normalize);
  std::vector<double> betas = opts.beta_grid;
  std::vector<double> lambdas = opts.lambda_grid;
  std::vector<double> gammas = opts.gamma_grid;
  if (betas.empty()) betas = {opts.hyper.beta};
  if (lambdas.empty()) lambdas = {2e-1, 2e0, 2e1, 2e2, 2e3};
  if (gammas.empty()) gammas = {opts.hyper.gamma};

  // the layout must fit the smallest fold's training side
  int min_fold_train = data.sample_count();
  for (int s : data.class_sizes()) {
    const int largest_test_chunk = (s + opts.folds - 1) / opts.folds;
    min_fold_train = std::min(min_fold_train, s - largest_test_chunk);
  }
  const xld::LabelLayout layout =
      resolve_layout(opts.layout, data.class_count(), min_fold_train);

  write_header(out, format, "crossval", opts.hyper.seed);
  if (format == ReportFormat::Csv) {
    out << "beta,lambda,gamma,gcc_accuracy,lcc_accuracy\n";
  }

  double best_score = -1.0;
  double best_beta = betas[0], best_lambda = lambdas[0], best_gamma = gammas[0];
  xld::ClassifierKind best_kind = xld::ClassifierKind::Gcc;

  const auto folds = xld::split_k_folds(data, opts.folds, opts.hyper.seed);
  for (double beta : betas) {
    for (double lambda : lambdas) {
      for (double gamma : gammas) {
        xld::Hyperparameters hp = opts.hyper.to_hp();
        hp.beta = beta;
        hp.lambda = lambda;
        hp.gamma = gamma;
        double gcc_mean = 0, lcc_mean = 0;
        for (const auto& [fold_train, fold_test] : folds) {
          xld::TrainState state = xld::train(fold_train, layout, hp);
          const xld::Model model{std::move(state.dictionary), beta, lambda,
                                 gamma, xld::ClassifierKind::Gcc};
          const xld::CodingClassifier clf(model);
          gcc_mean +=
              evaluate(clf, fold_test, xld::ClassifierKind::Gcc).accuracy;
          lcc_mean +=
              evaluate(clf, fold_test, xld::ClassifierKind::Lcc).accuracy;
        }
        gcc_mean /= folds.size();
        lcc_mean /= folds.size();

        switch (format) {
          case ReportFormat::Text:
            out << "beta " << fmt_short(beta) << "  lambda "
                << fmt_short(lambda) << "  gamma " << fmt_short(gamma)
                << "  gcc " << fmt_short(gcc_mean) << "  lcc "
                << fmt_short(lcc_mean) << "\n";
            break;
          case ReportFormat::Csv:
            out << fmt_full(beta) << ',' << fmt_full(lambda) << ','
                << fmt_full(gamma) << ',' << fmt_full(gcc_mean) << ','
                << fmt_full(lcc_mean) << "\n";
            break;
          case ReportFormat::JsonLines: {
            json j{{"record", "grid_point"}, {"beta", beta},
                   {"lambda", lambda},       {"gamma", gamma},
                   {"gcc", gcc_mean},        {"lcc", lcc_mean}};
            out << j.dump() << "\n";
            break;
          }
        }

        const double score = std::max(gcc_mean, lcc_mean);
        if (score > best_score) {
          best_score = score;
          best_beta = beta;
          best_lambda = lambda;
          best_gamma = gamma;
          best_kind = lcc_mean > gcc_mean ? xld::ClassifierKind::Lcc
                                          : xld::ClassifierKind::Gcc;
        }
      }
    }
  }

  const char* kind_name =
      best_kind == xld::ClassifierKind::Gcc ? "gcc" : "lcc";
  if (format == ReportFormat::JsonLines) {
    json j{{"record", "selected"}, {"beta", best_beta},
           {"lambda", best_lambda}, {"gamma", best_gamma},
           {"classifier", kind_name}, {"accuracy", best_score}};
    out << j.dump() << "\n";
  } else {
    out << "selected beta " << fmt_short(best_beta) << "  lambda "
        << fmt_short(best_lambda) << "  gamma " << fmt_short(best_gamma)
        << "  classifier " << kind_name << "  accuracy "
        << fmt_short(best_score) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// inspect
// ---------------------------------------------------------------------------

struct InspectOpts {
  std::string model;
  std::string data;
  bool normalize = false;
  std::string out;
};

int cmd_inspect(const InspectOpts& opts) {
  const xld::Model model = xld::load_model(opts.model);
  const xld::LabeledDataset data = load_prepared(opts.data, opts.normalize);
  const xld::InspectReport report = xld::inspect_codes(model, data);
  const int classes = static_cast<int>(report.block_mass_ratio.size());
  const int atoms = static_cast<int>(report.profiles.cols());

  Sink sink(opts.out);
  std::ostream& profile_out = sink.out();
  profile_out << "atom_index";
  for (int c = 1; c <= classes; ++c) profile_out << ",class_" << c;
  profile_out << "\n";
  for (int k = 0; k < atoms; ++k) {
    profile_out << k;
    for (int c = 0; c < classes; ++c) {
      profile_out << ',' << fmt_full(report.profiles(c, k));
    }
    profile_out << "\n";
  }

  // ratios always go to stdout; the blank line separates the two CSV
  // blocks when the profiles share the stream
  std::ostream& ratio_out = std::cout;
  if (opts.out.empty()) ratio_out << "\n";
  ratio_out << "class,in_block_mass,cross_block_mass,ratio\n";
  for (int c = 0; c < classes; ++c) {
    const double ratio = report.block_mass_ratio[c];
    ratio_out << (c + 1) << ',' << fmt_full(report.in_block_mass[c]) << ','
              << fmt_full(report.cross_block_mass[c]) << ','
              << (std::isinf(ratio) ? "inf" : fmt_full(ratio)) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchOpts {
  std::string data;
  int queries = 100;
  bool normalize = false;
  LayoutFlags layout;
  HyperFlags hyper;
  std::string format = "text";
  std::string out;
};

int cmd_bench(const BenchOpts& opts) {
  const ReportFormat format = parse_format(opts.format);
  Sink sink(opts.out);
  std::ostream& out = sink.out();

  const xld::LabeledDataset data = load_prepared(opts.data, opts.normalize);
  const xld::Hyperparameters hp = opts.hyper.to_hp();
  const xld::LabelLayout layout =
      resolve_layout(opts.layout, data.class_count(), min_class_size(data));

  using clock = std::chrono::steady_clock;
  const auto train_started = clock::now();
  xld::TrainState state = xld::train(data, layout, hp);
  const double train_seconds =
      std::chrono::duration<double>(clock::now() - train_started).count();

  const xld::Model model{std::move(state.dictionary), hp.beta, hp.lambda,
                         hp.gamma, xld::ClassifierKind::Gcc};
  const xld::CodingClassifier clf(model);

  // warm both factorization caches, then time steady-state queries
  clf.gcc_classify(data.features().col(0));
  clf.lcc_classify(data.features().col(0));

  auto time_per_query = [&](xld::ClassifierKind kind) {
    const auto started = clock::now();
    for (int q = 0; q < opts.queries; ++q) {
      clf.classify(data.features().col(q % data.sample_count()), kind);
    }
    return std::chrono::duration<double, std::milli>(clock::now() - started)
               .count() /
           opts.queries;
  };
  const double gcc_ms = time_per_query(xld::ClassifierKind::Gcc);
  const double lcc_ms = time_per_query(xld::ClassifierKind::Lcc);

  write_header(out, format, "bench", hp.seed);
  switch (format) {
    case ReportFormat::Text:
      out << "training time " << fmt_short(train_seconds) << " s ("
          << state.iterations_run << " iterations, including initialization)\n"
          << "per-query gcc " << fmt_short(gcc_ms) << " ms (mean over "
          << opts.queries << " queries)\n"
          << "per-query lcc " << fmt_short(lcc_ms) << " ms (mean over "
          << opts.queries << " queries)\n";
      break;
    case ReportFormat::Csv:
      out << "metric,value\ntrain_seconds," << fmt_full(train_seconds)
          << "\ngcc_ms_per_query," << fmt_full(gcc_ms)
          << "\nlcc_ms_per_query," << fmt_full(lcc_ms) << "\nqueries,"
          << opts.queries << "\n";
      break;
    case ReportFormat::JsonLines: {
      json j{{"record", "bench"},
             {"train_seconds", train_seconds},
             {"iterations", state.iterations_run},
             {"gcc_ms_per_query", gcc_ms},
             {"lcc_ms_per_query", lcc_ms},
             {"queries", opts.queries}};
      out << j.dump() << "\n";
      break;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cross-label suppression dictionary learning"};
  app.require_subcommand(1);

  TrainOpts train_opts;
  CLI::App* train_cmd =
      app.add_subcommand("train", "learn a structured dictionary");
  train_cmd->add_option("--data", train_opts.data, "training set (CSV or XLDD)")
      ->required();
  train_cmd->add_option("--model", train_opts.model, "output model path");
  train_cmd->add_flag("--normalize", train_opts.normalize,
                      "normalize feature columns to unit norm");
  add_layout_flags(train_cmd, train_opts.layout);
  add_hyper_flags(train_cmd, train_opts.hyper);
  train_cmd->add_option("--classifier", train_opts.classifier,
                        "classifier tag to store")
      ->check(CLI::IsMember({"gcc", "lcc", "auto"}));
  train_cmd->add_option("--folds", train_opts.folds,
                        "folds for --classifier auto");
  train_cmd->add_option("--format", train_opts.format, "log format")
      ->check(CLI::IsMember({"text", "csv", "json-lines"}));
  train_cmd->add_option("--out", train_opts.out, "log file (default stdout)");

  PredictOpts predict_opts;
  CLI::App* predict_cmd =
      app.add_subcommand("predict", "classify feature vectors");
  predict_cmd->add_option("--model", predict_opts.model, "model path")
      ->required();
  predict_cmd->add_option("--data", predict_opts.data, "query set")->required();
  predict_cmd->add_option("--out", predict_opts.out,
                          "prediction CSV (default stdout)");
  predict_cmd
      ->add_option("--classifier", predict_opts.classifier,
                   "override the stored classifier")
      ->check(CLI::IsMember({"gcc", "lcc", "auto"}));

  EvalOpts eval_opts;
  CLI::App* eval_cmd = app.add_subcommand(
      "eval", "evaluate a model, or repeat split/train/test protocols");
  eval_cmd->add_option("--model", eval_opts.model, "model path");
  eval_cmd->add_option("--test", eval_opts.test, "labeled test set");
  eval_cmd->add_option("--data", eval_opts.data,
                       "full dataset for split protocols");
  eval_cmd->add_option("--split-per-class", eval_opts.split_per_class,
                       "train samples per class");
  eval_cmd->add_option("--split-fraction", eval_opts.split_fraction,
                       "train fraction in (0,1)");
  eval_cmd->add_option("--repeats", eval_opts.repeats, "number of seeded runs");
  eval_cmd->add_option("--jobs", eval_opts.jobs, "parallel repeat workers");
  eval_cmd->add_flag("--normalize", eval_opts.normalize,
                     "normalize feature columns to unit norm");
  add_layout_flags(eval_cmd, eval_opts.layout);
  add_hyper_flags(eval_cmd, eval_opts.hyper);
  eval_cmd
      ->add_option("--classifier", eval_opts.classifier,
                   "classifier; auto = the model's stored tag, or fold "
                   "selection under --split-*")
      ->check(CLI::IsMember({"gcc", "lcc", "auto"}));
  eval_cmd->add_option("--folds", eval_opts.folds,
                       "folds for --classifier auto");
  eval_cmd->add_option("--format", eval_opts.format, "report format")
      ->check(CLI::IsMember({"text", "csv", "json-lines"}));
  eval_cmd->add_option("--out", eval_opts.out, "report file (default stdout)");

  CrossvalOpts crossval_opts;
  CLI::App* crossval_cmd = app.add_subcommand(
      "crossval", "grid-search hyperparameters by k-fold cross-validation");
  crossval_cmd->add_option("--data", crossval_opts.data, "training set")
      ->required();
  crossval_cmd->add_option("--folds", crossval_opts.folds, "fold count");
  crossval_cmd
      ->add_option("--beta-grid", crossval_opts.beta_grid, "beta candidates")
      ->delimiter(',');
  crossval_cmd
      ->add_option("--lambda-grid", crossval_opts.lambda_grid,
                   "lambda candidates")
      ->delimiter(',');
  crossval_cmd
      ->add_option("--gamma-grid", crossval_opts.gamma_grid, "gamma candidates")
      ->delimiter(',');
  crossval_cmd->add_flag("--normalize", crossval_opts.normalize,
                         "normalize feature columns to unit norm");
  add_layout_flags(crossval_cmd, crossval_opts.layout);
  add_hyper_flags(crossval_cmd, crossval_opts.hyper);
  crossval_cmd->add_option("--format", crossval_opts.format, "report format")
      ->check(CLI::IsMember({"text", "csv", "json-lines"}));
  crossval_cmd->add_option("--out", crossval_opts.out,
                           "report file (default stdout)");

  InspectOpts inspect_opts;
  CLI::App* inspect_cmd = app.add_subcommand(
      "inspect", "per-class code profiles and block-mass ratios");
  inspect_cmd->add_option("--model", inspect_opts.model, "model path")
      ->required();
  inspect_cmd->add_option("--data", inspect_opts.data, "labeled set")
      ->required();
  inspect_cmd->add_flag("--normalize", inspect_opts.normalize,
                        "normalize feature columns to unit norm");
  inspect_cmd->add_option("--out", inspect_opts.out,
                          "profile CSV file (default stdout)");

  BenchOpts bench_opts;
  CLI::App* bench_cmd =
      app.add_subcommand("bench", "time training and per-query classification");
  bench_cmd->add_option("--data", bench_opts.data, "training set")->required();
  bench_cmd->add_option("--queries", bench_opts.queries,
                        "query count for timing");
  bench_cmd->add_flag("--normalize", bench_opts.normalize,
                      "normalize feature columns to unit norm");
  add_layout_flags(bench_cmd, bench_opts.layout);
  add_hyper_flags(bench_cmd, bench_opts.hyper);
  bench_cmd->add_option("--format", bench_opts.format, "report format")
      ->check(CLI::IsMember({"text", "csv", "json-lines"}));
  bench_cmd->add_option("--out", bench_opts.out, "report file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (train_cmd->parsed()) return cmd_train(train_opts);
    if (predict_cmd->parsed()) return cmd_predict(predict_opts);
    if (eval_cmd->parsed()) return cmd_eval(eval_opts);
    if (crossval_cmd->parsed()) return cmd_crossval(crossval_opts);
    if (inspect_cmd->parsed()) return cmd_inspect(inspect_opts);
    if (bench_cmd->parsed()) return cmd_bench(bench_opts);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
