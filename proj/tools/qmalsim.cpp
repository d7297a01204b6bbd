#include <cmath>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "qmalsim/autodiff.hpp"
#include "qmalsim/data.hpp"
#include "qmalsim/parallel.hpp"
#include "qmalsim/report.hpp"
#include "qmalsim/rng.hpp"
#include "qmalsim/training.hpp"

namespace {

using namespace qmalsim;

// Flag combinations the parser accepts but the domain rejects. Exit code 2,
// like any other usage problem.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SynthFlags {
  int classes = 2;
  int features = 16;
  int per_class = 100;
  double separation = 6.0;
  std::uint64_t seed = 42;
  std::string out;
};

int cmd_synth(const SynthFlags& f) {
  if (f.classes < 1 || f.features < 1 || f.per_class < 1 || !(f.separation > 0.0)) {
    throw UsageError("synth: classes, features, per-class must be >= 1 and separation > 0");
  }
  const Dataset ds = generate_synthetic(
      {f.classes, f.features, f.per_class, f.separation, f.seed});
  write_csv(ds, f.out);
  std::cout << "wrote " << ds.size() << " samples (" << f.classes << " classes, "
            << f.features << " features) to " << f.out << "\n";
  return 0;
}

struct PreprocessFlags {
  std::string train_csv;
  int qubits = 16;
  std::string out;
  std::string apply_csv;
  std::string apply_out;
};

int cmd_preprocess(const PreprocessFlags& f) {
  if (f.qubits < 1 || f.qubits > kMaxQubits) {
    throw UsageError("preprocess: --qubits must be in [1, " + std::to_string(kMaxQubits) + "]");
  }
  if (f.apply_csv.empty() != f.apply_out.empty()) {
    throw UsageError("preprocess: --apply and --apply-out must be given together");
  }
  const Dataset train = load_csv(f.train_csv);
  const PreprocessorModel model = preprocess_fit(train, f.qubits);
  write_csv(preprocess_apply(train, model), f.out);
  std::cout << "wrote " << f.out << " (" << f.qubits << " angle features)\n";
  if (!f.apply_csv.empty()) {
    const Dataset other = load_csv(f.apply_csv);
    write_csv(preprocess_apply(other, model), f.apply_out);
    std::cout << "wrote " << f.apply_out << "\n";
  }
  return 0;
}

struct TrainFlags {
  std::string model = "qmlp";
  int qubits = 16;
  int layers = 2;
  int classes = 0;  // 0: infer from the training CSV
  int epochs = 20;
  int batch_size = 64;
  double lr = 0.01;
  std::uint64_t seed = 42;
  int runs = 3;
  std::string grad = "shift";
  int threads = 0;  // 0: default_thread_count()
  std::string train_csv;
  std::string test_csv;
  std::string model_out;
  std::string report_out;
};

OrderedJson resolved_config_json(const TrainConfig& config, const TrainFlags& f) {
  OrderedJson j = OrderedJson::object();
  j["model"] = arch_kind_name(config.arch.kind);
  j["qubits"] = config.arch.n_qubits;
  j["layers"] = config.arch.n_layers;
  j["classes"] = config.n_classes;
  j["epochs"] = config.epochs;
  j["batch_size"] = config.batch_size;
  j["lr"] = config.lr;
  j["seed"] = config.seed;
  j["runs"] = config.runs;
  j["gradient"] = gradient_method_name(config.gradient_method);
  j["threads"] = config.threads;
  j["train_csv"] = f.train_csv;
  j["test_csv"] = f.test_csv;
  return j;
}

int cmd_train(const TrainFlags& f) {
  TrainConfig config;
  config.arch = Architecture{parse_arch_kind(f.model), f.qubits,
                             parse_arch_kind(f.model) == ArchKind::QCNN ? 2 : f.layers};
  config.epochs = f.epochs;
  config.batch_size = f.batch_size;
  config.lr = f.lr;
  config.seed = f.seed;
  config.runs = f.runs;
  config.gradient_method = parse_gradient_method(f.grad);
  config.threads = f.threads > 0 ? f.threads : default_thread_count();
  config.n_classes = 2;  // placeholder until the CSV is read
  try {
    config.arch.validate();
    if (config.epochs < 1 || config.batch_size < 1 || config.runs < 1 || !(config.lr > 0.0)) {
      throw std::invalid_argument("epochs, batch-size, runs must be >= 1 and lr > 0");
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("train: ") + e.what());
  }

  CsvSchema schema;
  if (f.classes > 0) schema.n_classes = f.classes;
  const Dataset train_raw = load_csv(f.train_csv, schema);
  config.n_classes = train_raw.n_classes;
  if (config.n_classes < 2) {
    throw UsageError("train: need at least 2 classes, got " +
                     std::to_string(config.n_classes));
  }

  const PreprocessorModel preprocessor = preprocess_fit(train_raw, config.arch.n_qubits);
  const Dataset train_ds = preprocess_apply(train_raw, preprocessor);

  Dataset test_ds;
  std::string eval_split = "train";
  if (!f.test_csv.empty()) {
    CsvSchema test_schema;
    test_schema.n_classes = config.n_classes;
    test_ds = preprocess_apply(load_csv(f.test_csv, test_schema), preprocessor);
    eval_split = "test";
  } else {
    test_ds = train_ds;
  }

  std::cout << "training " << f.model << " (" << config.arch.n_qubits << " qubits, "
            << param_count(config.arch) << " quantum params, " << config.n_classes
            << " classes, " << train_ds.size() << " samples, " << config.runs
            << " runs)\n";
  const ExperimentResult result = run_experiment(config, train_ds, test_ds, preprocessor);
  for (std::size_t r = 0; r < result.runs.size(); ++r) {
    const RunResult& run = result.runs[r];
    double seconds = 0.0;
    for (double s : run.history.epoch_seconds) seconds += s;
    std::printf("run %zu: seed %llu, final loss %.6f, accuracy %.4f (%.1fs)\n", r,
                static_cast<unsigned long long>(run.seed), run.history.epoch_loss.back(),
                run.metrics.accuracy, seconds);
  }

  save_model(result.best_model, f.model_out);

  OrderedJson doc = OrderedJson::object();
  doc["tool"] = "qmalsim";
  doc["report_version"] = 1;
  doc["command"] = "train";
  doc["config"] = resolved_config_json(config, f);
  doc["eval_split"] = eval_split;
  OrderedJson runs = OrderedJson::array();
  for (std::size_t r = 0; r < result.runs.size(); ++r) {
    const RunResult& run = result.runs[r];
    OrderedJson rj = OrderedJson::object();
    rj["run"] = r;
    rj["seed"] = run.seed;
    rj["train_loss"] = run.history.epoch_loss;
    rj["metrics"] = metrics_to_json(run.metrics);
    runs.push_back(std::move(rj));
  }
  doc["runs"] = std::move(runs);
  doc["best_run"] = result.best_run;
  OrderedJson aggregate = OrderedJson::object();
  aggregate["mean"] = metrics_to_json(result.aggregate.mean, false);
  aggregate["std"] = metrics_to_json(result.aggregate.stddev, false);
  doc["aggregate"] = std::move(aggregate);
  write_report(doc, f.report_out);

  std::cout << "wrote model " << f.model_out << " (best run " << result.best_run
            << ") and report " << f.report_out << "\n";
  print_report_table(doc, std::cout);
  return 0;
}

struct EvalFlags {
  std::string model_file;
  std::string data_csv;
  std::string report_out;
  int threads = 0;
};

int cmd_eval(const EvalFlags& f) {
  const HybridModel model = load_model(f.model_file);
  CsvSchema schema;
  schema.n_classes = model.n_classes;
  const Dataset raw = load_csv(f.data_csv, schema);
  if (raw.n_features() != model.preprocessor.input_width()) {
    throw std::runtime_error("feature width mismatch: model preprocessor expects " +
                             std::to_string(model.preprocessor.input_width()) +
                             " raw features, " + f.data_csv + " has " +
                             std::to_string(raw.n_features()));
  }
  const Dataset ds = preprocess_apply(raw, model.preprocessor);
  const int threads = f.threads > 0 ? f.threads : default_thread_count();
  const MetricsReport metrics = evaluate(model, ds, threads);

  OrderedJson doc = OrderedJson::object();
  doc["tool"] = "qmalsim";
  doc["report_version"] = 1;
  doc["command"] = "eval";
  doc["model_file"] = f.model_file;
  doc["data_csv"] = f.data_csv;
  doc["samples"] = ds.size();
  doc["metrics"] = metrics_to_json(metrics);
  write_report(doc, f.report_out);
  std::cout << "wrote report " << f.report_out << "\n";
  print_report_table(doc, std::cout);
  return 0;
}

struct GradcheckFlags {
  std::string model = "qmlp";
  int qubits = 4;
  std::uint64_t seed = 42;
  double tolerance = 1e-5;
};

int cmd_gradcheck(const GradcheckFlags& f) {
  if (f.qubits > 8) {
    throw UsageError("gradcheck: --qubits must be <= 8 (runtime guard)");
  }
  Architecture arch{parse_arch_kind(f.model), f.qubits, 2};
  try {
    arch.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("gradcheck: ") + e.what());
  }
  Rng rng(f.seed);
  std::vector<double> x(static_cast<std::size_t>(arch.n_qubits));
  for (double& v : x) v = rng.uniform(0.0, 3.141592653589793);
  ParameterVector params = make_parameter_vector(arch);
  for (double& v : params.values) v = rng.uniform(0.0, 2.0 * 3.141592653589793);

  const Jacobian shift = quantum_jacobian(arch, x, params);
  const Jacobian fd = fd_jacobian(arch, x, params, 1e-5);

  bool ok = true;
  std::size_t worst_index = 0;
  double worst = 0.0;
  for (const ParamSegment& seg : params.layout) {
    double seg_max = 0.0;
    for (std::size_t j = seg.offset; j < seg.offset + seg.length; ++j) {
      for (std::size_t i = 0; i < shift.n_outputs; ++i) {
        const double dev = std::abs(shift.at(i, j) - fd.at(i, j));
        if (dev > seg_max) seg_max = dev;
        if (dev > worst) {
          worst = dev;
          worst_index = j;
        }
      }
    }
    std::printf("segment %-12s max|shift - fd| = %.3e\n", seg.name.c_str(), seg_max);
    if (seg_max > f.tolerance) ok = false;
  }
  if (!ok) {
    std::printf("gradcheck FAIL: parameter %zu deviates by %.3e (tolerance %.3e)\n",
                worst_index, worst, f.tolerance);
    return 1;
  }
  std::printf("gradcheck PASS (max deviation %.3e, tolerance %.3e)\n", worst, f.tolerance);
  return 0;
}

int cmd_report(const std::string& path) {
  print_report_table(read_report(path), std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid quantum-classical malware classifiers (QMLP / QCNN) on a "
               "dense statevector simulator"};
  app.require_subcommand(1);

  SynthFlags synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a synthetic Gaussian-blob CSV");
  synth_cmd->add_option("--classes", synth.classes, "Number of classes");
  synth_cmd->add_option("--features", synth.features, "Raw feature count");
  synth_cmd->add_option("--per-class", synth.per_class, "Samples per class");
  synth_cmd->add_option("--separation", synth.separation, "Centroid distance in within-class stddevs");
  synth_cmd->add_option("--seed", synth.seed, "PRNG seed");
  synth_cmd->add_option("--out", synth.out, "Output CSV path")->required();

  PreprocessFlags preprocess;
  CLI::App* preprocess_cmd =
      app.add_subcommand("preprocess", "Fit Min-Max -> PCA -> angle rescale on a training "
                                       "CSV and write the transformed features");
  preprocess_cmd->add_option("--train", preprocess.train_csv, "Training CSV (fit + transform)")->required();
  preprocess_cmd->add_option("--qubits", preprocess.qubits, "PCA output dimension");
  preprocess_cmd->add_option("--out", preprocess.out, "Transformed training CSV")->required();
  preprocess_cmd->add_option("--apply", preprocess.apply_csv, "Extra CSV to transform with the fitted model");
  preprocess_cmd->add_option("--apply-out", preprocess.apply_out, "Output path for --apply");

  TrainFlags train;
  CLI::App* train_cmd = app.add_subcommand("train", "Train a model and write model + report");
  train_cmd->add_option("--model", train.model, "qmlp or qcnn");
  train_cmd->add_option("--qubits", train.qubits, "Circuit width (PCA target dimension)");
  train_cmd->add_option("--layers", train.layers, "QMLP re-uploading layers");
  train_cmd->add_option("--classes", train.classes, "Class count (default: max label + 1)");
  train_cmd->add_option("--epochs", train.epochs, "Training epochs");
  train_cmd->add_option("--batch-size", train.batch_size, "Mini-batch size");
  train_cmd->add_option("--lr", train.lr, "Adam learning rate");
  train_cmd->add_option("--seed", train.seed, "Base seed; run r uses seed + r");
  train_cmd->add_option("--runs", train.runs, "Independent repetitions");
  train_cmd->add_option("--grad", train.grad, "Gradient method: shift or fd");
  train_cmd->add_option("--threads", train.threads, "Worker threads (default: QMALSIM_THREADS or all cores)");
  train_cmd->add_option("--train", train.train_csv, "Training CSV")->required();
  train_cmd->add_option("--test", train.test_csv, "Test CSV (default: evaluate on the training split)");
  train_cmd->add_option("--out", train.model_out, "Model output path")->required();
  train_cmd->add_option("--report", train.report_out, "JSON report output path")->required();

  EvalFlags eval;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate a saved model on a raw CSV");
  eval_cmd->add_option("--model-file", eval.model_file, "Saved model path")->required();
  eval_cmd->add_option("--data", eval.data_csv, "CSV to evaluate")->required();
  eval_cmd->add_option("--report", eval.report_out, "JSON report output path")->required();
  eval_cmd->add_option("--threads", eval.threads, "Worker threads");

  GradcheckFlags gradcheck;
  CLI::App* gradcheck_cmd =
      app.add_subcommand("gradcheck", "Compare parameter-shift against finite-difference "
                                      "jacobians on a random instance");
  gradcheck_cmd->add_option("--model", gradcheck.model, "qmlp or qcnn");
  gradcheck_cmd->add_option("--qubits", gradcheck.qubits, "Circuit width (<= 8)");
  gradcheck_cmd->add_option("--seed", gradcheck.seed, "Instance seed");
  gradcheck_cmd->add_option("--tol", gradcheck.tolerance, "Max allowed |shift - fd|");

  std::string report_path;
  CLI::App* report_cmd = app.add_subcommand("report", "Print a report file as a metrics table");
  report_cmd->add_option("report", report_path, "Report JSON path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    // CLI11 returns 0 for --help/--version, nonzero for real parse errors.
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth_cmd->parsed()) return cmd_synth(synth);
    if (preprocess_cmd->parsed()) return cmd_preprocess(preprocess);
    if (train_cmd->parsed()) return cmd_train(train);
    if (eval_cmd->parsed()) return cmd_eval(eval);
    if (gradcheck_cmd->parsed()) return cmd_gradcheck(gradcheck);
    if (report_cmd->parsed()) return cmd_report(report_path);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
