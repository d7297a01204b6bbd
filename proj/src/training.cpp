#include "qmalsim/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "qmalsim/parallel.hpp"
#include "qmalsim/rng.hpp"

namespace qmalsim {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;

void check_preprocessed(const Dataset& ds, const Architecture& arch, int n_classes) {
  if (ds.size() == 0) throw std::invalid_argument("dataset is empty");
  if (ds.n_features() != static_cast<std::size_t>(arch.n_qubits)) {
    throw std::invalid_argument("dataset width " + std::to_string(ds.n_features()) +
                                " does not match n_qubits " +
                                std::to_string(arch.n_qubits));
  }
  for (const auto& row : ds.features) {
    for (double v : row) {
      if (!(v >= 0.0 && v <= kPi)) {
        throw std::invalid_argument("features must be preprocessed into [0, pi]");
      }
    }
  }
  for (int label : ds.labels) {
    if (label < 0 || label >= n_classes) {
      throw std::invalid_argument("label " + std::to_string(label) +
                                  " outside [0, " + std::to_string(n_classes) + ")");
    }
  }
}

}  // namespace

std::string gradient_method_name(GradientMethod method) {
  return method == GradientMethod::ParamShift ? "shift" : "fd";
}

GradientMethod parse_gradient_method(const std::string& name) {
  if (name == "shift") return GradientMethod::ParamShift;
  if (name == "fd") return GradientMethod::FiniteDiff;
  throw std::invalid_argument("unknown gradient method '" + name +
                              "' (expected shift or fd)");
}

void TrainConfig::validate() const {
  arch.validate();
  if (n_classes < 2) throw std::invalid_argument("need at least 2 classes");
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (runs < 1) throw std::invalid_argument("runs must be >= 1");
  if (!(lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
}

std::size_t packed_size(const Architecture& arch, int n_classes) {
  const std::size_t head = static_cast<std::size_t>(n_classes) *
                               static_cast<std::size_t>(arch.measured_count()) +
                           static_cast<std::size_t>(n_classes);
  return param_count(arch) + head;
}

std::vector<double> pack_params(const ParameterVector& params, const LinearHead& head) {
  std::vector<double> packed;
  packed.reserve(params.size() + head.weights.size() + head.bias.size());
  packed.insert(packed.end(), params.values.begin(), params.values.end());
  packed.insert(packed.end(), head.weights.begin(), head.weights.end());
  packed.insert(packed.end(), head.bias.begin(), head.bias.end());
  return packed;
}

void unpack_params(std::span<const double> packed, const Architecture& arch,
                   int n_classes, ParameterVector& params, LinearHead& head) {
  params = make_parameter_vector(arch);
  head = make_head(n_classes, arch.measured_count());
  if (packed.size() != params.size() + head.weights.size() + head.bias.size()) {
    throw std::invalid_argument("packed parameter vector has wrong length");
  }
  std::size_t offset = 0;
  std::copy_n(packed.begin(), params.size(), params.values.begin());
  offset += params.size();
  std::copy_n(packed.begin() + offset, head.weights.size(), head.weights.begin());
  offset += head.weights.size();
  std::copy_n(packed.begin() + offset, head.bias.size(), head.bias.begin());
}

double batch_loss(const Architecture& arch, int n_classes,
                  std::span<const double> packed, const Dataset& ds,
                  std::span<const std::size_t> batch) {
  ParameterVector params;
  LinearHead head;
  unpack_params(packed, arch, n_classes, params, head);
  std::vector<std::vector<double>> logp;
  std::vector<int> labels;
  logp.reserve(batch.size());
  labels.reserve(batch.size());
  for (std::size_t idx : batch) {
    const std::vector<double> z = quantum_forward(arch, ds.features[idx], params);
    logp.push_back(head_forward(z, head));
    labels.push_back(ds.labels[idx]);
  }
  return nll_loss(logp, labels);
}

BatchGradient batch_gradient(const Architecture& arch, int n_classes,
                             std::span<const double> packed, const Dataset& ds,
                             std::span<const std::size_t> batch,
                             GradientMethod method, int threads,
                             std::size_t* eval_count) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  ParameterVector params;
  LinearHead head;
  unpack_params(packed, arch, n_classes, params, head);

  // Quantum forward + jacobian per sample, parallel over the batch.
  std::vector<std::vector<double>> outputs(batch.size());
  std::vector<Jacobian> jacobians(batch.size());
  std::vector<std::size_t> evals(batch.size(), 0);
  parallel_for(batch.size(), threads, [&](std::size_t i) {
    const auto& x = ds.features[batch[i]];
    outputs[i] = quantum_forward(arch, x, params);
    if (method == GradientMethod::ParamShift) {
      jacobians[i] = quantum_jacobian(arch, x, params, &evals[i]);
    } else {
      jacobians[i] = fd_jacobian(arch, x, params, kTrainingFdStep);
      evals[i] = 2 * params.size();
    }
  });
  if (eval_count) {
    for (std::size_t e : evals) *eval_count += e;
  }

  std::vector<int> labels;
  labels.reserve(batch.size());
  for (std::size_t idx : batch) labels.push_back(ds.labels[idx]);

  std::vector<std::vector<double>> logp;
  logp.reserve(batch.size());
  for (const auto& z : outputs) logp.push_back(head_forward(z, head));

  const HeadGradients hg = head_backward(outputs, head, labels);

  BatchGradient result;
  result.loss = nll_loss(logp, labels);
  result.grad.assign(packed.size(), 0.0);
  // Fixed batch-order reduction keeps results thread-count independent.
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const std::vector<double> dq = hybrid_backward(jacobians[i], hg.d_inputs[i]);
    for (std::size_t j = 0; j < dq.size(); ++j) result.grad[j] += dq[j];
  }
  std::size_t offset = params.size();
  for (std::size_t j = 0; j < hg.d_weights.size(); ++j) {
    result.grad[offset + j] = hg.d_weights[j];
  }
  offset += hg.d_weights.size();
  for (std::size_t j = 0; j < hg.d_bias.size(); ++j) {
    result.grad[offset + j] = hg.d_bias[j];
  }
  return result;
}

TrainOutput train(const TrainConfig& config, const Dataset& train_ds,
                  const PreprocessorModel& preprocessor) {
  config.validate();
  check_preprocessed(train_ds, config.arch, config.n_classes);
  if (preprocessor.k != config.arch.n_qubits) {
    throw std::invalid_argument("preprocessor output width does not match n_qubits");
  }

  ParameterVector params = make_parameter_vector(config.arch);
  LinearHead head = make_head(config.n_classes, config.arch.measured_count());
  Rng rng(config.seed);
  for (double& v : params.values) v = rng.uniform(0.0, kTwoPi);
  const double bound = 1.0 / std::sqrt(static_cast<double>(head.n_inputs));
  for (double& w : head.weights) w = rng.uniform(-bound, bound);

  std::vector<double> packed = pack_params(params, head);
  AdamState adam = make_adam(packed.size(), config.lr);

  TrainHistory history;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto epoch_batches =
        batches(train_ds.size(), static_cast<std::size_t>(config.batch_size),
                config.seed, static_cast<std::uint64_t>(epoch));
    double loss_sum = 0.0;
    std::size_t sample_count = 0;
    for (std::size_t b = 0; b < epoch_batches.size(); ++b) {
      const auto& batch = epoch_batches[b];
      const BatchGradient grad =
          batch_gradient(config.arch, config.n_classes, packed, train_ds, batch,
                         config.gradient_method, config.threads);
      if (!std::isfinite(grad.loss)) {
        throw std::runtime_error("non-finite loss at epoch " + std::to_string(epoch) +
                                 ", batch " + std::to_string(b));
      }
      adam_step(packed, grad.grad, adam);
      loss_sum += grad.loss * static_cast<double>(batch.size());
      sample_count += batch.size();
    }
    history.epoch_loss.push_back(loss_sum / static_cast<double>(sample_count));
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    history.epoch_seconds.push_back(dt.count());
  }

  unpack_params(packed, config.arch, config.n_classes, params, head);
  TrainOutput out;
  out.model = HybridModel{config.arch, config.n_classes, std::move(params),
                          std::move(head), preprocessor};
  out.history = std::move(history);
  return out;
}

MetricsReport evaluate(const HybridModel& model, const Dataset& ds, int threads) {
  check_preprocessed(ds, model.arch, model.n_classes);
  std::vector<int> predictions(ds.size());
  std::vector<std::vector<double>> probabilities(ds.size());
  parallel_for(ds.size(), threads, [&](std::size_t i) {
    const std::vector<double> z =
        quantum_forward(model.arch, ds.features[i], model.quantum_params);
    const std::vector<double> logp = head_forward(z, model.head);
    int best = 0;
    for (int c = 1; c < model.n_classes; ++c) {
      if (logp[c] > logp[best]) best = c;  // ties keep the lowest index
    }
    predictions[i] = best;
    std::vector<double> probs(logp.size());
    for (std::size_t c = 0; c < logp.size(); ++c) probs[c] = std::exp(logp[c]);
    probabilities[i] = std::move(probs);
  });
  const ConfusionMatrix cm = confusion(ds.labels, predictions, model.n_classes);
  MetricsReport report = scalar_metrics(cm);
  report.roc_auc = roc_auc(ds.labels, probabilities, model.n_classes);
  return report;
}

ExperimentResult run_experiment(const TrainConfig& config, const Dataset& train_ds,
                                const Dataset& test_ds,
                                const PreprocessorModel& preprocessor) {
  config.validate();
  ExperimentResult result;
  std::vector<MetricsReport> reports;
  for (int r = 0; r < config.runs; ++r) {
    TrainConfig run_config = config;
    run_config.seed = config.seed + static_cast<std::uint64_t>(r);
    TrainOutput out = train(run_config, train_ds, preprocessor);
    RunResult run;
    run.seed = run_config.seed;
    run.metrics = evaluate(out.model, test_ds, config.threads);
    run.history = std::move(out.history);
    reports.push_back(run.metrics);
    if (r == 0 || run.metrics.accuracy > result.runs[result.best_run].metrics.accuracy) {
      result.best_model = std::move(out.model);
      result.best_run = r;
    }
    result.runs.push_back(std::move(run));
  }
  result.aggregate = aggregate_runs(reports);
  return result;
}

}  // namespace qmalsim
