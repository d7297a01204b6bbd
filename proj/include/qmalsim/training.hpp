#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qmalsim/autodiff.hpp"
#include "qmalsim/circuits.hpp"
#include "qmalsim/data.hpp"
#include "qmalsim/metrics.hpp"
#include "qmalsim/nn.hpp"

namespace qmalsim {

enum class GradientMethod { ParamShift, FiniteDiff };

std::string gradient_method_name(GradientMethod method);
GradientMethod parse_gradient_method(const std::string& name);

// Step used by the FINITE_DIFF training path.
inline constexpr double kTrainingFdStep = 1e-5;

struct TrainConfig {
  Architecture arch;
  int n_classes = 2;
  int epochs = 20;
  int batch_size = 64;
  double lr = 0.01;
  std::uint64_t seed = 42;
  int runs = 3;
  GradientMethod gradient_method = GradientMethod::ParamShift;
  int threads = 1;

  void validate() const;
};

inline constexpr int kModelFormatVersion = 1;

struct HybridModel {
  Architecture arch;
  int n_classes = 0;
  ParameterVector quantum_params;
  LinearHead head;
  PreprocessorModel preprocessor;
};

struct TrainHistory {
  std::vector<double> epoch_loss;
  std::vector<double> epoch_seconds;
};

// Concatenated trainable vector: [quantum params | W row-major | b].
std::size_t packed_size(const Architecture& arch, int n_classes);
std::vector<double> pack_params(const ParameterVector& params, const LinearHead& head);
void unpack_params(std::span<const double> packed, const Architecture& arch,
                   int n_classes, ParameterVector& params, LinearHead& head);

// Mean NLL of the given samples under the packed parameters.
double batch_loss(const Architecture& arch, int n_classes,
                  std::span<const double> packed, const Dataset& ds,
                  std::span<const std::size_t> batch);

struct BatchGradient {
  std::vector<double> grad;  // packed layout
  double loss = 0.0;
};

// Gradient of batch_loss w.r.t. the packed vector. Per-sample quantum work
// may fan out to `threads` workers; the reduction runs in batch order so the
// result is identical for any thread count. eval_count, when given, is
// incremented by the number of circuit evaluations spent on jacobians.
BatchGradient batch_gradient(const Architecture& arch, int n_classes,
                             std::span<const double> packed, const Dataset& ds,
                             std::span<const std::size_t> batch,
                             GradientMethod method, int threads,
                             std::size_t* eval_count = nullptr);

struct TrainOutput {
  HybridModel model;
  TrainHistory history;
};

// Seeded end-to-end training on data already preprocessed to n_qubits
// features in [0, pi]. Init draw order from config.seed: quantum parameters
// uniform in [0, 2pi) in layout order, then head weights uniform in
// [-1/sqrt(n_inputs), +1/sqrt(n_inputs)] row-major; bias starts at 0.
// One adam_step per batch over the packed vector. Deterministic given
// (config, data) for any thread count.
TrainOutput train(const TrainConfig& config, const Dataset& train_ds,
                  const PreprocessorModel& preprocessor);

// Argmax predictions (ties -> lowest class index), exponentiated
// log-probabilities as AUC scores.
MetricsReport evaluate(const HybridModel& model, const Dataset& ds, int threads = 1);

struct RunResult {
  std::uint64_t seed = 0;
  MetricsReport metrics;
  TrainHistory history;
};

struct ExperimentResult {
  std::vector<RunResult> runs;
  MetricsSummary aggregate;
  HybridModel best_model;  // highest test accuracy, ties -> lowest run index
  int best_run = 0;
};

// Repeats train+evaluate `config.runs` times with seeds config.seed + r.
ExperimentResult run_experiment(const TrainConfig& config, const Dataset& train_ds,
                                const Dataset& test_ds,
                                const PreprocessorModel& preprocessor);

// Versioned text format with a content checksum; round-trips every numeric
// field bit-exactly (17 significant digits).
void save_model(const HybridModel& model, const std::string& path);
HybridModel load_model(const std::string& path);

}  // namespace qmalsim
