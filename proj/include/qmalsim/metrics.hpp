#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace qmalsim {

// Rows = true class, columns = predicted class.
struct ConfusionMatrix {
  int n_classes = 0;
  std::vector<std::int64_t> counts;

  std::int64_t at(int true_class, int predicted) const {
    return counts[static_cast<std::size_t>(true_class) * n_classes + predicted];
  }
  std::int64_t& at(int true_class, int predicted) {
    return counts[static_cast<std::size_t>(true_class) * n_classes + predicted];
  }
  std::int64_t total() const;
};

ConfusionMatrix confusion(std::span<const int> labels, std::span<const int> predictions,
                          int n_classes);

struct PerClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double fpr = 0.0;
  double fnr = 0.0;
};

struct MetricsReport {
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double macro_fpr = 0.0;
  double macro_fnr = 0.0;
  double roc_auc = 0.0;
  std::vector<PerClassMetrics> per_class;
};

// One-vs-rest per class, macro-averaged; zero-denominator metrics are 0 and
// the class still counts toward the macro mean. roc_auc is left at 0 for the
// caller to fill.
MetricsReport scalar_metrics(const ConfusionMatrix& cm);

// Mann-Whitney rank statistic: fraction of (positive, negative) pairs where
// the positive scores higher, ties counted 1/2. Positives are label == 1.
double roc_auc_binary(std::span<const int> labels, std::span<const double> scores);

// Binary: uses the class-1 score column. Multiclass: one-vs-rest macro mean
// over classes present in the labels. Errors when only one class is present.
double roc_auc(std::span<const int> labels, const std::vector<std::vector<double>>& class_scores,
               int n_classes);

// Per-metric mean and (n-1)-denominator standard deviation over the seven
// scalar metrics; a single run reports std 0.
struct MetricsSummary {
  MetricsReport mean;
  MetricsReport stddev;
};

MetricsSummary aggregate_runs(const std::vector<MetricsReport>& reports);

// The seven scalar metrics, in reporting order.
struct MetricField {
  const char* name;        // JSON key
  const char* label;       // table row label
  double MetricsReport::* field;
};

std::span<const MetricField> metric_fields();

}  // namespace qmalsim
