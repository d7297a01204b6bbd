#include "qmalsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qmalsim {

std::int64_t ConfusionMatrix::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

ConfusionMatrix confusion(std::span<const int> labels, std::span<const int> predictions,
                          int n_classes) {
  if (labels.empty()) throw std::invalid_argument("confusion matrix of empty input");
  if (labels.size() != predictions.size()) {
    throw std::invalid_argument("labels and predictions must have equal length");
  }
  ConfusionMatrix cm;
  cm.n_classes = n_classes;
  cm.counts.assign(static_cast<std::size_t>(n_classes) * n_classes, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= n_classes || predictions[i] < 0 ||
        predictions[i] >= n_classes) {
      throw std::out_of_range("class id out of range at sample " + std::to_string(i));
    }
    ++cm.at(labels[i], predictions[i]);
  }
  return cm;
}

namespace {

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

}  // namespace

MetricsReport scalar_metrics(const ConfusionMatrix& cm) {
  const std::int64_t total = cm.total();
  if (cm.n_classes < 1 || total == 0) {
    throw std::invalid_argument("scalar_metrics on empty confusion matrix");
  }
  MetricsReport report;
  std::int64_t diagonal = 0;
  for (int c = 0; c < cm.n_classes; ++c) {
    const double tp = static_cast<double>(cm.at(c, c));
    double row = 0.0, col = 0.0;
    for (int j = 0; j < cm.n_classes; ++j) {
      row += static_cast<double>(cm.at(c, j));
      col += static_cast<double>(cm.at(j, c));
    }
    const double fn = row - tp;
    const double fp = col - tp;
    const double tn = static_cast<double>(total) - tp - fn - fp;
    PerClassMetrics pc;
    pc.precision = safe_ratio(tp, tp + fp);
    pc.recall = safe_ratio(tp, tp + fn);
    pc.f1 = safe_ratio(2.0 * pc.precision * pc.recall, pc.precision + pc.recall);
    pc.fpr = safe_ratio(fp, fp + tn);
    pc.fnr = safe_ratio(fn, fn + tp);
    report.per_class.push_back(pc);
    report.macro_precision += pc.precision;
    report.macro_recall += pc.recall;
    report.macro_f1 += pc.f1;
    report.macro_fpr += pc.fpr;
    report.macro_fnr += pc.fnr;
    diagonal += cm.at(c, c);
  }
  const double inv = 1.0 / static_cast<double>(cm.n_classes);
  report.macro_precision *= inv;
  report.macro_recall *= inv;
  report.macro_f1 *= inv;
  report.macro_fpr *= inv;
  report.macro_fnr *= inv;
  report.accuracy = static_cast<double>(diagonal) / static_cast<double>(total);
  return report;
}

double roc_auc_binary(std::span<const int> labels, std::span<const double> scores) {
  if (labels.size() != scores.size() || labels.empty()) {
    throw std::invalid_argument("roc_auc inputs must be non-empty and equal length");
  }
  std::size_t n_pos = 0;
  for (int l : labels) n_pos += (l == 1);
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw std::invalid_argument("ROC-AUC undefined: only one class present");
  }
  // Rank-based Mann-Whitney with average ranks over ties.
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]] == 1) rank_sum_pos += avg_rank;
    }
    i = j + 1;
  }
  const double n_pos_d = static_cast<double>(n_pos);
  const double u = rank_sum_pos - n_pos_d * (n_pos_d + 1.0) / 2.0;
  return u / (n_pos_d * static_cast<double>(n_neg));
}

double roc_auc(std::span<const int> labels, const std::vector<std::vector<double>>& class_scores,
               int n_classes) {
  if (labels.empty() || labels.size() != class_scores.size()) {
    throw std::invalid_argument("roc_auc inputs must be non-empty and equal length");
  }
  std::vector<std::int64_t> class_counts(n_classes, 0);
  for (int l : labels) {
    if (l < 0 || l >= n_classes) throw std::out_of_range("label out of range");
    ++class_counts[l];
  }
  const int present =
      static_cast<int>(std::count_if(class_counts.begin(), class_counts.end(),
                                     [](std::int64_t c) { return c > 0; }));
  if (present < 2) {
    throw std::invalid_argument("ROC-AUC undefined: only one class present");
  }
  std::vector<double> column(labels.size());
  if (n_classes == 2) {
    for (std::size_t i = 0; i < labels.size(); ++i) column[i] = class_scores[i][1];
    return roc_auc_binary(labels, column);
  }
  double sum = 0.0;
  int included = 0;
  std::vector<int> ovr(labels.size());
  for (int c = 0; c < n_classes; ++c) {
    if (class_counts[c] == 0) continue;  // absent classes are skipped
    for (std::size_t i = 0; i < labels.size(); ++i) {
      ovr[i] = labels[i] == c ? 1 : 0;
      column[i] = class_scores[i][c];
    }
    sum += roc_auc_binary(ovr, column);
    ++included;
  }
  return sum / static_cast<double>(included);
}

MetricsSummary aggregate_runs(const std::vector<MetricsReport>& reports) {
  if (reports.empty()) throw std::invalid_argument("aggregate_runs on empty list");
  MetricsSummary summary;
  for (const MetricField& mf : metric_fields()) {
    double mean = 0.0;
    for (const MetricsReport& r : reports) mean += r.*(mf.field);
    mean /= static_cast<double>(reports.size());
    double var = 0.0;
    if (reports.size() > 1) {
      for (const MetricsReport& r : reports) {
        const double d = r.*(mf.field) - mean;
        var += d * d;
      }
      var /= static_cast<double>(reports.size() - 1);
    }
    summary.mean.*(mf.field) = mean;
    summary.stddev.*(mf.field) = std::sqrt(var);
  }
  return summary;
}

std::span<const MetricField> metric_fields() {
  static const MetricField fields[] = {
      {"accuracy", "Accuracy", &MetricsReport::accuracy},
      {"precision", "Precision", &MetricsReport::macro_precision},
      {"recall", "Recall", &MetricsReport::macro_recall},
      {"f1", "F1 Score", &MetricsReport::macro_f1},
      {"fpr", "FPR", &MetricsReport::macro_fpr},
      {"fnr", "FNR", &MetricsReport::macro_fnr},
      {"roc_auc", "ROC-AUC", &MetricsReport::roc_auc},
  };
  return fields;
}

}  // namespace qmalsim
