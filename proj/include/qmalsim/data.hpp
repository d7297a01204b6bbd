#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qmalsim {

using Matrix = std::vector<std::vector<double>>;

// Labeled feature matrix. Labels are class ids in [0, n_classes).
struct Dataset {
  Matrix features;
  std::vector<int> labels;
  int n_classes = 0;

  std::size_t size() const { return features.size(); }
  std::size_t n_features() const { return features.empty() ? 0 : features[0].size(); }
};

struct CsvSchema {
  std::optional<int> n_classes;  // default: max label + 1
};

// UTF-8, comma-separated, header row, final column "label" holding
// non-negative integer class ids. Parse failures name the offending line.
Dataset load_csv(const std::string& path, const CsvSchema& schema = {});

// Header f0..f{d-1},label; 17-significant-digit reals.
void write_csv(const Dataset& ds, const std::string& path);

struct MinMaxBounds {
  std::vector<double> min;
  std::vector<double> max;
};

MinMaxBounds minmax_fit(const Matrix& features);

// (x - min) / (max - min) clamped to [0, 1]; constant features map to 0.
Matrix minmax_apply(const Matrix& features, const MinMaxBounds& bounds);

// Top-k principal axes of the sample covariance: orthonormal rows sorted by
// descending explained variance; each row's largest-magnitude entry is made
// positive (ties broken by lowest index).
struct PcaModel {
  std::vector<double> mean;
  Matrix components;               // k x n_features
  std::vector<double> variances;   // descending eigenvalues, length k
};

// Requires n_samples >= 2 and k <= min(n_samples - 1, n_features).
PcaModel pca_fit(const Matrix& features, int k);

// (x - mean) * components^T.
Matrix pca_apply(const Matrix& features, const PcaModel& model);

MinMaxBounds angle_rescale_fit(const Matrix& projections);

// Per-component Min-Max to [0, 1] (clamped) then scaled by pi.
Matrix angle_rescale_apply(const Matrix& projections, const MinMaxBounds& bounds);

// Min-Max -> PCA -> angle rescale, fitted stage by stage on training data.
struct PreprocessorModel {
  MinMaxBounds input_bounds;
  PcaModel pca;
  MinMaxBounds post_bounds;
  int k = 0;

  std::size_t input_width() const { return input_bounds.min.size(); }
};

PreprocessorModel preprocess_fit(const Dataset& train, int k);
Dataset preprocess_apply(const Dataset& ds, const PreprocessorModel& model);

// Gaussian blobs: class c is an isotropic unit-variance cloud around a
// pseudo-random unit direction scaled by `separation`. Draw order from the
// seed: per-class centroid directions first (class-major, feature-major),
// then samples (class-major, sample-major, feature-major).
struct SyntheticSpec {
  int n_classes;
  int n_features;
  int samples_per_class;
  double separation;
  std::uint64_t seed;
};

Dataset generate_synthetic(const SyntheticSpec& spec);

// Index batches for one epoch: a Fisher-Yates shuffle seeded by
// (seed, epoch), split into consecutive chunks; the final partial batch is
// kept.
std::vector<std::vector<std::size_t>> batches(std::size_t n_samples,
                                              std::size_t batch_size,
                                              std::uint64_t seed,
                                              std::uint64_t epoch);

}  // namespace qmalsim
