#include "qmalsim/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "qmalsim/rng.hpp"

namespace qmalsim {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

[[noreturn]] void parse_fail(const std::string& path, std::size_t line, const std::string& what) {
  throw std::runtime_error(path + ": line " + std::to_string(line) + ": " + what);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string::size_type start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    std::string cell = line.substr(start, comma == std::string::npos ? std::string::npos
                                                                     : comma - start);
    // trim surrounding whitespace and CR from CRLF files
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    cells.push_back(first == std::string::npos ? std::string{}
                                               : cell.substr(first, last - first + 1));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

double parse_real(const std::string& cell, const std::string& path, std::size_t line) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc{} || result.ptr != end || cell.empty()) {
    parse_fail(path, line, "expected a real number, got '" + cell + "'");
  }
  if (!std::isfinite(value)) {
    parse_fail(path, line, "non-finite feature value '" + cell + "'");
  }
  return value;
}

int parse_label(const std::string& cell, const std::string& path, std::size_t line) {
  int value = 0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc{} || result.ptr != end || cell.empty()) {
    parse_fail(path, line, "expected an integer label, got '" + cell + "'");
  }
  if (value < 0) {
    parse_fail(path, line, "negative label " + std::to_string(value));
  }
  return value;
}

std::string format_real(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error(path + ": empty file (missing header)");
  }
  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 2 || header.back() != "label") {
    throw std::runtime_error(path +
                             ": line 1: header must list at least one feature column and "
                             "end with 'label'");
  }
  const std::size_t width = header.size() - 1;

  Dataset ds;
  std::size_t line_no = 1;
  int max_label = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      parse_fail(path, line_no,
                 "expected " + std::to_string(header.size()) + " columns, got " +
                     std::to_string(cells.size()));
    }
    std::vector<double> row(width);
    for (std::size_t i = 0; i < width; ++i) row[i] = parse_real(cells[i], path, line_no);
    const int label = parse_label(cells.back(), path, line_no);
    max_label = std::max(max_label, label);
    ds.features.push_back(std::move(row));
    ds.labels.push_back(label);
  }
  if (ds.features.empty()) {
    throw std::runtime_error(path + ": no data rows (empty dataset)");
  }
  ds.n_classes = schema.n_classes.value_or(max_label + 1);
  if (max_label >= ds.n_classes) {
    throw std::runtime_error(path + ": label " + std::to_string(max_label) +
                             " exceeds declared class count " +
                             std::to_string(ds.n_classes));
  }
  return ds;
}

void write_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  const std::size_t width = ds.n_features();
  for (std::size_t i = 0; i < width; ++i) out << 'f' << i << ',';
  out << "label\n";
  for (std::size_t row = 0; row < ds.size(); ++row) {
    for (std::size_t i = 0; i < width; ++i) out << format_real(ds.features[row][i]) << ',';
    out << ds.labels[row] << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

MinMaxBounds minmax_fit(const Matrix& features) {
  if (features.empty()) throw std::invalid_argument("minmax_fit on empty feature matrix");
  const std::size_t width = features[0].size();
  MinMaxBounds b;
  b.min.assign(width, 0.0);
  b.max.assign(width, 0.0);
  for (std::size_t j = 0; j < width; ++j) {
    double lo = features[0][j], hi = features[0][j];
    for (const auto& row : features) {
      lo = std::min(lo, row[j]);
      hi = std::max(hi, row[j]);
    }
    b.min[j] = lo;
    b.max[j] = hi;
  }
  return b;
}

Matrix minmax_apply(const Matrix& features, const MinMaxBounds& bounds) {
  Matrix out(features.size(), std::vector<double>(bounds.min.size(), 0.0));
  for (std::size_t r = 0; r < features.size(); ++r) {
    if (features[r].size() != bounds.min.size()) {
      throw std::invalid_argument("feature width does not match fitted bounds");
    }
    for (std::size_t j = 0; j < bounds.min.size(); ++j) {
      const double range = bounds.max[j] - bounds.min[j];
      double v = range > 0.0 ? (features[r][j] - bounds.min[j]) / range : 0.0;
      out[r][j] = std::clamp(v, 0.0, 1.0);
    }
  }
  return out;
}

namespace {

// Cyclic Jacobi eigensolver for a symmetric matrix; fixed sweep order keeps
// the decomposition deterministic. a is overwritten with the diagonalized
// matrix; v receives the eigenvectors as columns.
void jacobi_eigen(Matrix& a, Matrix& v) {
  const std::size_t n = a.size();
  v.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
  double total = 0.0;
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) total += a[p][q] * a[p][q];
  const double tol = total * 1e-26;
  const int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off <= tol) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p][q];
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t i = 0; i < n; ++i) {
          const double aip = a[i][p], aiq = a[i][q];
          a[i][p] = c * aip - s * aiq;
          a[i][q] = s * aip + c * aiq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double api = a[p][i], aqi = a[q][i];
          a[p][i] = c * api - s * aqi;
          a[q][i] = s * api + c * aqi;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vip = v[i][p], viq = v[i][q];
          v[i][p] = c * vip - s * viq;
          v[i][q] = s * vip + c * viq;
        }
      }
    }
  }
}

}  // namespace

PcaModel pca_fit(const Matrix& features, int k) {
  if (features.size() < 2) {
    throw std::invalid_argument("pca_fit requires at least 2 samples");
  }
  const std::size_t n = features.size();
  const std::size_t d = features[0].size();
  if (k < 1 || static_cast<std::size_t>(k) > std::min(n - 1, d)) {
    throw std::invalid_argument("pca k=" + std::to_string(k) +
                                " must be in [1, min(n_samples-1, n_features)] = [1, " +
                                std::to_string(std::min(n - 1, d)) + "]");
  }
  PcaModel model;
  model.mean.assign(d, 0.0);
  for (const auto& row : features)
    for (std::size_t j = 0; j < d; ++j) model.mean[j] += row[j];
  for (double& m : model.mean) m /= static_cast<double>(n);

  Matrix cov(d, std::vector<double>(d, 0.0));
  for (const auto& row : features) {
    for (std::size_t i = 0; i < d; ++i) {
      const double ci = row[i] - model.mean[i];
      for (std::size_t j = i; j < d; ++j) {
        cov[i][j] += ci * (row[j] - model.mean[j]);
      }
    }
  }
  const double scale = 1.0 / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      cov[i][j] *= scale;
      cov[j][i] = cov[i][j];
    }
  }

  Matrix vecs;
  jacobi_eigen(cov, vecs);

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return cov[a][a] > cov[b][b]; });

  model.components.assign(k, std::vector<double>(d, 0.0));
  model.variances.assign(k, 0.0);
  for (int c = 0; c < k; ++c) {
    const std::size_t col = order[c];
    model.variances[c] = cov[col][col];
    for (std::size_t j = 0; j < d; ++j) model.components[c][j] = vecs[j][col];
    // sign convention: largest-magnitude entry positive, lowest index on ties
    std::size_t pivot = 0;
    for (std::size_t j = 1; j < d; ++j) {
      if (std::abs(model.components[c][j]) > std::abs(model.components[c][pivot])) pivot = j;
    }
    if (model.components[c][pivot] < 0.0) {
      for (double& x : model.components[c]) x = -x;
    }
  }
  return model;
}

Matrix pca_apply(const Matrix& features, const PcaModel& model) {
  const std::size_t d = model.mean.size();
  const std::size_t k = model.components.size();
  Matrix out(features.size(), std::vector<double>(k, 0.0));
  for (std::size_t r = 0; r < features.size(); ++r) {
    if (features[r].size() != d) {
      throw std::invalid_argument("feature width " + std::to_string(features[r].size()) +
                                  " does not match PCA input width " + std::to_string(d));
    }
    for (std::size_t c = 0; c < k; ++c) {
      double acc = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        acc += (features[r][j] - model.mean[j]) * model.components[c][j];
      }
      out[r][c] = acc;
    }
  }
  return out;
}

MinMaxBounds angle_rescale_fit(const Matrix& projections) {
  return minmax_fit(projections);
}

Matrix angle_rescale_apply(const Matrix& projections, const MinMaxBounds& bounds) {
  Matrix out = minmax_apply(projections, bounds);
  for (auto& row : out)
    for (double& v : row) v *= kPi;
  return out;
}

PreprocessorModel preprocess_fit(const Dataset& train, int k) {
  if (train.size() == 0) throw std::invalid_argument("preprocess_fit on empty dataset");
  PreprocessorModel model;
  model.k = k;
  model.input_bounds = minmax_fit(train.features);
  const Matrix scaled = minmax_apply(train.features, model.input_bounds);
  model.pca = pca_fit(scaled, k);
  const Matrix projected = pca_apply(scaled, model.pca);
  model.post_bounds = angle_rescale_fit(projected);
  return model;
}

Dataset preprocess_apply(const Dataset& ds, const PreprocessorModel& model) {
  Dataset out;
  out.features = angle_rescale_apply(
      pca_apply(minmax_apply(ds.features, model.input_bounds), model.pca),
      model.post_bounds);
  out.labels = ds.labels;
  out.n_classes = ds.n_classes;
  return out;
}

Dataset generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n_classes < 1 || spec.n_features < 1 || spec.samples_per_class < 1) {
    throw std::invalid_argument("synthetic spec dimensions must be positive");
  }
  if (!(spec.separation > 0.0)) {
    throw std::invalid_argument("synthetic separation must be positive");
  }
  Rng rng(spec.seed);
  Matrix centroids(spec.n_classes, std::vector<double>(spec.n_features, 0.0));
  for (auto& centroid : centroids) {
    double norm_sq = 0.0;
    for (double& x : centroid) {
      x = rng.gaussian();
      norm_sq += x * x;
    }
    const double norm = std::sqrt(norm_sq);
    if (norm < 1e-12) {
      std::fill(centroid.begin(), centroid.end(), 0.0);
      centroid[0] = spec.separation;  // vanishing draw; fall back to a fixed axis
      continue;
    }
    for (double& x : centroid) x *= spec.separation / norm;
  }
  Dataset ds;
  ds.n_classes = spec.n_classes;
  ds.features.reserve(static_cast<std::size_t>(spec.n_classes) * spec.samples_per_class);
  for (int c = 0; c < spec.n_classes; ++c) {
    for (int s = 0; s < spec.samples_per_class; ++s) {
      std::vector<double> row(spec.n_features);
      for (int f = 0; f < spec.n_features; ++f) {
        row[f] = centroids[c][f] + rng.gaussian();
      }
      ds.features.push_back(std::move(row));
      ds.labels.push_back(c);
    }
  }
  return ds;
}

std::vector<std::vector<std::size_t>> batches(std::size_t n_samples,
                                              std::size_t batch_size,
                                              std::uint64_t seed,
                                              std::uint64_t epoch) {
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  std::vector<std::size_t> order(n_samples);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(combine_seed(seed, epoch));
  rng.shuffle(order);
  std::vector<std::vector<std::size_t>> chunks;
  for (std::size_t start = 0; start < n_samples; start += batch_size) {
    const std::size_t end = std::min(n_samples, start + batch_size);
    chunks.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                        order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return chunks;
}

}  // namespace qmalsim
