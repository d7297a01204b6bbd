#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmalsim/training.hpp"

namespace qmalsim {

namespace {

std::string format_real(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

void write_values(std::ostream& out, const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    out << (i ? " " : "") << format_real(values[i]);
  }
  out << '\n';
}

void write_matrix(std::ostream& out, const Matrix& m) {
  for (const auto& row : m) write_values(out, row);
}

[[noreturn]] void malformed(const std::string& what) {
  throw std::runtime_error("malformed model file: " + what);
}

class FieldReader {
 public:
  explicit FieldReader(std::istream& in) : in_(in) {}

  // "name <count...>" line; returns the integers after the keyword.
  std::vector<long long> header(const std::string& keyword) {
    std::string line;
    if (!std::getline(in_, line)) malformed("truncated before '" + keyword + "'");
    std::istringstream ss(line);
    std::string word;
    ss >> word;
    if (word != keyword) malformed("expected '" + keyword + "', got '" + word + "'");
    std::vector<long long> dims;
    long long v;
    while (ss >> v) dims.push_back(v);
    return dims;
  }

  std::string word_field(const std::string& keyword) {
    std::string line;
    if (!std::getline(in_, line)) malformed("truncated before '" + keyword + "'");
    std::istringstream ss(line);
    std::string word, value;
    ss >> word >> value;
    if (word != keyword || value.empty()) malformed("expected '" + keyword + " <value>'");
    return value;
  }

  std::vector<double> values(std::size_t count) {
    std::string line;
    if (!std::getline(in_, line)) malformed("truncated value block");
    std::istringstream ss(line);
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
      if (!(ss >> out[i])) malformed("short value row");
    }
    double extra;
    if (ss >> extra) malformed("excess values in row");
    return out;
  }

  Matrix matrix(std::size_t rows, std::size_t cols) {
    Matrix m;
    m.reserve(rows);
    for (std::size_t r = 0; r < rows; ++r) m.push_back(values(cols));
    return m;
  }

 private:
  std::istream& in_;
};

}  // namespace

void save_model(const HybridModel& model, const std::string& path) {
  std::ostringstream body;
  body << "arch " << arch_kind_name(model.arch.kind) << '\n';
  body << "qubits " << model.arch.n_qubits << '\n';
  body << "layers " << model.arch.n_layers << '\n';
  body << "classes " << model.n_classes << '\n';
  body << "quantum_params " << model.quantum_params.size() << '\n';
  write_values(body, model.quantum_params.values);
  body << "head_weights " << model.head.n_classes << ' ' << model.head.n_inputs << '\n';
  for (int c = 0; c < model.head.n_classes; ++c) {
    std::vector<double> row(model.head.weights.begin() + static_cast<std::ptrdiff_t>(c) * model.head.n_inputs,
                            model.head.weights.begin() + static_cast<std::ptrdiff_t>(c + 1) * model.head.n_inputs);
    write_values(body, row);
  }
  body << "head_bias " << model.head.bias.size() << '\n';
  write_values(body, model.head.bias);
  const PreprocessorModel& pre = model.preprocessor;
  body << "preproc_k " << pre.k << '\n';
  body << "input_min " << pre.input_bounds.min.size() << '\n';
  write_values(body, pre.input_bounds.min);
  body << "input_max " << pre.input_bounds.max.size() << '\n';
  write_values(body, pre.input_bounds.max);
  body << "pca_mean " << pre.pca.mean.size() << '\n';
  write_values(body, pre.pca.mean);
  body << "pca_components " << pre.pca.components.size() << ' '
       << (pre.pca.components.empty() ? 0 : pre.pca.components[0].size()) << '\n';
  write_matrix(body, pre.pca.components);
  body << "pca_variances " << pre.pca.variances.size() << '\n';
  write_values(body, pre.pca.variances);
  body << "post_min " << pre.post_bounds.min.size() << '\n';
  write_values(body, pre.post_bounds.min);
  body << "post_max " << pre.post_bounds.max.size() << '\n';
  write_values(body, pre.post_bounds.max);
  body << "end\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  const std::string payload = body.str();
  out << "qmalsim-model " << kModelFormatVersion << '\n';
  out << "checksum " << hex64(fnv1a(payload)) << '\n';
  out << payload;
  if (!out) throw std::runtime_error("write failed for " + path);
}

HybridModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) malformed("empty file");
  {
    std::istringstream ss(line);
    std::string magic;
    int version = -1;
    ss >> magic >> version;
    if (magic != "qmalsim-model") malformed("bad magic line");
    if (version != kModelFormatVersion) {
      throw std::runtime_error("model format version mismatch: found " +
                               std::to_string(version) + ", expected " +
                               std::to_string(kModelFormatVersion));
    }
  }
  if (!std::getline(in, line)) malformed("missing checksum line");
  std::string stated;
  {
    std::istringstream ss(line);
    std::string word;
    ss >> word >> stated;
    if (word != "checksum" || stated.size() != 16) malformed("bad checksum line");
  }
  std::ostringstream rest;
  rest << in.rdbuf();
  const std::string payload = rest.str();
  if (hex64(fnv1a(payload)) != stated) {
    throw std::runtime_error("model file checksum mismatch (corrupted file)");
  }

  std::istringstream body(payload);
  FieldReader reader(body);
  HybridModel model;
  model.arch.kind = parse_arch_kind(reader.word_field("arch"));
  model.arch.n_qubits = static_cast<int>(reader.header("qubits").at(0));
  model.arch.n_layers = static_cast<int>(reader.header("layers").at(0));
  model.n_classes = static_cast<int>(reader.header("classes").at(0));
  model.arch.validate();

  const auto n_params = static_cast<std::size_t>(reader.header("quantum_params").at(0));
  model.quantum_params = make_parameter_vector(model.arch);
  if (n_params != model.quantum_params.size()) malformed("quantum parameter count mismatch");
  model.quantum_params.values = reader.values(n_params);

  const auto head_dims = reader.header("head_weights");
  if (head_dims.size() != 2) malformed("head_weights needs rows and cols");
  model.head = make_head(static_cast<int>(head_dims[0]), static_cast<int>(head_dims[1]));
  if (model.head.n_classes != model.n_classes ||
      model.head.n_inputs != model.arch.measured_count()) {
    malformed("head shape inconsistent with architecture");
  }
  const Matrix weights = reader.matrix(static_cast<std::size_t>(head_dims[0]),
                                       static_cast<std::size_t>(head_dims[1]));
  for (int c = 0; c < model.head.n_classes; ++c) {
    for (int i = 0; i < model.head.n_inputs; ++i) {
      model.head.weight(c, i) = weights[c][i];
    }
  }
  model.head.bias = reader.values(static_cast<std::size_t>(reader.header("head_bias").at(0)));
  if (model.head.bias.size() != static_cast<std::size_t>(model.n_classes)) {
    malformed("bias length mismatch");
  }

  PreprocessorModel& pre = model.preprocessor;
  pre.k = static_cast<int>(reader.header("preproc_k").at(0));
  if (pre.k != model.arch.n_qubits) malformed("preprocessor width mismatch");
  pre.input_bounds.min = reader.values(static_cast<std::size_t>(reader.header("input_min").at(0)));
  pre.input_bounds.max = reader.values(static_cast<std::size_t>(reader.header("input_max").at(0)));
  pre.pca.mean = reader.values(static_cast<std::size_t>(reader.header("pca_mean").at(0)));
  const auto comp_dims = reader.header("pca_components");
  if (comp_dims.size() != 2) malformed("pca_components needs rows and cols");
  pre.pca.components = reader.matrix(static_cast<std::size_t>(comp_dims[0]),
                                     static_cast<std::size_t>(comp_dims[1]));
  pre.pca.variances = reader.values(static_cast<std::size_t>(reader.header("pca_variances").at(0)));
  pre.post_bounds.min = reader.values(static_cast<std::size_t>(reader.header("post_min").at(0)));
  pre.post_bounds.max = reader.values(static_cast<std::size_t>(reader.header("post_max").at(0)));
  reader.header("end");
  return model;
}

}  // namespace qmalsim
