#include "qmalsim/circuits.hpp"

#include <stdexcept>

namespace qmalsim {

std::string arch_kind_name(ArchKind kind) {
  return kind == ArchKind::QMLP ? "qmlp" : "qcnn";
}

ArchKind parse_arch_kind(const std::string& name) {
  if (name == "qmlp") return ArchKind::QMLP;
  if (name == "qcnn") return ArchKind::QCNN;
  throw std::invalid_argument("unknown model kind '" + name + "' (expected qmlp or qcnn)");
}

void Architecture::validate() const {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw std::invalid_argument("n_qubits out of range [1, " +
                                std::to_string(kMaxQubits) + "]");
  }
  if (kind == ArchKind::QMLP) {
    if (n_qubits < 2) {
      throw std::invalid_argument("QMLP requires at least 2 qubits (CRX ring)");
    }
    if (n_layers < 1) {
      throw std::invalid_argument("QMLP requires n_layers >= 1");
    }
  } else {
    if (n_qubits < 4 || n_qubits % 4 != 0) {
      throw std::invalid_argument(
          "QCNN requires n_qubits divisible by 4 and >= 4 (two pooling halvings)");
    }
    if (n_layers != 2) {
      throw std::invalid_argument("QCNN layer count is fixed at 2");
    }
  }
}

int Architecture::measured_count() const {
  return kind == ArchKind::QMLP ? n_qubits : n_qubits / 4;
}

ShiftRule ParameterVector::rule_at(std::size_t index) const {
  return segment_at(index).rule;
}

const ParamSegment& ParameterVector::segment_at(std::size_t index) const {
  for (const ParamSegment& seg : layout) {
    if (index >= seg.offset && index < seg.offset + seg.length) return seg;
  }
  throw std::out_of_range("parameter index " + std::to_string(index) +
                          " outside layout");
}

std::size_t param_count(const Architecture& arch) {
  arch.validate();
  const std::size_t n = static_cast<std::size_t>(arch.n_qubits);
  if (arch.kind == ArchKind::QMLP) {
    return static_cast<std::size_t>(arch.n_layers) * (3 * n + n);
  }
  return 3 * n + n + 3 * (n / 2) + (n / 2);
}

ParameterVector make_parameter_vector(const Architecture& arch) {
  arch.validate();
  ParameterVector pv;
  const std::size_t n = static_cast<std::size_t>(arch.n_qubits);
  std::size_t offset = 0;
  auto add = [&](std::string name, std::size_t length, ShiftRule rule) {
    pv.layout.push_back({std::move(name), offset, length, rule});
    offset += length;
  };
  if (arch.kind == ArchKind::QMLP) {
    for (int layer = 0; layer < arch.n_layers; ++layer) {
      const std::string prefix = "layer" + std::to_string(layer);
      add(prefix + ".rot", 3 * n, ShiftRule::TwoTerm);
      add(prefix + ".crx", n, ShiftRule::FourTerm);
    }
  } else {
    add("stage1.rot", 3 * n, ShiftRule::TwoTerm);
    add("stage1.crx", n, ShiftRule::FourTerm);
    add("stage2.rot", 3 * (n / 2), ShiftRule::TwoTerm);
    add("stage2.crx", n / 2, ShiftRule::FourTerm);
  }
  pv.values.assign(offset, 0.0);
  return pv;
}

namespace {

void check_shapes(const Architecture& arch, std::span<const double> x,
                  const ParameterVector& params) {
  arch.validate();
  if (x.size() != static_cast<std::size_t>(arch.n_qubits)) {
    throw std::invalid_argument("feature vector length " + std::to_string(x.size()) +
                                " does not match n_qubits " +
                                std::to_string(arch.n_qubits));
  }
  if (params.size() != param_count(arch)) {
    throw std::invalid_argument("parameter vector length " +
                                std::to_string(params.size()) +
                                " does not match param_count " +
                                std::to_string(param_count(arch)));
  }
}

// Rot on each active qubit, then the CRX ring over the active set in order.
void append_trainable_block(std::vector<GateOp>& ops, const std::vector<int>& active,
                            std::span<const double> rot, std::span<const double> crx) {
  for (std::size_t i = 0; i < active.size(); ++i) {
    ops.push_back(GateOp::rot(active[i], rot[3 * i], rot[3 * i + 1], rot[3 * i + 2]));
  }
  for (std::size_t i = 0; i < active.size(); ++i) {
    const int control = active[i];
    const int target = active[(i + 1) % active.size()];
    ops.push_back(GateOp::crx(control, target, crx[i]));
  }
}

std::span<const double> segment_values(const ParameterVector& params, std::size_t seg) {
  const ParamSegment& s = params.layout.at(seg);
  return {params.values.data() + s.offset, s.length};
}

}  // namespace

Circuit build_qmlp(const Architecture& arch, std::span<const double> x,
                   const ParameterVector& params) {
  check_shapes(arch, x, params);
  Circuit c;
  std::vector<int> all(arch.n_qubits);
  for (int q = 0; q < arch.n_qubits; ++q) all[q] = q;
  for (int layer = 0; layer < arch.n_layers; ++layer) {
    for (int q = 0; q < arch.n_qubits; ++q) c.ops.push_back(GateOp::rx(q, x[q]));
    append_trainable_block(c.ops, all, segment_values(params, 2 * layer),
                           segment_values(params, 2 * layer + 1));
  }
  c.measured = all;
  return c;
}

Circuit build_qcnn(const Architecture& arch, std::span<const double> x,
                   const ParameterVector& params) {
  check_shapes(arch, x, params);
  Circuit c;
  for (int q = 0; q < arch.n_qubits; ++q) {
    c.ops.push_back(GateOp::rx(q, x[q]));
    c.ops.push_back(GateOp::ry(q, x[q]));
    c.ops.push_back(GateOp::rz(q, x[q]));
  }
  for (int stage = 0; stage < 2; ++stage) {
    const std::vector<int> active = qcnn_active_set(arch.n_qubits, stage);
    append_trainable_block(c.ops, active, segment_values(params, 2 * stage),
                           segment_values(params, 2 * stage + 1));
  }
  c.measured = qcnn_active_set(arch.n_qubits, 2);
  return c;
}

Circuit build_circuit(const Architecture& arch, std::span<const double> x,
                      const ParameterVector& params) {
  return arch.kind == ArchKind::QMLP ? build_qmlp(arch, x, params)
                                     : build_qcnn(arch, x, params);
}

std::vector<int> qcnn_active_set(int n_qubits, int stage) {
  if (stage < 0 || stage > 2) throw std::out_of_range("QCNN stage must be 0, 1 or 2");
  std::vector<int> active(n_qubits);
  for (int q = 0; q < n_qubits; ++q) active[q] = q;
  for (int s = 0; s < stage; ++s) {
    std::vector<int> kept;
    for (std::size_t i = 0; i < active.size(); i += 2) kept.push_back(active[i]);
    active = std::move(kept);
  }
  return active;
}

std::vector<double> quantum_forward(const Architecture& arch,
                                    std::span<const double> x,
                                    const ParameterVector& params) {
  const Circuit circuit = build_circuit(arch, x, params);
  Statevector state(arch.n_qubits);
  state.run(circuit.ops);
  std::vector<double> expectations;
  expectations.reserve(circuit.measured.size());
  for (int q : circuit.measured) expectations.push_back(state.z_expectation(q));
  return expectations;
}

}  // namespace qmalsim
