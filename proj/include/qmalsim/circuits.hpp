#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qmalsim/simulator.hpp"

namespace qmalsim {

enum class ArchKind { QMLP, QCNN };

std::string arch_kind_name(ArchKind kind);
ArchKind parse_arch_kind(const std::string& name);

// QMLP: n_qubits >= 2, n_layers >= 1 data re-uploading repetitions.
// QCNN: n_qubits divisible by 4 and >= 4; n_layers is fixed at 2 (the two
// conv/pool stages) and is not configurable.
struct Architecture {
  ArchKind kind;
  int n_qubits;
  int n_layers = 2;

  void validate() const;
  int measured_count() const;  // QMLP: n_qubits, QCNN: n_qubits / 4
};

// Gradient rule for a trainable parameter (see autodiff module).
enum class ShiftRule { TwoTerm, FourTerm };

struct ParamSegment {
  std::string name;
  std::size_t offset;
  std::size_t length;
  ShiftRule rule;
};

// Flat trainable-parameter array with its frozen segment layout.
// QMLP: [layer0.rot (3n), layer0.crx (n), layer1.rot, layer1.crx, ...]
// QCNN: [stage1.rot (3n), stage1.crx (n), stage2.rot (3n/2), stage2.crx (n/2)]
// Rot segments are qubit-major (phi, theta, omega per active qubit); CRX
// segments follow the ring order of the active set.
struct ParameterVector {
  std::vector<double> values;
  std::vector<ParamSegment> layout;

  std::size_t size() const { return values.size(); }
  ShiftRule rule_at(std::size_t index) const;
  const ParamSegment& segment_at(std::size_t index) const;
};

std::size_t param_count(const Architecture& arch);

// Zero-initialized parameters with the layout above.
ParameterVector make_parameter_vector(const Architecture& arch);

struct Circuit {
  std::vector<GateOp> ops;
  std::vector<int> measured;  // ascending qubit order
};

// Per layer: RX(x_i) on every qubit, Rot on every qubit, CRX ring with
// control i -> target (i+1) mod n. Measures all qubits.
Circuit build_qmlp(const Architecture& arch, std::span<const double> x,
                   const ParameterVector& params);

// Embedding RX/RY/RZ(x_i) per qubit, then two stages of (Rot per active
// qubit, CRX ring over the active set), each followed by pooling that keeps
// every second active qubit. Measures the final active set.
Circuit build_qcnn(const Architecture& arch, std::span<const double> x,
                   const ParameterVector& params);

Circuit build_circuit(const Architecture& arch, std::span<const double> x,
                      const ParameterVector& params);

// Active qubits entering stage `stage` (0 = embedding width). For n=16:
// stage 0 -> {0..15}, stage 1 -> {0,2,...,14}, stage 2 -> {0,4,8,12}.
std::vector<int> qcnn_active_set(int n_qubits, int stage);

// init -> run -> Z expectation per measured qubit, ascending.
std::vector<double> quantum_forward(const Architecture& arch,
                                    std::span<const double> x,
                                    const ParameterVector& params);

}  // namespace qmalsim
