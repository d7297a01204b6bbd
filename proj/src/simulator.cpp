#include "qmalsim/simulator.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qmalsim {

Statevector::Statevector(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw std::invalid_argument("qubit count out of range [1, " +
                                std::to_string(kMaxQubits) +
                                "]: " + std::to_string(n_qubits));
  }
  amps_.assign(std::size_t{1} << n_qubits, c64{0.0, 0.0});
  amps_[0] = c64{1.0, 0.0};
}

Statevector::Statevector(int n_qubits, std::vector<c64> amplitudes)
    : Statevector(n_qubits) {
  if (amplitudes.size() != amps_.size()) {
    throw std::invalid_argument("amplitude vector length does not equal 2^n_qubits");
  }
  amps_ = std::move(amplitudes);
  if (std::abs(norm() - 1.0) > 1e-12) {
    throw std::invalid_argument("amplitudes are not normalized");
  }
}

void Statevector::check_qubit(int qubit) const {
  if (qubit < 0 || qubit >= n_qubits_) {
    throw std::out_of_range("qubit index " + std::to_string(qubit) +
                            " out of range for " + std::to_string(n_qubits_) +
                            " qubits");
  }
}

void Statevector::check_op(const GateOp& op) const {
  check_qubit(op.target);
  if (op.kind == GateKind::CRX) {
    check_qubit(op.control);
    if (op.control == op.target) {
      throw std::out_of_range("CRX control equals target (" +
                              std::to_string(op.target) + ")");
    }
  } else if (op.control != -1) {
    throw std::out_of_range("control qubit only valid for CRX");
  }
}

void Statevector::apply_1q(int qubit, c64 u00, c64 u01, c64 u10, c64 u11) {
  const std::size_t step = std::size_t{1} << qubit;
  const std::size_t n = amps_.size();
  for (std::size_t base = 0; base < n; base += step << 1) {
    for (std::size_t off = 0; off < step; ++off) {
      c64& a0 = amps_[base + off];
      c64& a1 = amps_[base + off + step];
      const c64 a = a0, b = a1;
      a0 = u00 * a + u01 * b;
      a1 = u10 * a + u11 * b;
    }
  }
}

void Statevector::apply_controlled_1q(int control, int target, c64 u00, c64 u01,
                                      c64 u10, c64 u11) {
  const std::size_t cmask = std::size_t{1} << control;
  const std::size_t step = std::size_t{1} << target;
  const std::size_t n = amps_.size();
  for (std::size_t base = 0; base < n; base += step << 1) {
    for (std::size_t off = 0; off < step; ++off) {
      const std::size_t i0 = base + off;
      if (!(i0 & cmask)) continue;  // control bit equal for both pair members
      c64& a0 = amps_[i0];
      c64& a1 = amps_[i0 + step];
      const c64 a = a0, b = a1;
      a0 = u00 * a + u01 * b;
      a1 = u10 * a + u11 * b;
    }
  }
}

namespace {

struct Mat2 {
  c64 u00, u01, u10, u11;
};

Mat2 rotation_matrix(Axis axis, double theta) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  switch (axis) {
    case Axis::X:
      return {c64{c, 0}, c64{0, -s}, c64{0, -s}, c64{c, 0}};
    case Axis::Y:
      return {c64{c, 0}, c64{-s, 0}, c64{s, 0}, c64{c, 0}};
    case Axis::Z:
      return {c64{c, -s}, c64{0, 0}, c64{0, 0}, c64{c, s}};
  }
  throw std::invalid_argument("unknown rotation axis");
}

}  // namespace

void Statevector::apply_rotation(Axis axis, int qubit, double theta) {
  check_qubit(qubit);
  const Mat2 m = rotation_matrix(axis, theta);
  apply_1q(qubit, m.u00, m.u01, m.u10, m.u11);
}

void Statevector::apply_rot(int qubit, double phi, double theta, double omega) {
  check_qubit(qubit);
  apply_rotation(Axis::Z, qubit, phi);
  apply_rotation(Axis::Y, qubit, theta);
  apply_rotation(Axis::Z, qubit, omega);
}

void Statevector::apply_crx(int control, int target, double theta) {
  check_op(GateOp::crx(control, target, theta));
  const Mat2 m = rotation_matrix(Axis::X, theta);
  apply_controlled_1q(control, target, m.u00, m.u01, m.u10, m.u11);
}

void Statevector::apply(const GateOp& op) {
  switch (op.kind) {
    case GateKind::RX:
      apply_rotation(Axis::X, op.target, op.angles[0]);
      return;
    case GateKind::RY:
      apply_rotation(Axis::Y, op.target, op.angles[0]);
      return;
    case GateKind::RZ:
      apply_rotation(Axis::Z, op.target, op.angles[0]);
      return;
    case GateKind::Rot:
      apply_rot(op.target, op.angles[0], op.angles[1], op.angles[2]);
      return;
    case GateKind::CRX:
      apply_crx(op.control, op.target, op.angles[0]);
      return;
  }
  throw std::invalid_argument("unknown gate kind");
}

void Statevector::run(std::span<const GateOp> ops) {
  for (const GateOp& op : ops) check_op(op);
  for (const GateOp& op : ops) apply(op);
}

double Statevector::z_expectation(int qubit) const {
  check_qubit(qubit);
  const std::size_t mask = std::size_t{1} << qubit;
  double value = 0.0;
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    const double p = std::norm(amps_[i]);
    value += (i & mask) ? -p : p;
  }
  return value;
}

double Statevector::norm() const {
  double s = 0.0;
  for (const c64& a : amps_) s += std::norm(a);
  return std::sqrt(s);
}

}  // namespace qmalsim
