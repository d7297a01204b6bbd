#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qmalsim {

using c64 = std::complex<double>;

// Resource guard for dense simulation (2^24 amplitudes = 256 MiB).
inline constexpr int kMaxQubits = 24;

enum class Axis { X, Y, Z };

enum class GateKind { RX, RY, RZ, Rot, CRX };

// One gate in a circuit description. Angles are radians; single-angle kinds
// use angles[0], Rot uses (phi, theta, omega). control is -1 except for CRX.
struct GateOp {
  GateKind kind;
  int target;
  int control = -1;
  std::array<double, 3> angles{};

  static GateOp rx(int qubit, double theta) { return {GateKind::RX, qubit, -1, {theta, 0, 0}}; }
  static GateOp ry(int qubit, double theta) { return {GateKind::RY, qubit, -1, {theta, 0, 0}}; }
  static GateOp rz(int qubit, double theta) { return {GateKind::RZ, qubit, -1, {theta, 0, 0}}; }
  static GateOp rot(int qubit, double phi, double theta, double omega) {
    return {GateKind::Rot, qubit, -1, {phi, theta, omega}};
  }
  static GateOp crx(int control, int target, double theta) {
    return {GateKind::CRX, target, control, {theta, 0, 0}};
  }
};

// Dense statevector of an n-qubit register. Qubit 0 is the least-significant
// bit of the basis-state index (little-endian) throughout the project.
class Statevector {
 public:
  // |00...0>. Throws for n_qubits outside [1, kMaxQubits].
  explicit Statevector(int n_qubits);

  // Adopts the given amplitudes; length must be 2^n_qubits and the L2 norm
  // must be 1 within 1e-12.
  Statevector(int n_qubits, std::vector<c64> amplitudes);

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return amps_.size(); }
  const std::vector<c64>& amplitudes() const { return amps_; }

  // exp(-i*theta*P/2) on one qubit, P in {X, Y, Z}.
  void apply_rotation(Axis axis, int qubit, double theta);

  // Rot(phi, theta, omega) = RZ(omega) * RY(theta) * RZ(phi).
  void apply_rot(int qubit, double phi, double theta, double omega);

  // RX(theta) on target where the control bit is 1.
  void apply_crx(int control, int target, double theta);

  void apply(const GateOp& op);

  // Applies ops in sequence order. Every op is validated up front, so an
  // invalid op list leaves the state untouched.
  void run(std::span<const GateOp> ops);

  // <Z_qubit> = P(bit 0) - P(bit 1), in [-1, 1].
  double z_expectation(int qubit) const;

  double norm() const;

 private:
  void apply_1q(int qubit, c64 u00, c64 u01, c64 u10, c64 u11);
  void apply_controlled_1q(int control, int target, c64 u00, c64 u01, c64 u10, c64 u11);
  void check_qubit(int qubit) const;
  void check_op(const GateOp& op) const;

  int n_qubits_;
  std::vector<c64> amps_;
};

}  // namespace qmalsim
