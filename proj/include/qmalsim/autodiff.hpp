#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "qmalsim/circuits.hpp"

namespace qmalsim {

// d(expectations)/d(params), row-major (n_outputs x n_params).
struct Jacobian {
  std::size_t n_outputs = 0;
  std::size_t n_params = 0;
  std::vector<double> values;

  double at(std::size_t out, std::size_t param) const {
    return values[out * n_params + param];
  }
  double& at(std::size_t out, std::size_t param) {
    return values[out * n_params + param];
  }
};

using CircuitEval = std::function<std::vector<double>(std::span<const double>)>;

// Parameter-shift gradient of eval's outputs w.r.t. params[index].
// TwoTerm (single-axis rotation angles): [f(t+pi/2) - f(t-pi/2)] / 2.
// FourTerm (controlled rotation angles):
//   c+ * [f(t+pi/2) - f(t-pi/2)] - c- * [f(t+3pi/2) - f(t-3pi/2)]
//   with c+ = (sqrt2+1)/(4 sqrt2), c- = (sqrt2-1)/(4 sqrt2).
std::vector<double> shift_grad_single(const CircuitEval& eval,
                                      std::span<const double> base,
                                      std::size_t index, ShiftRule rule);

// Parameter-shift jacobian of quantum_forward. Shift rules come from the
// parameter layout. When eval_count is given it is incremented by the number
// of circuit evaluations (2 per two-term, 4 per four-term parameter).
Jacobian quantum_jacobian(const Architecture& arch, std::span<const double> x,
                          const ParameterVector& params,
                          std::size_t* eval_count = nullptr);

// Central finite differences [f(t+h) - f(t-h)] / (2h); the test oracle and
// the FINITE_DIFF training path. h must be in [1e-7, 1e-3].
Jacobian fd_jacobian(const Architecture& arch, std::span<const double> x,
                     const ParameterVector& params, double h);

// Chain rule into the quantum parameters: transpose(jac) * upstream.
std::vector<double> hybrid_backward(const Jacobian& jac,
                                    std::span<const double> upstream);

// Circuit evaluations one quantum_jacobian call performs.
std::size_t jacobian_eval_count(const Architecture& arch);

}  // namespace qmalsim
