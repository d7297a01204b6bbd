#include "qmalsim/autodiff.hpp"

#include <cmath>
#include <stdexcept>

namespace qmalsim {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
const double kSqrt2 = std::sqrt(2.0);
const double kFourTermPlus = (kSqrt2 + 1.0) / (4.0 * kSqrt2);
const double kFourTermMinus = (kSqrt2 - 1.0) / (4.0 * kSqrt2);

std::vector<double> eval_shifted(const CircuitEval& eval, std::vector<double>& work,
                                 std::size_t index, double base, double shift) {
  work[index] = base + shift;
  return eval(work);
}

void axpy(std::vector<double>& acc, double scale, const std::vector<double>& v) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += scale * v[i];
}

}  // namespace

std::vector<double> shift_grad_single(const CircuitEval& eval,
                                      std::span<const double> base,
                                      std::size_t index, ShiftRule rule) {
  if (index >= base.size()) {
    throw std::out_of_range("parameter index " + std::to_string(index) +
                            " out of range");
  }
  std::vector<double> work(base.begin(), base.end());
  const double theta = base[index];
  if (rule == ShiftRule::TwoTerm) {
    std::vector<double> grad = eval_shifted(eval, work, index, theta, kPi / 2.0);
    axpy(grad, -1.0, eval_shifted(eval, work, index, theta, -kPi / 2.0));
    for (double& g : grad) g *= 0.5;
    return grad;
  }
  std::vector<double> plus = eval_shifted(eval, work, index, theta, kPi / 2.0);
  axpy(plus, -1.0, eval_shifted(eval, work, index, theta, -kPi / 2.0));
  std::vector<double> wide = eval_shifted(eval, work, index, theta, 3.0 * kPi / 2.0);
  axpy(wide, -1.0, eval_shifted(eval, work, index, theta, -3.0 * kPi / 2.0));
  std::vector<double> grad(plus.size(), 0.0);
  axpy(grad, kFourTermPlus, plus);
  axpy(grad, -kFourTermMinus, wide);
  return grad;
}

Jacobian quantum_jacobian(const Architecture& arch, std::span<const double> x,
                          const ParameterVector& params, std::size_t* eval_count) {
  ParameterVector scratch = params;
  const CircuitEval eval = [&](std::span<const double> values) {
    scratch.values.assign(values.begin(), values.end());
    if (eval_count) ++*eval_count;
    return quantum_forward(arch, x, scratch);
  };
  Jacobian jac;
  jac.n_outputs = static_cast<std::size_t>(arch.measured_count());
  jac.n_params = params.size();
  jac.values.assign(jac.n_outputs * jac.n_params, 0.0);
  for (std::size_t j = 0; j < jac.n_params; ++j) {
    const std::vector<double> column =
        shift_grad_single(eval, params.values, j, params.rule_at(j));
    for (std::size_t i = 0; i < jac.n_outputs; ++i) jac.at(i, j) = column[i];
  }
  return jac;
}

Jacobian fd_jacobian(const Architecture& arch, std::span<const double> x,
                     const ParameterVector& params, double h) {
  if (!(h >= 1e-7 && h <= 1e-3)) {
    throw std::invalid_argument("finite-difference step must be in [1e-7, 1e-3]");
  }
  ParameterVector scratch = params;
  Jacobian jac;
  jac.n_outputs = static_cast<std::size_t>(arch.measured_count());
  jac.n_params = params.size();
  jac.values.assign(jac.n_outputs * jac.n_params, 0.0);
  for (std::size_t j = 0; j < jac.n_params; ++j) {
    scratch.values = params.values;
    scratch.values[j] = params.values[j] + h;
    const std::vector<double> fwd = quantum_forward(arch, x, scratch);
    scratch.values[j] = params.values[j] - h;
    const std::vector<double> bwd = quantum_forward(arch, x, scratch);
    for (std::size_t i = 0; i < jac.n_outputs; ++i) {
      jac.at(i, j) = (fwd[i] - bwd[i]) / (2.0 * h);
    }
  }
  return jac;
}

std::vector<double> hybrid_backward(const Jacobian& jac,
                                    std::span<const double> upstream) {
  if (upstream.size() != jac.n_outputs) {
    throw std::invalid_argument("upstream length " + std::to_string(upstream.size()) +
                                " does not match jacobian outputs " +
                                std::to_string(jac.n_outputs));
  }
  std::vector<double> grad(jac.n_params, 0.0);
  for (std::size_t i = 0; i < jac.n_outputs; ++i) {
    for (std::size_t j = 0; j < jac.n_params; ++j) {
      grad[j] += jac.at(i, j) * upstream[i];
    }
  }
  return grad;
}

std::size_t jacobian_eval_count(const Architecture& arch) {
  const ParameterVector pv = make_parameter_vector(arch);
  std::size_t count = 0;
  for (const ParamSegment& seg : pv.layout) {
    count += seg.length * (seg.rule == ShiftRule::TwoTerm ? 2 : 4);
  }
  return count;
}

}  // namespace qmalsim
