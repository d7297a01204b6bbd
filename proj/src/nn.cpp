#include "qmalsim/nn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qmalsim {

LinearHead make_head(int n_classes, int n_inputs) {
  if (n_classes < 1 || n_inputs < 1) {
    throw std::invalid_argument("head dimensions must be positive");
  }
  LinearHead head;
  head.n_classes = n_classes;
  head.n_inputs = n_inputs;
  head.weights.assign(static_cast<std::size_t>(n_classes) * n_inputs, 0.0);
  head.bias.assign(n_classes, 0.0);
  return head;
}

std::vector<double> head_forward(std::span<const double> z, const LinearHead& head) {
  if (z.size() != static_cast<std::size_t>(head.n_inputs)) {
    throw std::invalid_argument("head input length " + std::to_string(z.size()) +
                                " does not match n_inputs " +
                                std::to_string(head.n_inputs));
  }
  std::vector<double> logits(head.n_classes);
  for (int c = 0; c < head.n_classes; ++c) {
    double acc = head.bias[c];
    for (int i = 0; i < head.n_inputs; ++i) acc += head.weight(c, i) * z[i];
    logits[c] = acc;
  }
  const double max_logit = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double l : logits) sum += std::exp(l - max_logit);
  const double log_sum = max_logit + std::log(sum);
  for (double& l : logits) l -= log_sum;
  return logits;
}

double nll_loss(const std::vector<std::vector<double>>& logp,
                std::span<const int> labels) {
  if (logp.empty() || logp.size() != labels.size()) {
    throw std::invalid_argument("log-probability rows and labels must match and be non-empty");
  }
  double total = 0.0;
  for (std::size_t row = 0; row < logp.size(); ++row) {
    const int label = labels[row];
    if (label < 0 || static_cast<std::size_t>(label) >= logp[row].size()) {
      throw std::out_of_range("label " + std::to_string(label) + " out of range at row " +
                              std::to_string(row));
    }
    total -= logp[row][static_cast<std::size_t>(label)];
  }
  return total / static_cast<double>(logp.size());
}

HeadGradients head_backward(const std::vector<std::vector<double>>& z,
                            const LinearHead& head, std::span<const int> labels) {
  if (z.empty() || z.size() != labels.size()) {
    throw std::invalid_argument("batch rows and labels must match and be non-empty");
  }
  HeadGradients g;
  g.d_weights.assign(head.weights.size(), 0.0);
  g.d_bias.assign(head.bias.size(), 0.0);
  g.d_inputs.resize(z.size());
  const double inv_batch = 1.0 / static_cast<double>(z.size());
  for (std::size_t row = 0; row < z.size(); ++row) {
    const std::vector<double> logp = head_forward(z[row], head);
    const int label = labels[row];
    if (label < 0 || label >= head.n_classes) {
      throw std::out_of_range("label " + std::to_string(label) + " out of range at row " +
                              std::to_string(row));
    }
    std::vector<double> dlogits(head.n_classes);
    for (int c = 0; c < head.n_classes; ++c) {
      dlogits[c] = (std::exp(logp[c]) - (c == label ? 1.0 : 0.0)) * inv_batch;
    }
    for (int c = 0; c < head.n_classes; ++c) {
      g.d_bias[c] += dlogits[c];
      for (int i = 0; i < head.n_inputs; ++i) {
        g.d_weights[static_cast<std::size_t>(c) * head.n_inputs + i] += dlogits[c] * z[row][i];
      }
    }
    std::vector<double> dz(head.n_inputs, 0.0);
    for (int c = 0; c < head.n_classes; ++c) {
      for (int i = 0; i < head.n_inputs; ++i) {
        dz[i] += head.weight(c, i) * dlogits[c];
      }
    }
    g.d_inputs[row] = std::move(dz);
  }
  return g;
}

AdamState make_adam(std::size_t n_params, double lr) {
  if (lr <= 0.0) throw std::invalid_argument("learning rate must be positive");
  AdamState state;
  state.m.assign(n_params, 0.0);
  state.v.assign(n_params, 0.0);
  state.lr = lr;
  return state;
}

void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw std::invalid_argument("adam_step length mismatch");
  }
  state.t += 1;
  const double m_corr = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double v_corr = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    if (!std::isfinite(g)) {
      throw std::runtime_error("non-finite gradient at parameter " + std::to_string(i));
    }
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
    const double m_hat = state.m[i] / m_corr;
    const double v_hat = state.v[i] / v_corr;
    params[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
  }
}

}  // namespace qmalsim
