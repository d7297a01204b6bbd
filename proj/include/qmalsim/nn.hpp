#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace qmalsim {

// Classical head: logits = W * z + b, W row-major (n_classes x n_inputs).
struct LinearHead {
  int n_classes = 0;
  int n_inputs = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  double weight(int cls, int input) const { return weights[static_cast<std::size_t>(cls) * n_inputs + input]; }
  double& weight(int cls, int input) { return weights[static_cast<std::size_t>(cls) * n_inputs + input]; }
};

LinearHead make_head(int n_classes, int n_inputs);  // zero-initialized

// Log-softmax of W*z + b, computed with max subtraction. Entries are <= 0
// and exp-sum to 1 within 1e-12.
std::vector<double> head_forward(std::span<const double> z, const LinearHead& head);

// Mean over the batch of -logp[row][label].
double nll_loss(const std::vector<std::vector<double>>& logp,
                std::span<const int> labels);

struct HeadGradients {
  std::vector<double> d_weights;               // same shape as head.weights
  std::vector<double> d_bias;                  // n_classes
  std::vector<std::vector<double>> d_inputs;   // per row, n_inputs each
};

// Gradients of nll_loss(head_forward(z_i), labels) w.r.t. W, b and each z_i:
// dlogits_i = (softmax(logits_i) - onehot(label_i)) / batch.
HeadGradients head_backward(const std::vector<std::vector<double>>& z,
                            const LinearHead& head, std::span<const int> labels);

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t t = 0;
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

AdamState make_adam(std::size_t n_params, double lr);

// Standard Adam update with bias correction. Throws on a non-finite gradient,
// naming the parameter index.
void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState& state);

}  // namespace qmalsim
