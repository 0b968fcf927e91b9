#pragma once

#include <span>
#include <string>
#include <vector>

#include "volfml/rng.hpp"

namespace volfml::nn {

// Flat parameter container shared by the meta-learning models and the RL
// networks. Layout: per layer, row-major weight matrix followed by bias.
using ParamVector = std::vector<double>;

enum class Activation { tanh, relu, identity };

// Fixed feed-forward architecture. Hidden layers use `activation`; the
// output layer is always identity (losses apply their own link).
struct MlpSpec {
    std::vector<int> layer_sizes;  // at least {in, out}
    Activation activation = Activation::tanh;
    bool use_bias = true;

    int input_size() const { return layer_sizes.front(); }
    int output_size() const { return layer_sizes.back(); }
    int num_layers() const { return static_cast<int>(layer_sizes.size()) - 1; }
    int param_count() const;
    void validate() const;  // throws std::invalid_argument
};

// weights in [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases zero
ParamVector init_params(const MlpSpec& spec, Rng& rng);

// Per-layer pre-activations and activations kept for backprop.
// act[0] is the input; act[l] / pre[l-1] belong to layer l.
struct ForwardTrace {
    std::vector<std::vector<double>> pre;
    std::vector<std::vector<double>> act;
};

std::vector<double> forward(const MlpSpec& spec, const ParamVector& params,
                            std::span<const double> input);
const std::vector<double>& forward(const MlpSpec& spec, const ParamVector& params,
                                   std::span<const double> input, ForwardTrace& trace);

// Reverse pass from an output cotangent. param_grad is accumulated (+=) and
// must hold param_count() zeroed-or-partial entries; pass an empty span to
// skip parameter gradients. input_grad is optional.
void backward(const MlpSpec& spec, const ParamVector& params, const ForwardTrace& trace,
              std::span<const double> output_grad, std::span<double> param_grad,
              std::vector<double>* input_grad = nullptr);

enum class LossKind {
    squared_error,  // 0.5 * sum_i (out_i - target_i)^2
    cross_entropy,  // softmax cross-entropy; target is a distribution
};

struct Example {
    std::vector<double> input;
    std::vector<double> target;
};

struct GradResult {
    double loss = 0.0;
    ParamVector grad;
};

double loss_only(const MlpSpec& spec, const ParamVector& params,
                 std::span<const Example> batch, LossKind kind);

// Batch-mean loss and gradient.
GradResult loss_and_grad(const MlpSpec& spec, const ParamVector& params,
                         std::span<const Example> batch, LossKind kind);

// Exact Hessian-vector product of the batch-mean loss, computed by a tangent
// (forward-over-reverse) pass. The Hessian itself is never materialized.
ParamVector hessian_vector_product(const MlpSpec& spec, const ParamVector& params,
                                   std::span<const Example> batch, LossKind kind,
                                   const ParamVector& v);

// argmax over logits, ties broken by lowest index
int argmax_class(std::span<const double> values);

void ensure_finite(std::span<const double> xs, const char* what);

}  // namespace volfml::nn
