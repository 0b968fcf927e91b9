#pragma once

#include <span>

#include "volfml/fml/task.hpp"
#include "volfml/nn/mlp.hpp"

namespace volfml::fml {

using nn::GradResult;
using nn::LossKind;
using nn::MlpSpec;
using nn::ParamVector;

struct MetaHyper {
    double alpha = 0.2;  // inner (fine-tuning) learning rate
    double beta = 0.2;    // meta-learning rate
    int sgd_steps = 1;    // meta-SGD steps per round
    int batch_size = 16;

    void validate() const;
};

// Estimated meta-function gradient: the inner gradient at the adapted point
// corrected by the curvature term, computed as g_inner - alpha * H(w) g_inner
// with three independently sampled batches. The returned loss is the
// adapted-point batch loss (the meta-loss estimate).
GradResult meta_gradient(const MlpSpec& spec, LossKind kind, TaskDataset& device,
                         const ParamVector& model, const MetaHyper& hyper);

// sgd_steps meta-gradient descent steps with rate beta
ParamVector local_round(const MlpSpec& spec, LossKind kind, TaskDataset& device,
                        const ParamVector& start, const MetaHyper& hyper);

// Elementwise mean of the scheduled devices' models; an empty list keeps the
// previous global model (a round with no participants is a no-op).
ParamVector aggregate(std::span<const ParamVector> models, const ParamVector& previous_global);

// Fraction of test examples whose argmax prediction matches the argmax label;
// ties resolve to the lowest class index.
double evaluate_accuracy(const MlpSpec& spec, const ParamVector& model,
                         std::span<const Example> test);

// One inner adaptation step on the full training set (deterministic).
ParamVector adapt_full_batch(const MlpSpec& spec, LossKind kind, const TaskDataset& device,
                             const ParamVector& model, double alpha);

}  // namespace volfml::fml
