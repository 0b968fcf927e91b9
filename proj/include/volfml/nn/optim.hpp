#pragma once

#include <string>

#include "volfml/nn/mlp.hpp"

namespace volfml::nn {

struct SgdConfig {
    double lr = 0.01;
};

struct AdamConfig {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    ParamVector m;
    ParamVector v;
    long step = 0;
};

// params <- params - lr * grad
void sgd_step(ParamVector& params, const ParamVector& grad, const SgdConfig& cfg);

// Adam with bias correction; state is created lazily on first use.
void adam_step(ParamVector& params, AdamState& state, const ParamVector& grad,
               const AdamConfig& cfg);

// target <- zeta * online + (1 - zeta) * target, returned as a new vector
ParamVector soft_blend(const ParamVector& target, const ParamVector& online, double zeta);

}  // namespace volfml::nn
