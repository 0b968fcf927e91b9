#include "volfml/nn/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace volfml::nn {

namespace {

void check_step(const ParamVector& params, const ParamVector& grad, double lr) {
    if (grad.size() != params.size())
        throw std::invalid_argument("optimizer: grad/param length mismatch");
    if (!(lr > 0.0)) throw std::invalid_argument("optimizer: learning rate must be > 0");
    for (double g : grad)
        if (!std::isfinite(g)) throw std::invalid_argument("optimizer: non-finite gradient");
}

}  // namespace

void sgd_step(ParamVector& params, const ParamVector& grad, const SgdConfig& cfg) {
    check_step(params, grad, cfg.lr);
    for (size_t i = 0; i < params.size(); ++i) params[i] -= cfg.lr * grad[i];
}

void adam_step(ParamVector& params, AdamState& state, const ParamVector& grad,
               const AdamConfig& cfg) {
    check_step(params, grad, cfg.lr);
    if (state.m.empty()) {
        state.m.assign(params.size(), 0.0);
        state.v.assign(params.size(), 0.0);
        state.step = 0;
    }
    if (state.m.size() != params.size())
        throw std::invalid_argument("adam: state/param length mismatch");

    state.step += 1;
    double b1t = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    double b2t = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (size_t i = 0; i < params.size(); ++i) {
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grad[i];
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
        double m_hat = state.m[i] / b1t;
        double v_hat = state.v[i] / b2t;
        params[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
    }
}

ParamVector soft_blend(const ParamVector& target, const ParamVector& online, double zeta) {
    if (target.size() != online.size())
        throw std::invalid_argument("soft_blend: length mismatch");
    if (!(zeta >= 0.0 && zeta <= 1.0))
        throw std::invalid_argument("soft_blend: zeta must be in [0, 1]");
    ParamVector out(target.size());
    for (size_t i = 0; i < target.size(); ++i)
        out[i] = zeta * online[i] + (1.0 - zeta) * target[i];
    return out;
}

}  // namespace volfml::nn
