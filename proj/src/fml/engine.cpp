#include "volfml/fml/engine.hpp"

#include <stdexcept>

namespace volfml::fml {

void MetaHyper::validate() const {
    if (!(alpha >= 0.0)) throw std::invalid_argument("MetaHyper: alpha must be >= 0");
    if (!(beta >= 0.0)) throw std::invalid_argument("MetaHyper: beta must be >= 0");
    if (sgd_steps < 1) throw std::invalid_argument("MetaHyper: sgd_steps must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("MetaHyper: batch_size must be >= 1");
}

GradResult meta_gradient(const MlpSpec& spec, LossKind kind, TaskDataset& device,
                         const ParamVector& model, const MetaHyper& hyper) {
    hyper.validate();
    std::vector<Example> batch_a = device.sample_batch(hyper.batch_size);

    // adapted point: w - alpha * grad(w, D~)
    GradResult at_model = nn::loss_and_grad(spec, model, batch_a, kind);
    ParamVector adapted(model.size());
    for (size_t i = 0; i < model.size(); ++i)
        adapted[i] = model[i] - hyper.alpha * at_model.grad[i];

    std::vector<Example> batch_b = device.sample_batch(hyper.batch_size);
    GradResult inner = nn::loss_and_grad(spec, adapted, batch_b, kind);

    GradResult result;
    result.loss = inner.loss;
    if (hyper.alpha == 0.0) {
        result.grad = std::move(inner.grad);
        return result;
    }

    // curvature correction without materializing the Hessian
    std::vector<Example> batch_c = device.sample_batch(hyper.batch_size);
    ParamVector hv = nn::hessian_vector_product(spec, model, batch_c, kind, inner.grad);
    result.grad.resize(model.size());
    for (size_t i = 0; i < model.size(); ++i)
        result.grad[i] = inner.grad[i] - hyper.alpha * hv[i];
    nn::ensure_finite(result.grad, "meta_gradient");
    return result;
}

ParamVector local_round(const MlpSpec& spec, LossKind kind, TaskDataset& device,
                        const ParamVector& start, const MetaHyper& hyper) {
    hyper.validate();
    ParamVector model = start;
    for (int k = 0; k < hyper.sgd_steps; ++k) {
        GradResult g = meta_gradient(spec, kind, device, model, hyper);
        for (size_t i = 0; i < model.size(); ++i) model[i] -= hyper.beta * g.grad[i];
    }
    return model;
}

ParamVector aggregate(std::span<const ParamVector> models, const ParamVector& previous_global) {
    if (models.empty()) return previous_global;
    size_t d = models.front().size();
    for (const ParamVector& m : models)
        if (m.size() != d) throw std::invalid_argument("aggregate: dimension mismatch");
    ParamVector mean(d, 0.0);
    for (const ParamVector& m : models)
        for (size_t i = 0; i < d; ++i) mean[i] += m[i];
    double inv = 1.0 / static_cast<double>(models.size());
    for (double& x : mean) x *= inv;
    return mean;
}

double evaluate_accuracy(const MlpSpec& spec, const ParamVector& model,
                         std::span<const Example> test) {
    if (test.empty()) throw std::invalid_argument("evaluate_accuracy: empty test set");
    int correct = 0;
    nn::ForwardTrace trace;
    for (const Example& ex : test) {
        const std::vector<double>& out = nn::forward(spec, model, ex.input, trace);
        if (nn::argmax_class(out) == nn::argmax_class(ex.target)) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(test.size());
}

ParamVector adapt_full_batch(const MlpSpec& spec, LossKind kind, const TaskDataset& device,
                             const ParamVector& model, double alpha) {
    GradResult g = nn::loss_and_grad(spec, model, device.train, kind);
    ParamVector adapted(model.size());
    for (size_t i = 0; i < model.size(); ++i) adapted[i] = model[i] - alpha * g.grad[i];
    return adapted;
}

}  // namespace volfml::fml
