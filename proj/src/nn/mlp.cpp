#include "volfml/nn/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace volfml::nn {

namespace {

double act_value(Activation a, double z) {
    switch (a) {
        case Activation::tanh: return std::tanh(z);
        case Activation::relu: return z > 0.0 ? z : 0.0;
        case Activation::identity: return z;
    }
    return z;
}

// derivative expressed through the activation value where possible
double act_deriv(Activation a, double z, double v) {
    switch (a) {
        case Activation::tanh: return 1.0 - v * v;
        case Activation::relu: return z > 0.0 ? 1.0 : 0.0;
        case Activation::identity: return 1.0;
    }
    return 1.0;
}

double act_second_deriv(Activation a, double /*z*/, double v) {
    switch (a) {
        case Activation::tanh: return -2.0 * v * (1.0 - v * v);
        case Activation::relu: return 0.0;
        case Activation::identity: return 0.0;
    }
    return 0.0;
}

void softmax(std::span<const double> logits, std::vector<double>& probs) {
    probs.resize(logits.size());
    double mx = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (size_t i = 0; i < logits.size(); ++i) {
        probs[i] = std::exp(logits[i] - mx);
        sum += probs[i];
    }
    for (double& p : probs) p /= sum;
}

void check_batch(std::span<const Example> batch, const MlpSpec& spec) {
    if (batch.empty()) throw std::invalid_argument("mlp: empty batch");
    for (const Example& ex : batch) {
        if (static_cast<int>(ex.input.size()) != spec.input_size())
            throw std::invalid_argument("mlp: example input size mismatch");
        if (static_cast<int>(ex.target.size()) != spec.output_size())
            throw std::invalid_argument("mlp: example target size mismatch");
    }
}

// loss value, output cotangent dL/dz_out, and (for hvp) the loss Hessian
// applied to an output tangent
struct LossLocal {
    double value = 0.0;
    std::vector<double> grad;   // dL/dout
    std::vector<double> probs;  // cross-entropy only
};

LossLocal loss_local(LossKind kind, std::span<const double> out,
                     std::span<const double> target) {
    LossLocal l;
    l.grad.resize(out.size());
    switch (kind) {
        case LossKind::squared_error: {
            double s = 0.0;
            for (size_t i = 0; i < out.size(); ++i) {
                double d = out[i] - target[i];
                l.grad[i] = d;
                s += d * d;
            }
            l.value = 0.5 * s;
            break;
        }
        case LossKind::cross_entropy: {
            softmax(out, l.probs);
            double s = 0.0;
            for (size_t i = 0; i < out.size(); ++i) {
                if (target[i] != 0.0) s -= target[i] * std::log(std::max(l.probs[i], 1e-300));
                l.grad[i] = l.probs[i] - target[i];
            }
            l.value = s;
            break;
        }
    }
    return l;
}

// d(dL/dz) in direction dz, i.e. the loss Hessian at the output layer
void loss_grad_tangent(LossKind kind, const LossLocal& l, std::span<const double> dz,
                       std::vector<double>& dgrad) {
    dgrad.resize(dz.size());
    switch (kind) {
        case LossKind::squared_error:
            for (size_t i = 0; i < dz.size(); ++i) dgrad[i] = dz[i];
            break;
        case LossKind::cross_entropy: {
            double dot = 0.0;
            for (size_t i = 0; i < dz.size(); ++i) dot += l.probs[i] * dz[i];
            for (size_t i = 0; i < dz.size(); ++i)
                dgrad[i] = l.probs[i] * dz[i] - l.probs[i] * dot;
            break;
        }
    }
}

}  // namespace

int MlpSpec::param_count() const {
    int count = 0;
    for (int l = 1; l < static_cast<int>(layer_sizes.size()); ++l) {
        count += layer_sizes[l] * layer_sizes[l - 1];
        if (use_bias) count += layer_sizes[l];
    }
    return count;
}

void MlpSpec::validate() const {
    if (layer_sizes.size() < 2)
        throw std::invalid_argument("MlpSpec: need at least input and output layers");
    for (int s : layer_sizes)
        if (s <= 0) throw std::invalid_argument("MlpSpec: layer sizes must be positive");
}

ParamVector init_params(const MlpSpec& spec, Rng& rng) {
    spec.validate();
    ParamVector params;
    params.reserve(spec.param_count());
    for (int l = 1; l <= spec.num_layers(); ++l) {
        int fan_in = spec.layer_sizes[l - 1];
        int n = spec.layer_sizes[l];
        double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (int i = 0; i < n * fan_in; ++i) params.push_back(rng.uniform(-bound, bound));
        if (spec.use_bias)
            for (int i = 0; i < n; ++i) params.push_back(0.0);
    }
    return params;
}

void ensure_finite(std::span<const double> xs, const char* what) {
    for (double x : xs)
        if (!std::isfinite(x)) throw std::runtime_error(std::string(what) + ": non-finite value");
}

const std::vector<double>& forward(const MlpSpec& spec, const ParamVector& params,
                                   std::span<const double> input, ForwardTrace& trace) {
    spec.validate();
    if (static_cast<int>(input.size()) != spec.input_size())
        throw std::invalid_argument("mlp forward: input size mismatch");
    if (static_cast<int>(params.size()) != spec.param_count())
        throw std::invalid_argument("mlp forward: param count mismatch");

    int L = spec.num_layers();
    trace.pre.resize(L);
    trace.act.resize(L + 1);
    trace.act[0].assign(input.begin(), input.end());

    size_t off = 0;
    for (int l = 1; l <= L; ++l) {
        int n_in = spec.layer_sizes[l - 1];
        int n_out = spec.layer_sizes[l];
        const double* W = params.data() + off;
        const double* b = spec.use_bias ? W + static_cast<size_t>(n_out) * n_in : nullptr;
        const std::vector<double>& a_prev = trace.act[l - 1];

        std::vector<double>& z = trace.pre[l - 1];
        z.assign(n_out, 0.0);
        for (int i = 0; i < n_out; ++i) {
            const double* w_row = W + static_cast<size_t>(i) * n_in;
            double s = b ? b[i] : 0.0;
            for (int j = 0; j < n_in; ++j) s += w_row[j] * a_prev[j];
            z[i] = s;
        }

        Activation act = (l == L) ? Activation::identity : spec.activation;
        std::vector<double>& a = trace.act[l];
        a.resize(n_out);
        for (int i = 0; i < n_out; ++i) a[i] = act_value(act, z[i]);

        off += static_cast<size_t>(n_out) * n_in + (spec.use_bias ? n_out : 0);
    }
    return trace.act[L];
}

std::vector<double> forward(const MlpSpec& spec, const ParamVector& params,
                            std::span<const double> input) {
    ForwardTrace trace;
    return forward(spec, params, input, trace);
}

void backward(const MlpSpec& spec, const ParamVector& params, const ForwardTrace& trace,
              std::span<const double> output_grad, std::span<double> param_grad,
              std::vector<double>* input_grad) {
    int L = spec.num_layers();
    if (static_cast<int>(output_grad.size()) != spec.output_size())
        throw std::invalid_argument("mlp backward: output_grad size mismatch");
    bool want_params = !param_grad.empty();
    if (want_params && param_grad.size() != static_cast<size_t>(spec.param_count()))
        throw std::invalid_argument("mlp backward: param_grad size mismatch");

    // offsets of each layer's weight block
    std::vector<size_t> offsets(L + 1, 0);
    for (int l = 1; l <= L; ++l) {
        int n_in = spec.layer_sizes[l - 1], n_out = spec.layer_sizes[l];
        offsets[l] = offsets[l - 1] + static_cast<size_t>(n_out) * n_in +
                     (spec.use_bias ? n_out : 0);
    }

    // delta at the output layer: output activation is identity
    std::vector<double> delta(output_grad.begin(), output_grad.end());
    std::vector<double> delta_prev;

    for (int l = L; l >= 1; --l) {
        int n_in = spec.layer_sizes[l - 1];
        int n_out = spec.layer_sizes[l];
        const double* W = params.data() + offsets[l - 1];
        const std::vector<double>& a_prev = trace.act[l - 1];

        if (want_params) {
            double* gW = param_grad.data() + offsets[l - 1];
            double* gb = spec.use_bias ? gW + static_cast<size_t>(n_out) * n_in : nullptr;
            for (int i = 0; i < n_out; ++i) {
                double d = delta[i];
                double* gw_row = gW + static_cast<size_t>(i) * n_in;
                for (int j = 0; j < n_in; ++j) gw_row[j] += d * a_prev[j];
                if (gb) gb[i] += d;
            }
        }

        if (l > 1 || input_grad) {
            delta_prev.assign(n_in, 0.0);
            for (int i = 0; i < n_out; ++i) {
                double d = delta[i];
                const double* w_row = W + static_cast<size_t>(i) * n_in;
                for (int j = 0; j < n_in; ++j) delta_prev[j] += w_row[j] * d;
            }
            if (l > 1) {
                const std::vector<double>& z = trace.pre[l - 2];
                const std::vector<double>& a = trace.act[l - 1];
                for (int j = 0; j < n_in; ++j)
                    delta_prev[j] *= act_deriv(spec.activation, z[j], a[j]);
            } else {
                *input_grad = delta_prev;
            }
            if (l > 1) delta.swap(delta_prev);
        }
    }
}

double loss_only(const MlpSpec& spec, const ParamVector& params,
                 std::span<const Example> batch, LossKind kind) {
    check_batch(batch, spec);
    ForwardTrace trace;
    double total = 0.0;
    for (const Example& ex : batch) {
        const std::vector<double>& out = forward(spec, params, ex.input, trace);
        total += loss_local(kind, out, ex.target).value;
    }
    return total / static_cast<double>(batch.size());
}

GradResult loss_and_grad(const MlpSpec& spec, const ParamVector& params,
                         std::span<const Example> batch, LossKind kind) {
    check_batch(batch, spec);
    GradResult result;
    result.grad.assign(spec.param_count(), 0.0);
    ForwardTrace trace;
    for (const Example& ex : batch) {
        const std::vector<double>& out = forward(spec, params, ex.input, trace);
        LossLocal l = loss_local(kind, out, ex.target);
        result.loss += l.value;
        backward(spec, params, trace, l.grad, result.grad);
    }
    double inv = 1.0 / static_cast<double>(batch.size());
    result.loss *= inv;
    for (double& g : result.grad) g *= inv;
    ensure_finite(result.grad, "loss_and_grad");
    return result;
}

ParamVector hessian_vector_product(const MlpSpec& spec, const ParamVector& params,
                                   std::span<const Example> batch, LossKind kind,
                                   const ParamVector& v) {
    check_batch(batch, spec);
    if (v.size() != params.size())
        throw std::invalid_argument("hvp: direction length mismatch");

    int L = spec.num_layers();
    std::vector<size_t> offsets(L + 1, 0);
    for (int l = 1; l <= L; ++l) {
        int n_in = spec.layer_sizes[l - 1], n_out = spec.layer_sizes[l];
        offsets[l] = offsets[l - 1] + static_cast<size_t>(n_out) * n_in +
                     (spec.use_bias ? n_out : 0);
    }

    ParamVector hvp(params.size(), 0.0);
    ForwardTrace trace;
    // tangents of activations / pre-activations along v
    std::vector<std::vector<double>> dact(L + 1), dpre(L);
    std::vector<double> delta, ddelta, s, ds, dgrad;

    for (const Example& ex : batch) {
        const std::vector<double>& out = forward(spec, params, ex.input, trace);

        // tangent forward pass
        dact[0].assign(ex.input.size(), 0.0);
        for (int l = 1; l <= L; ++l) {
            int n_in = spec.layer_sizes[l - 1], n_out = spec.layer_sizes[l];
            const double* W = params.data() + offsets[l - 1];
            const double* dW = v.data() + offsets[l - 1];
            const double* db = spec.use_bias ? dW + static_cast<size_t>(n_out) * n_in : nullptr;
            const std::vector<double>& a_prev = trace.act[l - 1];
            const std::vector<double>& da_prev = dact[l - 1];

            dpre[l - 1].assign(n_out, 0.0);
            for (int i = 0; i < n_out; ++i) {
                const double* w_row = W + static_cast<size_t>(i) * n_in;
                const double* dw_row = dW + static_cast<size_t>(i) * n_in;
                double sve = db ? db[i] : 0.0;
                for (int j = 0; j < n_in; ++j)
                    sve += dw_row[j] * a_prev[j] + w_row[j] * da_prev[j];
                dpre[l - 1][i] = sve;
            }
            Activation act = (l == L) ? Activation::identity : spec.activation;
            dact[l].resize(n_out);
            const std::vector<double>& z = trace.pre[l - 1];
            const std::vector<double>& a = trace.act[l];
            for (int i = 0; i < n_out; ++i)
                dact[l][i] = act_deriv(act, z[i], a[i]) * dpre[l - 1][i];
        }

        // reverse pass with tangents
        LossLocal loss = loss_local(kind, out, ex.target);
        loss_grad_tangent(kind, loss, dpre[L - 1], dgrad);
        delta = loss.grad;
        ddelta = dgrad;

        for (int l = L; l >= 1; --l) {
            int n_in = spec.layer_sizes[l - 1], n_out = spec.layer_sizes[l];
            const double* W = params.data() + offsets[l - 1];
            const double* dW = v.data() + offsets[l - 1];
            double* hW = hvp.data() + offsets[l - 1];
            double* hb = spec.use_bias ? hW + static_cast<size_t>(n_out) * n_in : nullptr;
            const std::vector<double>& a_prev = trace.act[l - 1];
            const std::vector<double>& da_prev = dact[l - 1];

            for (int i = 0; i < n_out; ++i) {
                double d = delta[i], dd = ddelta[i];
                double* h_row = hW + static_cast<size_t>(i) * n_in;
                for (int j = 0; j < n_in; ++j) h_row[j] += dd * a_prev[j] + d * da_prev[j];
                if (hb) hb[i] += dd;
            }

            if (l > 1) {
                s.assign(n_in, 0.0);
                ds.assign(n_in, 0.0);
                for (int i = 0; i < n_out; ++i) {
                    double d = delta[i], dd = ddelta[i];
                    const double* w_row = W + static_cast<size_t>(i) * n_in;
                    const double* dw_row = dW + static_cast<size_t>(i) * n_in;
                    for (int j = 0; j < n_in; ++j) {
                        s[j] += w_row[j] * d;
                        ds[j] += dw_row[j] * d + w_row[j] * dd;
                    }
                }
                const std::vector<double>& z = trace.pre[l - 2];
                const std::vector<double>& a = trace.act[l - 1];
                delta.resize(n_in);
                ddelta.resize(n_in);
                for (int j = 0; j < n_in; ++j) {
                    double d1 = act_deriv(spec.activation, z[j], a[j]);
                    double d2 = act_second_deriv(spec.activation, z[j], a[j]);
                    delta[j] = s[j] * d1;
                    ddelta[j] = ds[j] * d1 + s[j] * d2 * dpre[l - 2][j];
                }
            }
        }
    }

    double inv = 1.0 / static_cast<double>(batch.size());
    for (double& h : hvp) h *= inv;
    ensure_finite(hvp, "hessian_vector_product");
    return hvp;
}

int argmax_class(std::span<const double> values) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(values.size()); ++i)
        if (values[i] > values[best]) best = i;
    return best;
}

}  // namespace volfml::nn
