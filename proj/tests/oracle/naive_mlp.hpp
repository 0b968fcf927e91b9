#pragma once

#include <algorithm>
#include <vector>

#include "volfml/nn/mlp.hpp"

// Deliberately naive re-implementation of the MLP forward pass and losses,
// templated on the scalar type. Used as an independent trace for checking
// the production forward/gradient/HVP code: plain loops, no shared code.
namespace oracle {

using volfml::nn::Activation;
using volfml::nn::Example;
using volfml::nn::LossKind;
using volfml::nn::MlpSpec;

using std::exp;
using std::log;
using std::tanh;

inline double relu(double z) { return z > 0.0 ? z : 0.0; }

template <typename T>
T naive_act(Activation a, const T& z) {
    switch (a) {
        case Activation::tanh: return tanh(z);
        case Activation::relu: return relu(z);
        case Activation::identity: return z;
    }
    return z;
}

template <typename T>
std::vector<T> naive_forward(const MlpSpec& spec, const std::vector<T>& params,
                             const std::vector<double>& input) {
    std::vector<T> a(input.begin(), input.end());
    size_t off = 0;
    int L = spec.num_layers();
    for (int l = 1; l <= L; ++l) {
        int n_in = spec.layer_sizes[l - 1];
        int n_out = spec.layer_sizes[l];
        std::vector<T> next(n_out);
        for (int i = 0; i < n_out; ++i) {
            T s = spec.use_bias ? params[off + static_cast<size_t>(n_out) * n_in + i] : T(0.0);
            for (int j = 0; j < n_in; ++j)
                s = s + params[off + static_cast<size_t>(i) * n_in + j] * a[j];
            next[i] = (l == L) ? s : naive_act(spec.activation, s);
        }
        a = std::move(next);
        off += static_cast<size_t>(n_out) * n_in + (spec.use_bias ? n_out : 0);
    }
    return a;
}

template <typename T>
T naive_sample_loss(const MlpSpec& spec, const std::vector<T>& params, const Example& ex,
                    LossKind kind) {
    std::vector<T> out = naive_forward(spec, params, ex.input);
    if (kind == LossKind::squared_error) {
        T s(0.0);
        for (size_t i = 0; i < out.size(); ++i) {
            T d = out[i] - T(ex.target[i]);
            s = s + d * d;
        }
        return T(0.5) * s;
    }
    // softmax cross-entropy via log-sum-exp
    T sum(0.0);
    for (const T& o : out) sum = sum + exp(o);
    T lse = log(sum);
    T s(0.0);
    for (size_t i = 0; i < out.size(); ++i)
        if (ex.target[i] != 0.0) s = s - T(ex.target[i]) * (out[i] - lse);
    return s;
}

template <typename T>
T naive_batch_loss(const MlpSpec& spec, const std::vector<T>& params,
                   const std::vector<Example>& batch, LossKind kind) {
    T total(0.0);
    for (const Example& ex : batch) total = total + naive_sample_loss(spec, params, ex, kind);
    return total * T(1.0 / static_cast<double>(batch.size()));
}

}  // namespace oracle
