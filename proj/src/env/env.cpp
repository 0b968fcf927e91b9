#include "volfml/env/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace volfml::env {

std::vector<double> encode_state(const std::vector<double>& gains,
                                 const std::vector<double>& tlw_values,
                                 const StateEncoding& enc) {
    auto squash = [](double x, double lo, double hi) {
        double t = (x - lo) / (hi - lo);
        return std::clamp(t, 0.0, 1.0);
    };
    std::vector<double> encoded;
    encoded.reserve(gains.size() + tlw_values.size());
    for (double g : gains) {
        if (!(g > 0.0)) throw std::invalid_argument("encode_state: gains must be positive");
        encoded.push_back(squash(std::log10(g), enc.gain_log10_min, enc.gain_log10_max));
    }
    for (double e : tlw_values) encoded.push_back(squash(e, enc.tlw_min, enc.tlw_max));
    return encoded;
}

Environment::Environment(EnvParams params)
    : params_(std::move(params)), fading_rng_(params_.fading_seed) {
    size_t n = params_.profiles.size();
    if (n == 0) throw std::invalid_argument("Environment: no devices");
    if (params_.tasks.devices.size() != n)
        throw std::invalid_argument("Environment: tasks/profiles size mismatch");
    params_.model_spec.validate();
    if (params_.initial_model.size() != static_cast<size_t>(params_.model_spec.param_count()))
        throw std::invalid_argument("Environment: initial model size mismatch");
    params_.hyper.validate();

    reqs_.reserve(n);
    for (const auto& p : params_.profiles) reqs_.push_back(p.req);
    // reject nonpositive TLW denominators up front
    for (const auto& r : reqs_) metrics::tlw_req_factor(r, params_.tlw_params);

    reset();
}

std::vector<double> Environment::current_tlw() const {
    if (params_.equal_weight_tlw)
        return std::vector<double>(profiles().size(), 1.0 / static_cast<double>(n_devices()));
    return metrics::tlw(aou_, reqs_, params_.tlw_params);
}

void Environment::refresh_state() {
    state_.slot = slot_;
    state_.gains = snapshot_.gains;
    state_.tlw = current_tlw();
    state_.encoded = encode_state(state_.gains, state_.tlw, params_.encoding);
}

EnvState Environment::reset() {
    slot_ = 0;
    global_model_ = params_.initial_model;
    aou_ = metrics::initial_aou(n_devices());
    snapshot_ = radio::draw_channels(params_.profiles, params_.channel, fading_rng_);
    refresh_state();
    return state_;
}

RoundDecision Environment::clamp_decision(const RoundDecision& raw) const {
    size_t n = params_.profiles.size();
    if (raw.mask.size() != n || raw.power.size() != n || raw.freq.size() != n)
        throw std::invalid_argument("clamp_decision: decision length mismatch");
    RoundDecision d = raw;
    for (size_t i = 0; i < n; ++i) {
        d.mask[i] = d.mask[i] ? 1 : 0;
        double p = std::isfinite(d.power[i]) ? d.power[i] : 0.0;
        double f = std::isfinite(d.freq[i]) ? d.freq[i] : 0.0;
        d.power[i] = std::clamp(p, 0.0, params_.profiles[i].p_max_w);
        d.freq[i] = std::clamp(f, 0.0, params_.profiles[i].f_max_hz);
    }
    return d;
}

StepOutcome Environment::step(const RoundDecision& raw) {
    StepOutcome out;
    out.executed = clamp_decision(raw);
    const RoundDecision& decision = out.executed;
    int n = n_devices();

    std::vector<double> rates = params_.scheme == Scheme::noma
                                    ? radio::noma_rates(snapshot_, decision)
                                    : radio::oma_rates(snapshot_, decision);
    out.costs = radio::round_costs(params_.profiles, snapshot_, decision, rates);
    out.vols.assign(n, metrics::VolBreakdown{});
    out.accuracies.assign(n, 0.0);

    std::vector<int> aou_mask(n, 0);
    if (out.costs.feasible) {
        // run the FML round for the scheduled devices
        std::vector<nn::ParamVector> locals;
        std::vector<int> scheduled;
        for (int i = 0; i < n; ++i) {
            if (!decision.mask[i]) continue;
            scheduled.push_back(i);
            locals.push_back(fml::local_round(params_.model_spec, params_.loss,
                                              params_.tasks.devices[i], global_model_,
                                              params_.hyper));
        }
        for (size_t k = 0; k < scheduled.size(); ++k) {
            int i = scheduled[k];
            out.accuracies[i] = fml::evaluate_accuracy(params_.model_spec, locals[k],
                                                       params_.tasks.devices[i].test);
            out.vols[i] = metrics::vol_breakdown(out.accuracies[i], out.costs.round_time_s,
                                                 out.costs.energy_j[i], reqs_[i], params_.etas);
        }
        global_model_ = fml::aggregate(locals, global_model_);
        out.objective = metrics::objective(state_.tlw, decision.mask, out.vols, params_.etas);
        out.reward = std::max(out.objective, 0.0);
        aou_mask = decision.mask;
        out.feasible = true;
    } else {
        // a scheduled device cannot compute or transmit: the round aborts,
        // nothing aggregates, and the slot earns nothing
        out.objective = 0.0;
        out.reward = 0.0;
        out.feasible = false;
    }

    aou_ = metrics::update_aou(aou_, aou_mask);
    snapshot_ = radio::draw_channels(params_.profiles, params_.channel, fading_rng_);
    slot_ += 1;
    refresh_state();
    out.next_state = state_;
    return out;
}

double Environment::mean_adapted_accuracy() const {
    double total = 0.0;
    for (int i = 0; i < n_devices(); ++i) {
        nn::ParamVector adapted =
            fml::adapt_full_batch(params_.model_spec, params_.loss, params_.tasks.devices[i],
                                  global_model_, params_.hyper.alpha);
        total += fml::evaluate_accuracy(params_.model_spec, adapted,
                                        params_.tasks.devices[i].test);
    }
    return total / n_devices();
}

double Environment::mean_unadapted_accuracy() const {
    double total = 0.0;
    for (int i = 0; i < n_devices(); ++i)
        total += fml::evaluate_accuracy(params_.model_spec, global_model_,
                                        params_.tasks.devices[i].test);
    return total / n_devices();
}

double Environment::reward_upper_bound() const {
    double total = 0.0;
    for (double eps : state_.tlw) total += eps * params_.etas.eta1;
    return total;
}

}  // namespace volfml::env
