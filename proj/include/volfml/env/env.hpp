#pragma once

#include <vector>

#include "volfml/fml/engine.hpp"
#include "volfml/fml/task.hpp"
#include "volfml/metrics/vol.hpp"
#include "volfml/radio/model.hpp"
#include "volfml/rng.hpp"
#include "volfml/types.hpp"

namespace volfml::env {

enum class Scheme { noma, oma };

// min-max bounds used to squash gains (log10) and TLWs into [0,1]
struct StateEncoding {
    double gain_log10_min = -16.0;
    double gain_log10_max = -2.0;
    double tlw_min = 0.0;
    double tlw_max = 3.0;
};

std::vector<double> encode_state(const std::vector<double>& gains,
                                 const std::vector<double>& tlw_values,
                                 const StateEncoding& enc);

struct EnvState {
    int slot = 0;
    std::vector<double> gains;
    std::vector<double> tlw;
    std::vector<double> encoded;  // length 2N: gains then TLWs, id ascending
};

struct StepOutcome {
    double reward = 0.0;  // max(objective, 0)
    double objective = 0.0;
    bool feasible = true;
    EnvState next_state;
    RoundDecision executed;  // after clamping
    radio::CostReport costs;
    std::vector<metrics::VolBreakdown> vols;
    std::vector<double> accuracies;  // fine-tuned local accuracy, scheduled only
};

struct EnvParams {
    std::vector<radio::DeviceProfile> profiles;
    fml::TaskFamily tasks;
    nn::MlpSpec model_spec;
    nn::LossKind loss = nn::LossKind::cross_entropy;
    fml::MetaHyper hyper;
    metrics::TlwParams tlw_params;
    metrics::Etas etas;
    radio::ChannelModel channel;
    Scheme scheme = Scheme::noma;
    StateEncoding encoding;
    nn::ParamVector initial_model;
    uint64_t fading_seed = 1;
    bool equal_weight_tlw = false;  // EW mode: eps_n = 1/N for every device
};

// One environment step = one global FML round = one MDP time slot. Channels
// redraw every slot; the FML model persists across slots and resets with the
// episode. The fading stream runs on across episodes.
class Environment {
public:
    explicit Environment(EnvParams params);

    int n_devices() const { return static_cast<int>(params_.profiles.size()); }
    int state_dim() const { return 2 * n_devices(); }

    EnvState reset();
    StepOutcome step(const RoundDecision& raw);

    // projection onto the box constraints; the step contract
    RoundDecision clamp_decision(const RoundDecision& raw) const;

    // mean over all devices of one-full-batch-step adapted test accuracy;
    // deterministic, does not advance any stream
    double mean_adapted_accuracy() const;
    double mean_unadapted_accuracy() const;

    const nn::ParamVector& global_model() const { return global_model_; }
    const std::vector<radio::DeviceProfile>& profiles() const { return params_.profiles; }
    const EnvState& state() const { return state_; }
    // upper bound on any reward given current TLWs: sum_n eps_n * eta1
    double reward_upper_bound() const;

private:
    std::vector<double> current_tlw() const;
    void refresh_state();

    EnvParams params_;
    Rng fading_rng_;
    nn::ParamVector global_model_;
    metrics::AouState aou_;
    radio::ChannelSnapshot snapshot_;
    EnvState state_;
    std::vector<radio::TaskRequirements> reqs_;
    int slot_ = 0;
};

}  // namespace volfml::env
