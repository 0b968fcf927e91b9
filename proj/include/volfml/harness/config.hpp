#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "volfml/agents/agent.hpp"
#include "volfml/env/env.hpp"
#include "volfml/fml/engine.hpp"
#include "volfml/fml/task.hpp"
#include "volfml/metrics/vol.hpp"
#include "volfml/radio/model.hpp"

namespace volfml::harness {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericAbort : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class AgentKind { pdqn, ddpg, rra, ew };
enum class TlwMode { tlw, equal_weight };

struct RangeSpec {
    double lo = 0.0;
    double hi = 0.0;
};

// Full experiment description. Defaults reproduce the reference setup:
// 10 devices in a 500 m square, Table-style physics, synthetic non-IID
// classification tasks, PDQN over NOMA.
struct ExperimentConfig {
    uint64_t seed = 1;

    // run
    AgentKind agent = AgentKind::pdqn;
    env::Scheme scheme = env::Scheme::noma;
    TlwMode tlw_mode = TlwMode::tlw;
    int episodes = 500;
    int slots_per_episode = 20;
    int checkpoint_every = 50;  // episodes; 0 disables
    bool trace_probe = true;    // log the adapted-accuracy probe each slot

    // topology
    int n_devices = 10;
    double area_side_m = 500.0;

    // physics
    radio::ChannelModel channel;  // bandwidth, noise density, path loss, fading
    double p_max_w = 0.1;
    double f_max_hz = 1e10;
    double cycles_per_sample = 1e7;
    double model_bits = 1e6;
    double capacitance_half = 1e-28;

    // per-device task requirement draws
    RangeSpec acc_req{0.7, 1.0};
    RangeSpec t_max_s{0.1, 10.0};
    RangeSpec e_max_j{0.01, 1.0};

    // synthetic data
    fml::SyntheticTaskConfig data;
    double noniid_degree = 1.0;

    // fml
    fml::MetaHyper hyper;
    std::vector<int> fml_hidden{16};
    nn::Activation fml_activation = nn::Activation::tanh;

    // metrics
    metrics::TlwParams tlw_params;
    metrics::Etas etas;

    // state encoding
    env::StateEncoding encoding;

    // agent hyperparameters (shared by pdqn and ddpg)
    std::vector<int> actor_hidden{128, 128};
    std::vector<int> critic_hidden{128, 128};
    double actor_lr = 1e-4;
    double critic_lr = 3e-4;
    double kappa = 0.8;
    double zeta = 0.01;
    int buffer_capacity = 10000;
    int batch_size = 64;
    double noise_start = 0.2;
    double noise_end = 0.02;
    bool full_buffer_gate = false;
    agents::OptimKind optim = agents::OptimKind::adam;
    int ew_window = 5;

    void validate() const;  // throws ConfigError

    nn::MlpSpec fml_model_spec() const;

    // hash over everything that defines the environment (not the agent,
    // scheme, weighting mode or seed); guards cross-physics comparisons
    uint64_t physics_hash() const;
    // hash over the complete configuration
    uint64_t config_hash() const;

    std::string to_json() const;  // resolved config, pretty-printed
};

ExperimentConfig default_config();
ExperimentConfig config_from_json_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

std::string agent_name(AgentKind k);
std::string scheme_name(env::Scheme s);
std::string tlw_mode_name(TlwMode m);
AgentKind agent_from_name(const std::string& s);
env::Scheme scheme_from_name(const std::string& s);
TlwMode tlw_mode_from_name(const std::string& s);

}  // namespace volfml::harness
