#pragma once

#include "volfml/agents/agent.hpp"
#include "volfml/agents/pdqn.hpp"
#include "volfml/nn/mlp.hpp"
#include "volfml/nn/optim.hpp"
#include "volfml/rng.hpp"

namespace volfml::agents {

struct DdpgConfig {
    int n_devices = 10;
    int state_dim = 20;
    std::vector<int> actor_hidden{128, 128};
    std::vector<int> critic_hidden{128, 128};
    double actor_lr = 1e-4;
    double critic_lr = 3e-4;
    double kappa = 0.8;
    double zeta = 0.01;
    int buffer_capacity = 10000;
    int batch_size = 64;
    bool full_buffer_gate = false;
    double noise_start = 0.2;
    double noise_end = 0.02;
    OptimKind optim = OptimKind::adam;
    uint64_t seed = 1;

    void validate() const;
};

// Fully continuous actor-critic baseline over a 3N action vector; the N
// scheduling components are rounded at 0.5 (after mapping to [0,1]) to
// produce the discrete mask.
class DdpgAgent : public Agent {
public:
    DdpgAgent(DdpgConfig cfg, std::vector<radio::DeviceProfile> profiles);

    AgentAction select(const std::vector<double>& state, bool explore) override;
    void observe(const Transition& t) override;
    UpdateDiagnostics update() override;
    void begin_episode(int episode, int total_episodes) override;
    bool params_finite() const override;

    void save_checkpoint(std::ostream& os) const override;
    void load_checkpoint(std::istream& is) override;

    std::vector<double> policy(const std::vector<double>& state) const;
    double noise_scale() const { return noise_scale_; }

    // decision assembly from a normalized 3N vector (z block, p block, f block)
    RoundDecision decision_from_cont(std::span<const double> cont) const;

private:
    void optimizer_step(nn::ParamVector& params, nn::AdamState& state,
                        const nn::ParamVector& grad, double lr);

    DdpgConfig cfg_;
    std::vector<radio::DeviceProfile> profiles_;
    nn::MlpSpec actor_spec_;
    nn::MlpSpec critic_spec_;
    nn::ParamVector theta_, phi_, theta_target_, phi_target_;
    nn::AdamState actor_opt_, critic_opt_;
    ReplayBuffer buffer_;
    Rng rng_;
    double noise_scale_;
};

}  // namespace volfml::agents
