#pragma once

#include <memory>

#include "volfml/agents/agent.hpp"
#include "volfml/nn/mlp.hpp"
#include "volfml/nn/optim.hpp"
#include "volfml/rng.hpp"

namespace volfml::agents {

struct PdqnConfig {
    int n_devices = 10;
    int state_dim = 20;
    std::vector<int> actor_hidden{128, 128};
    std::vector<int> critic_hidden{128, 128};
    double actor_lr = 1e-4;
    double critic_lr = 3e-4;
    double kappa = 0.8;   // discount
    double zeta = 0.01;   // soft-update rate
    int buffer_capacity = 10000;
    int batch_size = 64;
    bool full_buffer_gate = false;  // wait for a full buffer before learning
    double noise_start = 0.2;
    double noise_end = 0.02;
    OptimKind optim = OptimKind::adam;
    uint64_t seed = 1;

    void validate() const;
};

// Hybrid-action agent: a parameterized actor proposes the continuous
// (power, frequency) vector, a Q-network with one head per scheduling mask
// picks the discrete action by argmax. The actor emits one shared continuous
// vector used by every mask.
class PdqnAgent : public Agent {
public:
    PdqnAgent(PdqnConfig cfg, std::vector<radio::DeviceProfile> profiles);

    AgentAction select(const std::vector<double>& state, bool explore) override;
    void observe(const Transition& t) override;
    UpdateDiagnostics update() override;
    void begin_episode(int episode, int total_episodes) override;
    bool params_finite() const override;

    void save_checkpoint(std::ostream& os) const override;
    void load_checkpoint(std::istream& is) override;

    // one gradient step on an explicit batch; targets optionally held fixed
    UpdateDiagnostics update_on_batch(std::span<const Transition> batch, bool update_targets);

    // actor output after the tanh squash, no noise
    std::vector<double> policy(const std::vector<double>& state) const;
    // all K mask values of the online Q-network
    std::vector<double> q_values(const std::vector<double>& state,
                                 const std::vector<double>& cont) const;

    int num_masks() const { return 1 << cfg_.n_devices; }
    double noise_scale() const { return noise_scale_; }
    const ReplayBuffer& buffer() const { return buffer_; }

    nn::ParamVector& actor_params() { return theta_; }
    nn::ParamVector& q_params() { return phi_; }
    const nn::ParamVector& actor_target_params() const { return theta_target_; }
    const nn::ParamVector& q_target_params() const { return phi_target_; }
    const nn::MlpSpec& q_spec() const { return q_spec_; }

private:
    void optimizer_step(nn::ParamVector& params, nn::AdamState& state,
                        const nn::ParamVector& grad, double lr);

    PdqnConfig cfg_;
    std::vector<radio::DeviceProfile> profiles_;
    nn::MlpSpec actor_spec_;
    nn::MlpSpec q_spec_;
    nn::ParamVector theta_, phi_, theta_target_, phi_target_;
    nn::AdamState actor_opt_, q_opt_;
    ReplayBuffer buffer_;
    Rng rng_;
    double noise_scale_;
};

// Gradient of L(theta) = -mean_m Q via the chain through the actor's tanh
// squash: dqda arrives already differentiated w.r.t. the squashed action.
nn::ParamVector actor_gradient_from_dqda(const nn::MlpSpec& actor_spec,
                                         const nn::ParamVector& theta,
                                         std::span<const std::vector<double>> states,
                                         std::span<const std::vector<double>> dqda);

}  // namespace volfml::agents
