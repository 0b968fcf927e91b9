#include "volfml/agents/ddpg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "checkpoint_io.hpp"

namespace volfml::agents {

namespace {

std::vector<int> layers(int in, const std::vector<int>& hidden, int out) {
    std::vector<int> sizes;
    sizes.push_back(in);
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(out);
    return sizes;
}

void squash(std::vector<double>& raw) {
    for (double& x : raw) x = std::tanh(x);
}

}  // namespace

void DdpgConfig::validate() const {
    if (n_devices < 1) throw std::invalid_argument("DdpgConfig: bad device count");
    if (!(kappa >= 0.0 && kappa < 1.0)) throw std::invalid_argument("DdpgConfig: kappa in [0,1)");
    if (!(zeta > 0.0 && zeta <= 1.0)) throw std::invalid_argument("DdpgConfig: zeta in (0,1]");
    if (batch_size < 1 || buffer_capacity < batch_size)
        throw std::invalid_argument("DdpgConfig: buffer must hold at least one batch");
}

DdpgAgent::DdpgAgent(DdpgConfig cfg, std::vector<radio::DeviceProfile> profiles)
    : cfg_(cfg),
      profiles_(std::move(profiles)),
      actor_spec_{layers(cfg.state_dim, cfg.actor_hidden, 3 * cfg.n_devices),
                  nn::Activation::tanh},
      critic_spec_{layers(cfg.state_dim + 3 * cfg.n_devices, cfg.critic_hidden, 1),
                   nn::Activation::tanh},
      buffer_(static_cast<size_t>(cfg.buffer_capacity)),
      rng_(cfg.seed),
      noise_scale_(cfg.noise_start) {
    cfg_.validate();
    if (static_cast<int>(profiles_.size()) != cfg_.n_devices)
        throw std::invalid_argument("DdpgAgent: profiles/device count mismatch");
    theta_ = nn::init_params(actor_spec_, rng_);
    phi_ = nn::init_params(critic_spec_, rng_);
    theta_target_ = theta_;
    phi_target_ = phi_;
}

std::vector<double> DdpgAgent::policy(const std::vector<double>& state) const {
    std::vector<double> a = nn::forward(actor_spec_, theta_, state);
    squash(a);
    return a;
}

RoundDecision DdpgAgent::decision_from_cont(std::span<const double> cont) const {
    int n = cfg_.n_devices;
    if (static_cast<int>(cont.size()) != 3 * n)
        throw std::invalid_argument("decision_from_cont: expected 3N components");
    RoundDecision d;
    d.mask.resize(n);
    d.power.resize(n);
    d.freq.resize(n);
    for (int i = 0; i < n; ++i) {
        d.mask[i] = (cont[i] + 1.0) * 0.5 >= 0.5 ? 1 : 0;  // round at threshold
        d.power[i] = denormalize(cont[n + i], profiles_[i].p_max_w);
        d.freq[i] = denormalize(cont[2 * n + i], profiles_[i].f_max_hz);
    }
    return d;
}

AgentAction DdpgAgent::select(const std::vector<double>& state, bool explore) {
    AgentAction action;
    action.cont = policy(state);
    if (explore && noise_scale_ > 0.0) {
        for (double& x : action.cont)
            x = std::clamp(x + noise_scale_ * rng_.normal(), -1.0, 1.0);
    }
    action.decision = decision_from_cont(action.cont);
    action.disc = index_from_mask(action.decision.mask);
    return action;
}

void DdpgAgent::observe(const Transition& t) { buffer_.push(t); }

void DdpgAgent::begin_episode(int episode, int total_episodes) {
    double half = std::max(1.0, total_episodes / 2.0);
    double progress = std::min(1.0, episode / half);
    noise_scale_ = cfg_.noise_start + (cfg_.noise_end - cfg_.noise_start) * progress;
}

void DdpgAgent::optimizer_step(nn::ParamVector& params, nn::AdamState& state,
                               const nn::ParamVector& grad, double lr) {
    if (lr == 0.0) return;  // frozen network
    if (cfg_.optim == OptimKind::adam) {
        nn::adam_step(params, state, grad, nn::AdamConfig{lr});
    } else {
        nn::sgd_step(params, grad, nn::SgdConfig{lr});
    }
}

UpdateDiagnostics DdpgAgent::update() {
    size_t gate = cfg_.full_buffer_gate ? static_cast<size_t>(cfg_.buffer_capacity)
                                        : static_cast<size_t>(cfg_.batch_size);
    if (buffer_.size() < gate) return {};
    std::vector<size_t> idx = buffer_.sample_indices(rng_, cfg_.batch_size);
    double inv_m = 1.0 / static_cast<double>(idx.size());

    nn::ParamVector critic_grad(phi_.size(), 0.0);
    nn::ForwardTrace trace;
    std::vector<double> input;
    double q_loss = 0.0;
    for (size_t i : idx) {
        const Transition& t = buffer_.at(i);
        double y;
        if (t.terminal) {
            y = td_target(t.reward, true, 0.0, cfg_.kappa);
        } else {
            std::vector<double> next_a = nn::forward(actor_spec_, theta_target_, t.next_state);
            squash(next_a);
            input.assign(t.next_state.begin(), t.next_state.end());
            input.insert(input.end(), next_a.begin(), next_a.end());
            double next_q = nn::forward(critic_spec_, phi_target_, input, trace)[0];
            y = td_target(t.reward, false, next_q, cfg_.kappa);
        }
        input.assign(t.state.begin(), t.state.end());
        input.insert(input.end(), t.cont.begin(), t.cont.end());
        double q = nn::forward(critic_spec_, phi_, input, trace)[0];
        double err = q - y;
        q_loss += err * err * inv_m;
        double out_grad[1] = {2.0 * err * inv_m};
        nn::backward(critic_spec_, phi_, trace, out_grad, critic_grad);
    }
    optimizer_step(phi_, critic_opt_, critic_grad, cfg_.critic_lr);

    // actor ascends the critic
    std::vector<std::vector<double>> states, dqda;
    std::vector<double> input_grad;
    for (size_t i : idx) {
        const Transition& t = buffer_.at(i);
        std::vector<double> a = nn::forward(actor_spec_, theta_, t.state);
        squash(a);
        input.assign(t.state.begin(), t.state.end());
        input.insert(input.end(), a.begin(), a.end());
        nn::forward(critic_spec_, phi_, input, trace);
        double out_grad[1] = {1.0};
        nn::backward(critic_spec_, phi_, trace, out_grad, {}, &input_grad);
        states.push_back(t.state);
        dqda.emplace_back(input_grad.begin() + cfg_.state_dim, input_grad.end());
    }
    nn::ParamVector actor_grad = actor_gradient_from_dqda(actor_spec_, theta_, states, dqda);
    optimizer_step(theta_, actor_opt_, actor_grad, cfg_.actor_lr);

    theta_target_ = nn::soft_blend(theta_target_, theta_, cfg_.zeta);
    phi_target_ = nn::soft_blend(phi_target_, phi_, cfg_.zeta);

    UpdateDiagnostics diag;
    diag.updated = true;
    diag.q_loss = q_loss;
    return diag;
}

bool DdpgAgent::params_finite() const {
    for (const nn::ParamVector* v : {&theta_, &phi_, &theta_target_, &phi_target_})
        for (double x : *v)
            if (!std::isfinite(x)) return false;
    return true;
}

void DdpgAgent::save_checkpoint(std::ostream& os) const {
    os << "volfml-ddpg-ckpt 1\n";
    os << cfg_.n_devices << " " << cfg_.state_dim << "\n";
    ckpt::write_vec(os, theta_);
    ckpt::write_vec(os, phi_);
    ckpt::write_vec(os, theta_target_);
    ckpt::write_vec(os, phi_target_);
    ckpt::write_adam(os, actor_opt_);
    ckpt::write_adam(os, critic_opt_);
    os << std::setprecision(17) << noise_scale_ << "\n";
    os << rng_.save_state() << "\n";
    ckpt::write_buffer(os, buffer_);
}

void DdpgAgent::load_checkpoint(std::istream& is) {
    std::string magic;
    int version, n_devices, state_dim;
    is >> magic >> version >> n_devices >> state_dim;
    if (magic != "volfml-ddpg-ckpt" || version != 1)
        throw std::runtime_error("ddpg checkpoint: unsupported format");
    if (n_devices != cfg_.n_devices || state_dim != cfg_.state_dim)
        throw std::runtime_error("ddpg checkpoint: dimension mismatch");
    theta_ = ckpt::read_vec(is);
    phi_ = ckpt::read_vec(is);
    theta_target_ = ckpt::read_vec(is);
    phi_target_ = ckpt::read_vec(is);
    actor_opt_ = ckpt::read_adam(is);
    critic_opt_ = ckpt::read_adam(is);
    is >> noise_scale_;
    std::string rng_state;
    is >> std::ws;
    std::getline(is, rng_state);
    rng_.load_state(rng_state);
    buffer_ = ReplayBuffer(static_cast<size_t>(cfg_.buffer_capacity));
    ckpt::read_buffer(is, buffer_);
    if (!is) throw std::runtime_error("ddpg checkpoint: truncated");
}

}  // namespace volfml::agents
