#include "volfml/agents/pdqn.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
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

void PdqnConfig::validate() const {
    if (n_devices < 1 || n_devices > 12)
        throw std::invalid_argument("PdqnConfig: flat mask encoding supports 1..12 devices");
    if (state_dim < 1) throw std::invalid_argument("PdqnConfig: bad state_dim");
    if (!(kappa >= 0.0 && kappa < 1.0)) throw std::invalid_argument("PdqnConfig: kappa in [0,1)");
    if (!(zeta > 0.0 && zeta <= 1.0)) throw std::invalid_argument("PdqnConfig: zeta in (0,1]");
    if (batch_size < 1 || buffer_capacity < batch_size)
        throw std::invalid_argument("PdqnConfig: buffer must hold at least one batch");
    if (noise_start < 0.0 || noise_end < 0.0)
        throw std::invalid_argument("PdqnConfig: noise scales must be >= 0");
}

PdqnAgent::PdqnAgent(PdqnConfig cfg, std::vector<radio::DeviceProfile> profiles)
    : cfg_(cfg),
      profiles_(std::move(profiles)),
      actor_spec_{layers(cfg.state_dim, cfg.actor_hidden, 2 * cfg.n_devices),
                  nn::Activation::tanh},
      q_spec_{layers(cfg.state_dim + 2 * cfg.n_devices, cfg.critic_hidden, 1 << cfg.n_devices),
              nn::Activation::tanh},
      buffer_(static_cast<size_t>(cfg.buffer_capacity)),
      rng_(cfg.seed),
      noise_scale_(cfg.noise_start) {
    cfg_.validate();
    if (static_cast<int>(profiles_.size()) != cfg_.n_devices)
        throw std::invalid_argument("PdqnAgent: profiles/device count mismatch");
    theta_ = nn::init_params(actor_spec_, rng_);
    phi_ = nn::init_params(q_spec_, rng_);
    theta_target_ = theta_;
    phi_target_ = phi_;
}

std::vector<double> PdqnAgent::policy(const std::vector<double>& state) const {
    std::vector<double> a = nn::forward(actor_spec_, theta_, state);
    squash(a);
    return a;
}

std::vector<double> PdqnAgent::q_values(const std::vector<double>& state,
                                        const std::vector<double>& cont) const {
    std::vector<double> input(state);
    input.insert(input.end(), cont.begin(), cont.end());
    return nn::forward(q_spec_, phi_, input);
}

AgentAction PdqnAgent::select(const std::vector<double>& state, bool explore) {
    AgentAction action;
    action.cont = policy(state);
    if (explore && noise_scale_ > 0.0) {
        for (double& x : action.cont)
            x = std::clamp(x + noise_scale_ * rng_.normal(), -1.0, 1.0);
    }
    action.disc = nn::argmax_class(q_values(state, action.cont));
    action.decision = assemble_decision(mask_from_index(action.disc, cfg_.n_devices),
                                        action.cont, profiles_);
    return action;
}

void PdqnAgent::observe(const Transition& t) { buffer_.push(t); }

void PdqnAgent::begin_episode(int episode, int total_episodes) {
    double half = std::max(1.0, total_episodes / 2.0);
    double progress = std::min(1.0, episode / half);
    noise_scale_ = cfg_.noise_start + (cfg_.noise_end - cfg_.noise_start) * progress;
}

void PdqnAgent::optimizer_step(nn::ParamVector& params, nn::AdamState& state,
                               const nn::ParamVector& grad, double lr) {
    if (lr == 0.0) return;  // frozen network
    if (cfg_.optim == OptimKind::adam) {
        nn::adam_step(params, state, grad, nn::AdamConfig{lr});
    } else {
        nn::sgd_step(params, grad, nn::SgdConfig{lr});
    }
}

UpdateDiagnostics PdqnAgent::update() {
    size_t gate = cfg_.full_buffer_gate ? static_cast<size_t>(cfg_.buffer_capacity)
                                        : static_cast<size_t>(cfg_.batch_size);
    if (buffer_.size() < gate) return {};
    std::vector<size_t> idx = buffer_.sample_indices(rng_, cfg_.batch_size);
    std::vector<Transition> batch;
    batch.reserve(idx.size());
    for (size_t i : idx) batch.push_back(buffer_.at(i));
    return update_on_batch(batch, true);
}

UpdateDiagnostics PdqnAgent::update_on_batch(std::span<const Transition> batch,
                                             bool update_targets) {
    if (batch.empty()) return {};
    size_t m_count = batch.size();
    double inv_m = 1.0 / static_cast<double>(m_count);

    // Q-network step on the mean squared TD error
    nn::ParamVector q_grad(phi_.size(), 0.0);
    nn::ForwardTrace trace;
    std::vector<double> input;
    std::vector<double> out_grad(q_spec_.output_size(), 0.0);
    double q_loss = 0.0;
    for (const Transition& t : batch) {
        double y;
        if (t.terminal) {
            y = td_target(t.reward, true, 0.0, cfg_.kappa);
        } else {
            std::vector<double> next_a = nn::forward(actor_spec_, theta_target_, t.next_state);
            squash(next_a);
            input.assign(t.next_state.begin(), t.next_state.end());
            input.insert(input.end(), next_a.begin(), next_a.end());
            const std::vector<double>& next_q = nn::forward(q_spec_, phi_target_, input, trace);
            double max_q = *std::max_element(next_q.begin(), next_q.end());
            y = td_target(t.reward, false, max_q, cfg_.kappa);
        }

        input.assign(t.state.begin(), t.state.end());
        input.insert(input.end(), t.cont.begin(), t.cont.end());
        const std::vector<double>& q = nn::forward(q_spec_, phi_, input, trace);
        double err = q[t.disc] - y;
        q_loss += err * err * inv_m;
        out_grad[t.disc] = 2.0 * err * inv_m;
        nn::backward(q_spec_, phi_, trace, out_grad, q_grad);
        out_grad[t.disc] = 0.0;
    }
    optimizer_step(phi_, q_opt_, q_grad, cfg_.critic_lr);

    // actor step: ascend Q along dQ/dA^p at the stored discrete action
    std::vector<std::vector<double>> states, dqda;
    states.reserve(m_count);
    dqda.reserve(m_count);
    std::vector<double> input_grad;
    for (const Transition& t : batch) {
        std::vector<double> a = nn::forward(actor_spec_, theta_, t.state);
        squash(a);
        input.assign(t.state.begin(), t.state.end());
        input.insert(input.end(), a.begin(), a.end());
        nn::forward(q_spec_, phi_, input, trace);
        out_grad[t.disc] = 1.0;
        nn::backward(q_spec_, phi_, trace, out_grad, {}, &input_grad);
        out_grad[t.disc] = 0.0;
        states.push_back(t.state);
        dqda.emplace_back(input_grad.begin() + cfg_.state_dim, input_grad.end());
    }
    nn::ParamVector actor_grad = actor_gradient_from_dqda(actor_spec_, theta_, states, dqda);
    optimizer_step(theta_, actor_opt_, actor_grad, cfg_.actor_lr);

    if (update_targets) {
        theta_target_ = nn::soft_blend(theta_target_, theta_, cfg_.zeta);
        phi_target_ = nn::soft_blend(phi_target_, phi_, cfg_.zeta);
    }

    UpdateDiagnostics diag;
    diag.updated = true;
    diag.q_loss = q_loss;
    return diag;
}

nn::ParamVector actor_gradient_from_dqda(const nn::MlpSpec& actor_spec,
                                         const nn::ParamVector& theta,
                                         std::span<const std::vector<double>> states,
                                         std::span<const std::vector<double>> dqda) {
    if (states.size() != dqda.size())
        throw std::invalid_argument("actor_gradient_from_dqda: batch size mismatch");
    nn::ParamVector grad(theta.size(), 0.0);
    nn::ForwardTrace trace;
    std::vector<double> out_grad;
    double inv_m = -1.0 / static_cast<double>(states.size());  // minimize -Q
    for (size_t m = 0; m < states.size(); ++m) {
        const std::vector<double>& raw = nn::forward(actor_spec, theta, states[m], trace);
        out_grad.resize(raw.size());
        for (size_t i = 0; i < raw.size(); ++i) {
            double a = std::tanh(raw[i]);
            out_grad[i] = inv_m * dqda[m][i] * (1.0 - a * a);
        }
        nn::backward(actor_spec, theta, trace, out_grad, grad);
    }
    return grad;
}

bool PdqnAgent::params_finite() const {
    for (const nn::ParamVector* v : {&theta_, &phi_, &theta_target_, &phi_target_})
        for (double x : *v)
            if (!std::isfinite(x)) return false;
    return true;
}

void PdqnAgent::save_checkpoint(std::ostream& os) const {
    os << "volfml-pdqn-ckpt 1\n";
    os << cfg_.n_devices << " " << cfg_.state_dim << "\n";
    ckpt::write_vec(os, theta_);
    ckpt::write_vec(os, phi_);
    ckpt::write_vec(os, theta_target_);
    ckpt::write_vec(os, phi_target_);
    ckpt::write_adam(os, actor_opt_);
    ckpt::write_adam(os, q_opt_);
    os << std::setprecision(17) << noise_scale_ << "\n";
    os << rng_.save_state() << "\n";
    ckpt::write_buffer(os, buffer_);
}

void PdqnAgent::load_checkpoint(std::istream& is) {
    std::string magic;
    int version, n_devices, state_dim;
    is >> magic >> version >> n_devices >> state_dim;
    if (magic != "volfml-pdqn-ckpt" || version != 1)
        throw std::runtime_error("pdqn checkpoint: unsupported format");
    if (n_devices != cfg_.n_devices || state_dim != cfg_.state_dim)
        throw std::runtime_error("pdqn checkpoint: dimension mismatch");
    theta_ = ckpt::read_vec(is);
    phi_ = ckpt::read_vec(is);
    theta_target_ = ckpt::read_vec(is);
    phi_target_ = ckpt::read_vec(is);
    actor_opt_ = ckpt::read_adam(is);
    q_opt_ = ckpt::read_adam(is);
    is >> noise_scale_;
    std::string rng_state;
    is >> std::ws;
    std::getline(is, rng_state);
    rng_.load_state(rng_state);
    buffer_ = ReplayBuffer(static_cast<size_t>(cfg_.buffer_capacity));
    ckpt::read_buffer(is, buffer_);
    if (!is) throw std::runtime_error("pdqn checkpoint: truncated");
}

}  // namespace volfml::agents
