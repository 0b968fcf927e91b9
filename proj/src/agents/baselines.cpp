#include "volfml/agents/baselines.hpp"

#include <stdexcept>

namespace volfml::agents {

RraAgent::RraAgent(std::vector<radio::DeviceProfile> profiles, uint64_t seed)
    : profiles_(std::move(profiles)), rng_(seed) {
    if (profiles_.empty()) throw std::invalid_argument("RraAgent: no devices");
}

AgentAction RraAgent::select(const std::vector<double>&, bool) {
    size_t n = profiles_.size();
    AgentAction action;
    action.decision.mask.resize(n);
    action.decision.power.resize(n);
    action.decision.freq.resize(n);
    for (size_t i = 0; i < n; ++i) {
        action.decision.mask[i] = rng_.bernoulli(0.5) ? 1 : 0;
        action.decision.power[i] = rng_.uniform(0.0, profiles_[i].p_max_w);
        action.decision.freq[i] = rng_.uniform_pos() * profiles_[i].f_max_hz;
    }
    action.disc = index_from_mask(action.decision.mask);
    return action;
}

EwAgent::EwAgent(std::vector<radio::DeviceProfile> profiles, int window_size)
    : profiles_(std::move(profiles)), window_size_(window_size) {
    if (profiles_.empty()) throw std::invalid_argument("EwAgent: no devices");
    if (window_size_ < 1 || window_size_ > static_cast<int>(profiles_.size()))
        throw std::invalid_argument("EwAgent: window must be in [1, N]");
}

RoundDecision EwAgent::decision_for_round(int round) const {
    int n = static_cast<int>(profiles_.size());
    RoundDecision d;
    d.mask.assign(n, 0);
    d.power.resize(n);
    d.freq.resize(n);
    for (int k = 0; k < window_size_; ++k) d.mask[(round + k) % n] = 1;
    for (int i = 0; i < n; ++i) {
        d.power[i] = 0.5 * profiles_[i].p_max_w;
        d.freq[i] = 0.5 * profiles_[i].f_max_hz;
    }
    return d;
}

AgentAction EwAgent::select(const std::vector<double>&, bool) {
    AgentAction action;
    action.decision = decision_for_round(round_);
    action.disc = index_from_mask(action.decision.mask);
    round_ += 1;
    return action;
}

}  // namespace volfml::agents
