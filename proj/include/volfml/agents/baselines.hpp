#pragma once

#include "volfml/agents/agent.hpp"
#include "volfml/rng.hpp"

namespace volfml::agents {

// Random resource allocation: uniform mask, uniform power in [0, p_max],
// uniform frequency in (0, f_max].
class RraAgent : public Agent {
public:
    RraAgent(std::vector<radio::DeviceProfile> profiles, uint64_t seed);
    AgentAction select(const std::vector<double>& state, bool explore) override;

private:
    std::vector<radio::DeviceProfile> profiles_;
    Rng rng_;
};

// Equal-weight rotation: a window of window_size consecutive device ids
// advancing one device per round, mid-range power and frequency.
class EwAgent : public Agent {
public:
    EwAgent(std::vector<radio::DeviceProfile> profiles, int window_size);
    AgentAction select(const std::vector<double>& state, bool explore) override;
    RoundDecision decision_for_round(int round) const;

private:
    std::vector<radio::DeviceProfile> profiles_;
    int window_size_;
    int round_ = 0;
};

}  // namespace volfml::agents
