#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "volfml/agents/replay.hpp"
#include "volfml/radio/model.hpp"
#include "volfml/types.hpp"

namespace volfml::agents {

enum class OptimKind { adam, sgd };

struct AgentAction {
    std::vector<double> cont;  // normalized continuous action as stored in the buffer
    int disc = 0;              // scheduling-mask index
    RoundDecision decision;
};

struct UpdateDiagnostics {
    bool updated = false;
    double q_loss = 0.0;
};

class Agent {
public:
    virtual ~Agent() = default;

    virtual AgentAction select(const std::vector<double>& state, bool explore) = 0;
    virtual void observe(const Transition&) {}
    virtual UpdateDiagnostics update() { return {}; }

    // called at the start of each episode; learning agents reset/decay their
    // exploration noise here
    virtual void begin_episode(int /*episode*/, int /*total_episodes*/) {}

    virtual bool params_finite() const { return true; }
    virtual void save_checkpoint(std::ostream&) const {}
    virtual void load_checkpoint(std::istream&) {}
};

// scheduling-mask index <-> bit vector (device n is bit n)
std::vector<int> mask_from_index(int index, int n_devices);
int index_from_mask(std::span<const int> mask);

// map a normalized value in [-1, 1] onto [0, cap]
double denormalize(double u, double cap);

// assemble a decision from a mask and a normalized (p_1..p_N, f_1..f_N) vector
RoundDecision assemble_decision(const std::vector<int>& mask, std::span<const double> cont,
                                std::span<const radio::DeviceProfile> profiles);

// TD target y = r + kappa * max_next_q, or r on terminal transitions
double td_target(double reward, bool terminal, double max_next_q, double kappa);

}  // namespace volfml::agents
