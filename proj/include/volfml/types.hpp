#pragma once

#include <vector>

namespace volfml {

// Hybrid action for one round: scheduling mask plus per-device transmit
// power (W) and CPU frequency (Hz). Box constraints are enforced by the
// environment's clamp before execution.
struct RoundDecision {
    std::vector<int> mask;      // 0/1 per device
    std::vector<double> power;  // [0, p_max_n]
    std::vector<double> freq;   // [0, f_max_n]
};

}  // namespace volfml
