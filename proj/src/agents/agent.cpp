#include "volfml/agents/agent.hpp"

#include <stdexcept>

namespace volfml::agents {

std::vector<int> mask_from_index(int index, int n_devices) {
    if (n_devices < 1 || n_devices > 30)
        throw std::invalid_argument("mask_from_index: unsupported device count");
    if (index < 0 || index >= (1 << n_devices))
        throw std::invalid_argument("mask_from_index: index out of range");
    std::vector<int> mask(n_devices);
    for (int n = 0; n < n_devices; ++n) mask[n] = (index >> n) & 1;
    return mask;
}

int index_from_mask(std::span<const int> mask) {
    int index = 0;
    for (size_t n = 0; n < mask.size(); ++n)
        if (mask[n]) index |= 1 << n;
    return index;
}

double denormalize(double u, double cap) { return (u + 1.0) * 0.5 * cap; }

RoundDecision assemble_decision(const std::vector<int>& mask, std::span<const double> cont,
                                std::span<const radio::DeviceProfile> profiles) {
    size_t n = profiles.size();
    if (mask.size() != n || cont.size() != 2 * n)
        throw std::invalid_argument("assemble_decision: length mismatch");
    RoundDecision d;
    d.mask = mask;
    d.power.resize(n);
    d.freq.resize(n);
    for (size_t i = 0; i < n; ++i) {
        d.power[i] = denormalize(cont[i], profiles[i].p_max_w);
        d.freq[i] = denormalize(cont[n + i], profiles[i].f_max_hz);
    }
    return d;
}

double td_target(double reward, bool terminal, double max_next_q, double kappa) {
    return terminal ? reward : reward + kappa * max_next_q;
}

}  // namespace volfml::agents
