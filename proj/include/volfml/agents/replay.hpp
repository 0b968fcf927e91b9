#pragma once

#include <cstddef>
#include <vector>

#include "volfml/rng.hpp"

namespace volfml::agents {

struct Transition {
    std::vector<double> state;
    std::vector<double> cont;  // stored continuous action, normalized
    int disc = 0;              // discrete action (scheduling-mask index)
    double reward = 0.0;
    std::vector<double> next_state;
    bool terminal = false;
};

// Fixed-capacity FIFO ring; once full the oldest transition is overwritten.
class ReplayBuffer {
public:
    explicit ReplayBuffer(size_t capacity);

    void push(Transition t);
    size_t size() const { return size_; }
    size_t capacity() const { return capacity_; }

    // i-th stored transition, oldest first
    const Transition& at(size_t i) const;

    // mini-batch of distinct indices into insertion order
    std::vector<size_t> sample_indices(Rng& rng, size_t batch) const;

private:
    size_t capacity_;
    size_t head_ = 0;  // next write position
    size_t size_ = 0;
    std::vector<Transition> ring_;
};

}  // namespace volfml::agents
