#include "volfml/agents/replay.hpp"

#include <algorithm>
#include <stdexcept>

namespace volfml::agents {

ReplayBuffer::ReplayBuffer(size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
    ring_.reserve(capacity);
}

void ReplayBuffer::push(Transition t) {
    if (ring_.size() < capacity_) {
        ring_.push_back(std::move(t));
    } else {
        ring_[head_] = std::move(t);
    }
    head_ = (head_ + 1) % capacity_;
    size_ = std::min(size_ + 1, capacity_);
}

const Transition& ReplayBuffer::at(size_t i) const {
    if (i >= size_) throw std::out_of_range("ReplayBuffer::at");
    if (size_ < capacity_) return ring_[i];
    return ring_[(head_ + i) % capacity_];
}

std::vector<size_t> ReplayBuffer::sample_indices(Rng& rng, size_t batch) const {
    if (batch > size_) throw std::invalid_argument("ReplayBuffer: batch exceeds size");
    // Floyd's algorithm: distinct indices without replacement
    std::vector<size_t> picked;
    picked.reserve(batch);
    for (size_t j = size_ - batch; j < size_; ++j) {
        size_t t = static_cast<size_t>(rng.uniform_int(0, static_cast<int>(j)));
        if (std::find(picked.begin(), picked.end(), t) != picked.end())
            picked.push_back(j);
        else
            picked.push_back(t);
    }
    return picked;
}

}  // namespace volfml::agents
