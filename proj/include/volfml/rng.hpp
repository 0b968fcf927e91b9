#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <string_view>

namespace volfml {

// Derives an independent stream seed from a master seed and a stream name.
// Used to fan one experiment seed out into topology / fading / data / agent
// streams so that paired runs can share e.g. identical fading traces.
inline uint64_t derive_stream_seed(uint64_t master, std::string_view stream) {
    // FNV-1a over the name, then a splitmix64 finalizer over (master ^ hash).
    uint64_t h = 1469598103934665603ull;
    for (char c : stream) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    uint64_t z = master ^ h;
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Seeded random stream with hand-rolled distributions. std::*_distribution
// output is implementation-defined, so all draws are derived here directly
// from the mt19937_64 words to keep traces reproducible.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    // uniform double in [0, 1)
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform double in (0, 1]
    double uniform_pos() { return 1.0 - uniform(); }

    // standard normal via Box-Muller (no cached spare)
    double normal() {
        double u1 = uniform_pos();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // unit-mean exponential
    double exponential() { return -std::log(uniform_pos()); }

    // uniform integer in [lo, hi] inclusive, unbiased (masked rejection)
    int uniform_int(int lo, int hi) {
        uint64_t range =
            static_cast<uint64_t>(static_cast<int64_t>(hi) - static_cast<int64_t>(lo)) + 1;
        uint64_t mask = range - 1;
        mask |= mask >> 1; mask |= mask >> 2; mask |= mask >> 4;
        mask |= mask >> 8; mask |= mask >> 16; mask |= mask >> 32;
        uint64_t x;
        do { x = gen_() & mask; } while (x >= range);
        return static_cast<int>(lo + static_cast<int64_t>(x));
    }

    bool bernoulli(double p) { return uniform() < p; }

    std::string save_state() const {
        std::ostringstream os;
        os << gen_;
        return os.str();
    }

    void load_state(const std::string& s) {
        std::istringstream is(s);
        is >> gen_;
    }

    bool operator==(const Rng& other) const { return gen_ == other.gen_; }

private:
    std::mt19937_64 gen_;
};

}  // namespace volfml
