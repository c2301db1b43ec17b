#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <stdexcept>

namespace smarthouse {

/// Milliseconds since the simulation epoch. Epoch 0 is midnight of day 0.
using SimTime = std::chrono::milliseconds;

inline constexpr SimTime kTick{100};
inline constexpr SimTime kDay{86'400'000};

/// Monotone simulated clock. Only the run harness advances it.
class VirtualClock {
public:
    explicit VirtualClock(SimTime start = SimTime{0}) : now_ms_{start.count()} {}

    SimTime now() const { return SimTime{now_ms_.load(std::memory_order_acquire)}; }

    void advance(SimTime delta) {
        if (delta.count() < 0) throw std::invalid_argument("clock cannot run backwards");
        now_ms_.fetch_add(delta.count(), std::memory_order_acq_rel);
    }

    void advance_to(SimTime t) {
        auto cur = now_ms_.load(std::memory_order_acquire);
        if (t.count() < cur) throw std::invalid_argument("clock cannot run backwards");
        now_ms_.store(t.count(), std::memory_order_release);
    }

private:
    std::atomic<std::int64_t> now_ms_;
};

}  // namespace smarthouse
