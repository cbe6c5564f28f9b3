#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "lexrl/mdp_core.hpp"

namespace lexrl {

/// Bounded FIFO store of transitions with uniform with-replacement sampling.
/// Once full, each push overwrites the oldest record. Single-owner; the
/// sampling RNG is supplied by the caller so draws stay reproducible.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(TransitionRecord record);
    std::vector<TransitionRecord> sample(std::size_t count, std::mt19937_64& rng) const;

    std::size_t size() const { return records_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return records_.empty(); }

    /// Records in insertion order, oldest first.
    std::vector<TransitionRecord> snapshot() const;

private:
    std::size_t capacity_;
    std::vector<TransitionRecord> records_;
    std::size_t cursor_ = 0;
};

}  // namespace lexrl
