#include "lexrl/replay.hpp"

#include <stdexcept>
#include <utility>

#include "lexrl/rng.hpp"

namespace lexrl {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) {
        throw std::invalid_argument("ReplayBuffer: capacity must be positive");
    }
    records_.reserve(capacity);
}

void ReplayBuffer::push(TransitionRecord record) {
    if (records_.size() < capacity_) {
        records_.push_back(std::move(record));
        return;
    }
    records_[cursor_] = std::move(record);
    cursor_ = (cursor_ + 1) % capacity_;
}

std::vector<TransitionRecord> ReplayBuffer::sample(std::size_t count,
                                                   std::mt19937_64& rng) const {
    if (records_.empty()) {
        throw std::logic_error("ReplayBuffer: cannot sample from an empty buffer");
    }
    if (count == 0) {
        throw std::invalid_argument("ReplayBuffer: sample count must be positive");
    }
    std::vector<TransitionRecord> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(records_[uniform_below(rng, records_.size())]);
    }
    return out;
}

std::vector<TransitionRecord> ReplayBuffer::snapshot() const {
    std::vector<TransitionRecord> out;
    out.reserve(records_.size());
    // Oldest record sits at the cursor once the buffer has wrapped.
    for (std::size_t i = 0; i < records_.size(); ++i) {
        const std::size_t idx =
            records_.size() == capacity_ ? (cursor_ + i) % capacity_ : i;
        out.push_back(records_[idx]);
    }
    return out;
}

}  // namespace lexrl
