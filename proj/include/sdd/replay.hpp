#pragma once

#include <cstddef>
#include <random>
#include <stdexcept>
#include <unordered_set>
#include <vector>

namespace sdd {

struct Transition {
    std::vector<float> obs;
    int action = 0;
    float reward = 0.0f;
    std::vector<float> next_obs;
    bool done = false;
};

/// Fixed-capacity ring of transitions with uniform without-replacement
/// batch sampling.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
        if (capacity == 0) throw std::invalid_argument("ReplayBuffer: zero capacity");
        data_.reserve(capacity);
    }

    std::size_t size() const { return data_.size(); }
    std::size_t capacity() const { return capacity_; }
    const Transition& at(std::size_t i) const { return data_[i]; }

    void push(Transition t) {
        if (data_.size() < capacity_) {
            data_.push_back(std::move(t));
        } else {
            data_[next_] = std::move(t);
            next_ = (next_ + 1) % capacity_;
        }
    }

    /// Floyd's sampling: `batch` distinct indices, uniform over the buffer.
    std::vector<std::size_t> sample_indices(std::size_t batch, std::mt19937_64& rng) const {
        if (batch > data_.size())
            throw std::invalid_argument("ReplayBuffer: batch larger than buffer");
        std::unordered_set<std::size_t> chosen;
        std::vector<std::size_t> out;
        out.reserve(batch);
        for (std::size_t i = data_.size() - batch; i < data_.size(); ++i) {
            const std::size_t j = bounded(rng, i + 1);
            if (chosen.insert(j).second) {
                out.push_back(j);
            } else {
                chosen.insert(i);
                out.push_back(i);
            }
        }
        return out;
    }

private:
    static std::size_t bounded(std::mt19937_64& rng, std::size_t n) {
        const std::uint64_t bound = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t raw;
        do { raw = rng(); } while (raw >= bound);
        return static_cast<std::size_t>(raw % n);
    }

    std::vector<Transition> data_;
    std::size_t capacity_;
    std::size_t next_ = 0;
};

}  // namespace sdd
