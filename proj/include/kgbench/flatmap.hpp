#pragma once
// Open-addressing counter for packed u64 keys. The walk aggregation map
// holds tens of millions of entries; a flat table with linear probing is
// several times smaller and faster than a node-based map there.

#include "kgbench/hashing.hpp"

#include <cstdint>
#include <vector>

namespace kgbench {

class PairCounter {
  public:
    explicit PairCounter(std::size_t initial_capacity = 1024) {
        std::size_t cap = 16;
        while (cap < initial_capacity * 2) cap <<= 1;
        keys_.assign(cap, kEmpty);
        vals_.assign(cap, 0);
    }

    void add(std::uint64_t key, std::uint32_t delta = 1) {
        if ((count_ + 1) * 10 >= keys_.size() * 7) grow();
        std::size_t mask = keys_.size() - 1;
        std::size_t i = mix64(key) & mask;
        while (true) {
            if (keys_[i] == key) {
                vals_[i] += delta;
                return;
            }
            if (keys_[i] == kEmpty) {
                keys_[i] = key;
                vals_[i] = delta;
                ++count_;
                return;
            }
            i = (i + 1) & mask;
        }
    }

    std::uint32_t get(std::uint64_t key) const {
        std::size_t mask = keys_.size() - 1;
        std::size_t i = mix64(key) & mask;
        while (keys_[i] != kEmpty) {
            if (keys_[i] == key) return vals_[i];
            i = (i + 1) & mask;
        }
        return 0;
    }

    std::size_t size() const { return count_; }

    template <typename F> void for_each(F&& f) const {
        for (std::size_t i = 0; i < keys_.size(); ++i)
            if (keys_[i] != kEmpty) f(keys_[i], vals_[i]);
    }

    void merge_from(const PairCounter& other) {
        other.for_each([this](std::uint64_t k, std::uint32_t v) { add(k, v); });
    }

  private:
    static constexpr std::uint64_t kEmpty = ~std::uint64_t{0};

    void grow() {
        std::vector<std::uint64_t> old_keys = std::move(keys_);
        std::vector<std::uint32_t> old_vals = std::move(vals_);
        keys_.assign(old_keys.size() * 2, kEmpty);
        vals_.assign(old_vals.size() * 2, 0);
        std::size_t mask = keys_.size() - 1;
        for (std::size_t i = 0; i < old_keys.size(); ++i) {
            if (old_keys[i] == kEmpty) continue;
            std::size_t j = mix64(old_keys[i]) & mask;
            while (keys_[j] != kEmpty) j = (j + 1) & mask;
            keys_[j] = old_keys[i];
            vals_[j] = old_vals[i];
        }
    }

    std::vector<std::uint64_t> keys_;
    std::vector<std::uint32_t> vals_;
    std::size_t count_ = 0;
};

} // namespace kgbench
