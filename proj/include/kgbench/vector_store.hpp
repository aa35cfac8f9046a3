#pragma once
// Sidecar store for embedding vectors, keyed by string (canonically
// paper/kind/ordinal). Fixed dimension, contiguous storage, checksummed
// binary file format with the same error taxonomy as graph snapshots.

#include "kgbench/snapshot.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace kgbench {

class VectorStore {
  public:
    explicit VectorStore(std::uint32_t dim);

    void put(const std::string& key, const std::vector<float>& v);
    bool contains(const std::string& key) const { return index_.count(key) != 0; }
    std::span<const float> get(const std::string& key) const;

    std::uint32_t dim() const { return dim_; }
    std::size_t size() const { return index_.size(); }
    std::vector<std::string> sorted_keys() const;

    std::string serialize() const;
    void save(const std::string& path) const;
    static VectorStore deserialize(const std::string& bytes);
    static VectorStore load(const std::string& path);

  private:
    std::uint32_t dim_;
    std::unordered_map<std::string, std::size_t> index_; // key -> row
    std::vector<float> data_;                            // rows * dim
};

} // namespace kgbench
