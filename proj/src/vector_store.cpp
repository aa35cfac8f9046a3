#include "kgbench/vector_store.hpp"

#include "kgbench/binio.hpp"
#include "kgbench/fileio.hpp"
#include "kgbench/hashing.hpp"

#include <algorithm>
#include <cstring>

namespace kgbench {

namespace {
constexpr char kMagic[4] = {'K', 'G', 'V', 'S'};
constexpr std::uint32_t kVersion = 1;
} // namespace

VectorStore::VectorStore(std::uint32_t dim) : dim_(dim) {
    if (dim == 0) throw std::invalid_argument("vector dimension must be positive");
}

void VectorStore::put(const std::string& key, const std::vector<float>& v) {
    if (v.size() != dim_)
        throw std::invalid_argument("vector for '" + key + "' has dimension " +
                                    std::to_string(v.size()) + ", store expects " +
                                    std::to_string(dim_));
    auto [it, inserted] = index_.emplace(key, index_.size());
    if (!inserted) throw std::invalid_argument("duplicate vector key: " + key);
    data_.insert(data_.end(), v.begin(), v.end());
}

std::span<const float> VectorStore::get(const std::string& key) const {
    auto it = index_.find(key);
    if (it == index_.end()) throw std::out_of_range("no vector for key: " + key);
    return {data_.data() + it->second * dim_, dim_};
}

std::vector<std::string> VectorStore::sorted_keys() const {
    std::vector<std::string> keys;
    keys.reserve(index_.size());
    for (const auto& [k, row] : index_) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    return keys;
}

std::string VectorStore::serialize() const {
    ByteWriter w;
    w.raw(kMagic, sizeof kMagic);
    w.u32(kVersion);
    w.u32(dim_);
    w.u64(index_.size());
    for (const auto& key : sorted_keys()) {
        w.str(key);
        auto v = get(key);
        w.raw(v.data(), v.size() * sizeof(float));
    }
    std::string bytes = w.take();
    ByteWriter trailer;
    trailer.u64(fnv1a64(bytes.data(), bytes.size()));
    return bytes + trailer.bytes();
}

void VectorStore::save(const std::string& path) const {
    try {
        write_file_bytes(path, serialize());
    } catch (const std::runtime_error& e) {
        throw SnapshotError(SnapshotStatus::io_error, e.what());
    }
}

VectorStore VectorStore::deserialize(const std::string& bytes) {
    if (bytes.size() < sizeof kMagic)
        throw SnapshotError(SnapshotStatus::truncated, "vector file shorter than its magic");
    if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
        throw SnapshotError(SnapshotStatus::bad_magic, "not a vector sidecar file");
    if (bytes.size() < sizeof kMagic + 8)
        throw SnapshotError(SnapshotStatus::truncated, "vector file shorter than its trailer");

    std::uint64_t stored;
    std::memcpy(&stored, bytes.data() + bytes.size() - 8, 8);
    if (stored != fnv1a64(bytes.data(), bytes.size() - 8))
        throw SnapshotError(SnapshotStatus::checksum_mismatch,
                            "vector file checksum mismatch: data is corrupt");

    ByteReader r(bytes);
    try {
        char magic[4];
        r.raw(magic, sizeof magic);
        std::uint32_t version = r.u32();
        if (version != kVersion)
            throw SnapshotError(SnapshotStatus::version_mismatch,
                                "unsupported vector file version " + std::to_string(version));
        std::uint32_t dim = r.u32();
        if (dim == 0)
            throw SnapshotError(SnapshotStatus::truncated, "vector file declares dimension 0");
        std::uint64_t count = r.u64();
        VectorStore store(dim);
        std::vector<float> v(dim);
        for (std::uint64_t i = 0; i < count; ++i) {
            std::string key = r.str();
            r.raw(v.data(), v.size() * sizeof(float));
            store.put(key, v);
        }
        if (r.remaining() != 8)
            throw SnapshotError(SnapshotStatus::truncated, "vector file has malformed payload");
        return store;
    } catch (const std::out_of_range&) {
        throw SnapshotError(SnapshotStatus::truncated, "vector file ends mid-record");
    }
}

VectorStore VectorStore::load(const std::string& path) {
    std::string bytes;
    try {
        bytes = read_file_bytes(path);
    } catch (const std::runtime_error& e) {
        throw SnapshotError(SnapshotStatus::io_error, e.what());
    }
    return deserialize(bytes);
}

} // namespace kgbench
