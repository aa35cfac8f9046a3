#pragma once
// Versioned, checksummed binary container for a knowledge graph.
// Serialization iterates every collection in ascending id order, so
// save -> load -> save reproduces the file byte for byte.

#include "kgbench/graph.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace kgbench {

enum class SnapshotStatus : std::uint8_t {
    ok = 0,
    io_error,
    bad_magic,
    version_mismatch,
    schema_mismatch,
    truncated,
    checksum_mismatch,
};

const char* snapshot_status_name(SnapshotStatus s);

class SnapshotError : public std::runtime_error {
  public:
    SnapshotError(SnapshotStatus status, const std::string& what)
        : std::runtime_error(what), status_(status) {}
    SnapshotStatus status() const { return status_; }

  private:
    SnapshotStatus status_;
};

inline constexpr std::uint32_t kSnapshotVersion = 1;

// Serializes to an in-memory buffer (trailing 8 bytes are the checksum
// of everything before them).
std::string serialize_graph(const KnowledgeGraph& g);
KnowledgeGraph deserialize_graph(const std::string& bytes);

void save_graph(const KnowledgeGraph& g, const std::string& path);
KnowledgeGraph load_graph(const std::string& path);

} // namespace kgbench
