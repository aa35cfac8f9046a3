#include "kgbench/snapshot.hpp"

#include "kgbench/binio.hpp"
#include "kgbench/fileio.hpp"
#include "kgbench/hashing.hpp"

#include <algorithm>
#include <vector>

namespace kgbench {

namespace {
constexpr char kMagic[4] = {'K', 'G', 'S', 'N'};
const std::string kSchemaTag = "knowledge-graph";
} // namespace

const char* snapshot_status_name(SnapshotStatus s) {
    switch (s) {
        case SnapshotStatus::ok: return "ok";
        case SnapshotStatus::io_error: return "io_error";
        case SnapshotStatus::bad_magic: return "bad_magic";
        case SnapshotStatus::version_mismatch: return "version_mismatch";
        case SnapshotStatus::schema_mismatch: return "schema_mismatch";
        case SnapshotStatus::truncated: return "truncated";
        case SnapshotStatus::checksum_mismatch: return "checksum_mismatch";
    }
    return "unknown";
}

std::string serialize_graph(const KnowledgeGraph& g) {
    ByteWriter w;
    w.raw(kMagic, sizeof kMagic);
    w.u32(kSnapshotVersion);
    w.str(kSchemaTag);
    w.u64(g.next_id());

    std::vector<NodeId> ids = g.sorted_node_ids();
    w.u64(ids.size());
    for (NodeId id : ids) {
        const Node& n = g.node(id);
        w.u64(n.id);
        w.u8(static_cast<std::uint8_t>(n.kind));
        w.u8(static_cast<std::uint8_t>(n.modality));
        w.str(n.content);
        w.str(n.vector_key);
        w.str(n.media_ref);
        w.u32(static_cast<std::uint32_t>(n.source_paper_ids.size()));
        for (const auto& p : n.source_paper_ids) w.str(p); // std::set: sorted
        w.u32(static_cast<std::uint32_t>(n.provenance.size()));
        for (const auto& pe : n.provenance) {
            w.u64(pe.original_id);
            w.str(pe.paper_id);
        }
    }

    std::vector<EdgeKey> edges(g.edges().begin(), g.edges().end());
    std::sort(edges.begin(), edges.end());
    w.u64(edges.size());
    for (const auto& e : edges) {
        w.u64(e.a);
        w.u64(e.b);
    }

    std::vector<NodeId> vh(g.high_frequency().begin(), g.high_frequency().end());
    std::sort(vh.begin(), vh.end());
    w.u64(vh.size());
    for (NodeId id : vh) w.u64(id);

    std::string bytes = w.take();
    std::uint64_t checksum = fnv1a64(bytes.data(), bytes.size());
    ByteWriter trailer;
    trailer.u64(checksum);
    bytes += trailer.bytes();
    return bytes;
}

KnowledgeGraph deserialize_graph(const std::string& bytes) {
    if (bytes.size() < sizeof kMagic)
        throw SnapshotError(SnapshotStatus::truncated, "snapshot shorter than its magic");
    if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
        throw SnapshotError(SnapshotStatus::bad_magic, "not a graph snapshot");
    if (bytes.size() < sizeof kMagic + 8)
        throw SnapshotError(SnapshotStatus::truncated, "snapshot shorter than its trailer");

    std::uint64_t stored;
    std::memcpy(&stored, bytes.data() + bytes.size() - 8, 8);
    std::uint64_t actual = fnv1a64(bytes.data(), bytes.size() - 8);
    if (stored != actual)
        throw SnapshotError(SnapshotStatus::checksum_mismatch,
                            "snapshot checksum mismatch: data is corrupt");

    ByteReader r(bytes);
    try {
        char magic[4];
        r.raw(magic, sizeof magic);
        std::uint32_t version = r.u32();
        if (version != kSnapshotVersion)
            throw SnapshotError(SnapshotStatus::version_mismatch,
                                "unsupported snapshot version " + std::to_string(version));
        std::string schema = r.str();
        if (schema != kSchemaTag)
            throw SnapshotError(SnapshotStatus::schema_mismatch,
                                "unexpected schema tag: " + schema);

        KnowledgeGraph g;
        NodeId next = r.u64();
        std::uint64_t node_count = r.u64();
        for (std::uint64_t i = 0; i < node_count; ++i) {
            Node n;
            n.id = r.u64();
            n.kind = static_cast<NodeKind>(r.u8());
            n.modality = static_cast<Modality>(r.u8());
            n.content = r.str();
            n.vector_key = r.str();
            n.media_ref = r.str();
            std::uint32_t np = r.u32();
            for (std::uint32_t k = 0; k < np; ++k) n.source_paper_ids.insert(r.str());
            std::uint32_t nv = r.u32();
            for (std::uint32_t k = 0; k < nv; ++k) {
                ProvenanceEntry pe;
                pe.original_id = r.u64();
                pe.paper_id = r.str();
                n.provenance.push_back(std::move(pe));
            }
            g.restore_node(std::move(n));
        }
        std::uint64_t edge_count = r.u64();
        for (std::uint64_t i = 0; i < edge_count; ++i) {
            NodeId a = r.u64();
            NodeId b = r.u64();
            g.restore_edge(a, b);
        }
        std::uint64_t vh_count = r.u64();
        std::vector<NodeId> vh;
        vh.reserve(vh_count);
        for (std::uint64_t i = 0; i < vh_count; ++i) vh.push_back(r.u64());
        g.set_high_frequency(std::move(vh));
        g.set_next_id(next);

        if (r.remaining() != 8)
            throw SnapshotError(SnapshotStatus::truncated, "snapshot has malformed payload");
        return g;
    } catch (const std::out_of_range&) {
        throw SnapshotError(SnapshotStatus::truncated, "snapshot ends mid-record");
    }
}

void save_graph(const KnowledgeGraph& g, const std::string& path) {
    try {
        write_file_bytes(path, serialize_graph(g));
    } catch (const std::runtime_error& e) {
        throw SnapshotError(SnapshotStatus::io_error, e.what());
    }
}

KnowledgeGraph load_graph(const std::string& path) {
    std::string bytes;
    try {
        bytes = read_file_bytes(path);
    } catch (const std::runtime_error& e) {
        throw SnapshotError(SnapshotStatus::io_error, e.what());
    }
    return deserialize_graph(bytes);
}

} // namespace kgbench
