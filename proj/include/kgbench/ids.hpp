#pragma once
// Node identity, node kinds and modalities shared by every stage.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace kgbench {

// Surrogate key; content-independent so merging never invalidates ids.
using NodeId = std::uint64_t;
inline constexpr NodeId kInvalidNode = ~NodeId{0};

// The 13 node kinds: one title kind plus 12 key-information kinds.
enum class NodeKind : std::uint8_t {
    title = 0,
    research_background,
    classification_tags,
    key_contributions,
    methodology,
    datasets,
    results,
    metrics,
    formulas,
    algorithms,
    figures,
    tables,
    limitations,
};

inline constexpr std::size_t kNumKinds = 13;
inline constexpr std::size_t kNumKeyInfoKinds = 12;

inline constexpr std::array<std::string_view, kNumKinds> kKindNames = {
    "title",
    "research_background",
    "classification_tags",
    "key_contributions",
    "methodology",
    "datasets",
    "results",
    "metrics",
    "formulas",
    "algorithms",
    "figures",
    "tables",
    "limitations",
};

inline std::string_view kind_name(NodeKind k) {
    return kKindNames[static_cast<std::size_t>(k)];
}

inline std::optional<NodeKind> parse_kind(std::string_view name) {
    for (std::size_t i = 0; i < kNumKinds; ++i) {
        if (kKindNames[i] == name) return static_cast<NodeKind>(i);
    }
    return std::nullopt;
}

inline bool is_key_info(NodeKind k) { return k != NodeKind::title; }

// Kinds whose payloads may arrive as media attachments.
inline bool is_attachment_kind(NodeKind k) {
    return k == NodeKind::figures || k == NodeKind::tables ||
           k == NodeKind::formulas || k == NodeKind::algorithms;
}

enum class Modality : std::uint8_t {
    text = 0,
    figure,
    table,
    formula,
    algorithm,
};

inline constexpr std::array<std::string_view, 5> kModalityNames = {
    "text", "figure", "table", "formula", "algorithm",
};

inline std::string_view modality_name(Modality m) {
    return kModalityNames[static_cast<std::size_t>(m)];
}

inline std::optional<Modality> parse_modality(std::string_view name) {
    for (std::size_t i = 0; i < kModalityNames.size(); ++i) {
        if (kModalityNames[i] == name) return static_cast<Modality>(i);
    }
    return std::nullopt;
}

// Canonical sidecar vector key for a node: paper, kind and ordinal joined
// by a unit separator. Ordinal 0 is the plain payload; attachments of the
// same kind take 1..n in record order.
inline std::string make_vector_key(std::string_view paper_id, NodeKind kind,
                                   std::uint32_t ordinal) {
    std::string key(paper_id);
    key += '\x1f';
    key += kind_name(kind);
    key += '\x1f';
    key += std::to_string(ordinal);
    return key;
}

// Attachments of a media kind carry that kind's modality; plain text
// payloads are always Modality::text.
inline Modality attachment_modality(NodeKind k) {
    switch (k) {
        case NodeKind::figures: return Modality::figure;
        case NodeKind::tables: return Modality::table;
        case NodeKind::formulas: return Modality::formula;
        case NodeKind::algorithms: return Modality::algorithm;
        default: return Modality::text;
    }
}

} // namespace kgbench
