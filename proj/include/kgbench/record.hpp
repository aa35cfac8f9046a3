#pragma once
// Per-paper key-information records: JSON-lines parsing with strict field
// checking, batch validation, and conversion into graph subgraphs.
//
// Record grammar (one JSON object per line):
//   {"paper_id": "...", "title": "...",
//    "<kind>": "payload text",                      // any of the 12 kinds
//    "attachments": [{"kind": "figures", "ref": "path", "caption": "..."}],
//    "embedding_refs": {"<field>": "sidecar key"},
//    "embeddings": {"<field>": [floats...]}}
// Unknown fields are rejected, not ignored.

#include "kgbench/graph.hpp"
#include "kgbench/ids.hpp"

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace kgbench {

enum class ParseCode : std::uint8_t {
    malformed_syntax,
    unknown_kind,
    duplicate_kind,
    empty_title,
    missing_field,
    bad_field_type,
    invalid_attachment,
    bad_embedding,
};

const char* parse_code_name(ParseCode c);

class ParseError : public std::runtime_error {
  public:
    ParseError(ParseCode code, std::size_t line, std::string field, const std::string& what)
        : std::runtime_error(what), code_(code), line_(line), field_(std::move(field)) {}

    ParseCode code() const { return code_; }
    std::size_t line() const { return line_; }
    const std::string& field() const { return field_; }

  private:
    ParseCode code_;
    std::size_t line_;
    std::string field_;
};

struct Attachment {
    NodeKind kind = NodeKind::figures;
    std::string media_ref;
    std::string caption;
};

struct NodeRecord {
    std::string paper_id;
    std::string title;
    std::map<NodeKind, std::string> payloads; // key-info kinds only
    std::vector<Attachment> attachments;
    // field name ("title" or a kind name) -> explicit sidecar key
    std::map<std::string, std::string> embedding_refs;
    // field name -> inline vector, written to the sidecar at build time
    std::map<std::string, std::vector<float>> inline_embeddings;

    // Distinct populated kinds, counting the title.
    std::size_t populated_kind_count() const;
};

NodeRecord parse_node_record(const std::string& line, std::size_t line_number = 1);

struct ValidationIssue {
    std::size_t record_index = 0; // 0-based position in the batch
    std::string paper_id;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> errors;
    std::vector<ValidationIssue> warnings;

    bool accepted() const { return errors.empty(); }
    std::string to_text() const;
};

ValidationReport validate_batch(const std::vector<NodeRecord>& records);

// Adds the record's title node, one node per populated kind payload, one
// node per attachment, and the belongs-to edges. Returns the title node.
NodeId add_record_to_graph(KnowledgeGraph& g, const NodeRecord& rec);

// Resolved (sidecar key, vector) pairs for the record's inline embeddings.
std::vector<std::pair<std::string, std::vector<float>>>
resolve_inline_embeddings(const NodeRecord& rec);

struct LoadedRecords {
    std::vector<NodeRecord> records;
    // One "file:line: [code] message" entry per unparseable line; parsing
    // continues so a report covers the whole directory in one pass.
    std::vector<std::string> parse_errors;
};

// Loads every *.jsonl file under dir (sorted by name); blank lines skipped.
LoadedRecords load_record_dir(const std::string& dir);

} // namespace kgbench
