#include "kgbench/record.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace kgbench {

using nlohmann::json;

const char* parse_code_name(ParseCode c) {
    switch (c) {
        case ParseCode::malformed_syntax: return "malformed_syntax";
        case ParseCode::unknown_kind: return "unknown_kind";
        case ParseCode::duplicate_kind: return "duplicate_kind";
        case ParseCode::empty_title: return "empty_title";
        case ParseCode::missing_field: return "missing_field";
        case ParseCode::bad_field_type: return "bad_field_type";
        case ParseCode::invalid_attachment: return "invalid_attachment";
        case ParseCode::bad_embedding: return "bad_embedding";
    }
    return "unknown";
}

std::size_t NodeRecord::populated_kind_count() const {
    std::set<NodeKind> kinds;
    kinds.insert(NodeKind::title);
    for (const auto& [kind, payload] : payloads) kinds.insert(kind);
    for (const auto& a : attachments) kinds.insert(a.kind);
    return kinds.size();
}

namespace {

bool valid_embedding_field(const std::string& field) {
    if (field == "title") return true;
    auto k = parse_kind(field);
    return k && is_key_info(*k);
}

// The JSON parser keeps the last value for repeated keys, so duplicates
// are detected during the parse via the callback's key events at depth 1.
json parse_collecting_keys(const std::string& line, std::vector<std::string>& keys) {
    json::parser_callback_t cb = [&](int depth, json::parse_event_t event, json& parsed) {
        if (depth == 1 && event == json::parse_event_t::key)
            keys.push_back(parsed.get<std::string>());
        return true;
    };
    return json::parse(line, cb);
}

} // namespace

NodeRecord parse_node_record(const std::string& line, std::size_t line_number) {
    json obj;
    std::vector<std::string> keys;
    try {
        obj = parse_collecting_keys(line, keys);
    } catch (const json::exception& e) {
        throw ParseError(ParseCode::malformed_syntax, line_number, "", e.what());
    }
    if (!obj.is_object())
        throw ParseError(ParseCode::malformed_syntax, line_number, "",
                         "record is not an object");

    std::set<std::string> seen;
    for (const auto& k : keys) {
        if (!seen.insert(k).second)
            throw ParseError(ParseCode::duplicate_kind, line_number, k,
                             "duplicate field '" + k + "'");
    }

    NodeRecord rec;
    for (const auto& [key, value] : obj.items()) {
        if (key == "paper_id" || key == "title") {
            if (!value.is_string())
                throw ParseError(ParseCode::bad_field_type, line_number, key,
                                 "'" + key + "' must be a string");
            (key == "paper_id" ? rec.paper_id : rec.title) = value.get<std::string>();
        } else if (key == "attachments") {
            if (!value.is_array())
                throw ParseError(ParseCode::bad_field_type, line_number, key,
                                 "'attachments' must be an array");
            for (const auto& item : value) {
                if (!item.is_object())
                    throw ParseError(ParseCode::invalid_attachment, line_number, key,
                                     "attachment must be an object");
                Attachment a;
                bool has_kind = false, has_ref = false;
                for (const auto& [ak, av] : item.items()) {
                    if (ak == "kind") {
                        if (!av.is_string())
                            throw ParseError(ParseCode::invalid_attachment, line_number, key,
                                             "attachment kind must be a string");
                        auto kind = parse_kind(av.get<std::string>());
                        if (!kind || !is_attachment_kind(*kind))
                            throw ParseError(ParseCode::invalid_attachment, line_number, key,
                                             "attachment kind '" + av.get<std::string>() +
                                                 "' is not a media kind");
                        a.kind = *kind;
                        has_kind = true;
                    } else if (ak == "ref") {
                        if (!av.is_string() || av.get<std::string>().empty())
                            throw ParseError(ParseCode::invalid_attachment, line_number, key,
                                             "attachment ref must be a non-empty string");
                        a.media_ref = av.get<std::string>();
                        has_ref = true;
                    } else if (ak == "caption") {
                        if (!av.is_string())
                            throw ParseError(ParseCode::invalid_attachment, line_number, key,
                                             "attachment caption must be a string");
                        a.caption = av.get<std::string>();
                    } else {
                        throw ParseError(ParseCode::invalid_attachment, line_number, key,
                                         "unknown attachment field '" + ak + "'");
                    }
                }
                if (!has_kind || !has_ref)
                    throw ParseError(ParseCode::invalid_attachment, line_number, key,
                                     "attachment requires kind and ref");
                rec.attachments.push_back(std::move(a));
            }
        } else if (key == "embedding_refs") {
            if (!value.is_object())
                throw ParseError(ParseCode::bad_embedding, line_number, key,
                                 "'embedding_refs' must be an object");
            for (const auto& [field, ref] : value.items()) {
                if (!valid_embedding_field(field))
                    throw ParseError(ParseCode::unknown_kind, line_number, field,
                                     "embedding ref names unknown field '" + field + "'");
                if (!ref.is_string() || ref.get<std::string>().empty())
                    throw ParseError(ParseCode::bad_embedding, line_number, field,
                                     "embedding ref must be a non-empty string");
                rec.embedding_refs[field] = ref.get<std::string>();
            }
        } else if (key == "embeddings") {
            if (!value.is_object())
                throw ParseError(ParseCode::bad_embedding, line_number, key,
                                 "'embeddings' must be an object");
            for (const auto& [field, vec] : value.items()) {
                if (!valid_embedding_field(field))
                    throw ParseError(ParseCode::unknown_kind, line_number, field,
                                     "embedding names unknown field '" + field + "'");
                if (!vec.is_array() || vec.empty())
                    throw ParseError(ParseCode::bad_embedding, line_number, field,
                                     "embedding must be a non-empty number array");
                std::vector<float> v;
                v.reserve(vec.size());
                for (const auto& x : vec) {
                    if (!x.is_number())
                        throw ParseError(ParseCode::bad_embedding, line_number, field,
                                         "embedding must contain numbers only");
                    v.push_back(x.get<float>());
                }
                rec.inline_embeddings[field] = std::move(v);
            }
        } else {
            auto kind = parse_kind(key);
            if (!kind || !is_key_info(*kind))
                throw ParseError(ParseCode::unknown_kind, line_number, key,
                                 "unknown kind or field '" + key + "'");
            if (!value.is_string())
                throw ParseError(ParseCode::bad_field_type, line_number, key,
                                 "payload for '" + key + "' must be a string");
            std::string payload = value.get<std::string>();
            if (payload.empty())
                throw ParseError(ParseCode::bad_field_type, line_number, key,
                                 "payload for '" + key + "' is empty");
            rec.payloads[*kind] = std::move(payload);
        }
    }

    if (rec.paper_id.empty())
        throw ParseError(ParseCode::missing_field, line_number, "paper_id",
                         "record requires a non-empty paper_id");
    if (rec.title.empty())
        throw ParseError(ParseCode::empty_title, line_number, "title",
                         "record requires a non-empty title");
    return rec;
}

ValidationReport validate_batch(const std::vector<NodeRecord>& records) {
    ValidationReport report;
    std::unordered_map<std::string, std::size_t> first_seen;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const NodeRecord& rec = records[i];
        auto [it, inserted] = first_seen.emplace(rec.paper_id, i);
        if (!inserted) {
            report.errors.push_back(
                {i, rec.paper_id,
                 "duplicate paper_id (first used by record " +
                     std::to_string(it->second) + ")"});
        }
        std::size_t populated = rec.populated_kind_count();
        if (populated < 5) {
            report.warnings.push_back(
                {i, rec.paper_id,
                 "only " + std::to_string(populated) +
                     " of 13 kinds populated (fewer than 5)"});
        }
    }
    return report;
}

std::string ValidationReport::to_text() const {
    std::ostringstream out;
    out << "validation: " << errors.size() << " error(s), " << warnings.size()
        << " warning(s)\n";
    for (const auto& e : errors)
        out << "error: record " << e.record_index << " (" << e.paper_id << "): "
            << e.message << "\n";
    for (const auto& w : warnings)
        out << "warning: record " << w.record_index << " (" << w.paper_id << "): "
            << w.message << "\n";
    out << (accepted() ? "batch accepted\n" : "batch rejected\n");
    return out.str();
}

NodeId add_record_to_graph(KnowledgeGraph& g, const NodeRecord& rec) {
    auto key_for = [&](const std::string& field, NodeKind kind, std::uint32_t ordinal) {
        auto it = rec.embedding_refs.find(field);
        if (it != rec.embedding_refs.end() && ordinal == 0) return it->second;
        return make_vector_key(rec.paper_id, kind, ordinal);
    };

    NodeId title = g.add_node(NodeKind::title, rec.title, Modality::text, rec.paper_id,
                              key_for("title", NodeKind::title, 0));
    for (const auto& [kind, payload] : rec.payloads) { // std::map: enum order
        NodeId n = g.add_node(kind, payload, Modality::text, rec.paper_id,
                              key_for(std::string(kind_name(kind)), kind, 0));
        g.add_edge(title, n);
    }
    std::array<std::uint32_t, kNumKinds> ordinals{};
    for (const auto& a : rec.attachments) {
        std::uint32_t ordinal = ++ordinals[static_cast<std::size_t>(a.kind)];
        NodeId n = g.add_node(a.kind, a.caption, attachment_modality(a.kind), rec.paper_id,
                              make_vector_key(rec.paper_id, a.kind, ordinal));
        g.set_media_ref(n, a.media_ref);
        g.add_edge(title, n);
    }
    return title;
}

std::vector<std::pair<std::string, std::vector<float>>>
resolve_inline_embeddings(const NodeRecord& rec) {
    std::vector<std::pair<std::string, std::vector<float>>> out;
    for (const auto& [field, vec] : rec.inline_embeddings) {
        NodeKind kind = field == "title" ? NodeKind::title : *parse_kind(field);
        auto it = rec.embedding_refs.find(field);
        std::string key = it != rec.embedding_refs.end()
                              ? it->second
                              : make_vector_key(rec.paper_id, kind, 0);
        out.emplace_back(std::move(key), vec);
    }
    return out;
}

LoadedRecords load_record_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    LoadedRecords out;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".jsonl")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        std::ifstream in(path);
        if (!in) {
            out.parse_errors.push_back(path.string() + ": unreadable");
            continue;
        }
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            try {
                out.records.push_back(parse_node_record(line, lineno));
            } catch (const ParseError& e) {
                out.parse_errors.push_back(path.filename().string() + ":" +
                                           std::to_string(e.line()) + ": [" +
                                           parse_code_name(e.code()) + "] " + e.what());
            }
        }
    }
    return out;
}

} // namespace kgbench
