#include "kgbench/corpus.hpp"

#include "kgbench/fileio.hpp"
#include "kgbench/hashing.hpp"

#include <algorithm>
#include <filesystem>
#include <sstream>

namespace kgbench {

namespace {

std::size_t token_count(const std::string& line) {
    std::istringstream in(line);
    std::string tok;
    std::size_t n = 0;
    while (in >> tok) ++n;
    return n;
}

bool is_heading(const std::string& line) {
    std::size_t i = line.find_first_not_of(" \t");
    return i != std::string::npos && line[i] == '#';
}

} // namespace

std::uint64_t CorpusDocument::digest() const {
    Fnv1a h;
    h.update(body.data(), body.size());
    for (const auto& img : images) {
        h.update("\x1f", 1);
        h.update(img.path.data(), img.path.size());
        h.update("\x1f", 1);
        h.update(img.caption.data(), img.caption.size());
    }
    return h.digest();
}

std::vector<ImageRef> parse_image_refs(const std::string& markdown) {
    std::vector<ImageRef> refs;
    std::size_t pos = 0;
    while ((pos = markdown.find("![", pos)) != std::string::npos) {
        std::size_t cap_end = markdown.find(']', pos + 2);
        if (cap_end == std::string::npos) break;
        if (cap_end + 1 >= markdown.size() || markdown[cap_end + 1] != '(') {
            pos = cap_end + 1;
            continue;
        }
        std::size_t path_end = markdown.find(')', cap_end + 2);
        if (path_end == std::string::npos) break;
        refs.push_back({markdown.substr(cap_end + 2, path_end - cap_end - 2),
                        markdown.substr(pos + 2, cap_end - pos - 2)});
        pos = path_end + 1;
    }
    return refs;
}

std::vector<Chunk> chunk_markdown(const std::string& markdown, std::size_t max_tokens) {
    if (max_tokens == 0) throw CorpusError("chunk token budget must be positive");
    std::vector<Chunk> chunks;
    std::string current;
    std::size_t current_tokens = 0;

    auto flush = [&] {
        if (current.find_first_not_of(" \t\n") != std::string::npos)
            chunks.push_back({chunks.size(), current});
        current.clear();
        current_tokens = 0;
    };

    std::istringstream in(markdown);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (is_heading(line) && current_tokens > 0) flush();
        std::size_t line_tokens = token_count(line);
        if (line_tokens > max_tokens) {
            // A single oversized line is split at token boundaries so the
            // per-chunk budget always holds.
            flush();
            std::istringstream words(line);
            std::string tok;
            while (words >> tok) {
                if (current_tokens == max_tokens) flush();
                if (!current.empty()) current += ' ';
                current += tok;
                ++current_tokens;
            }
            flush();
            continue;
        }
        if (current_tokens + line_tokens > max_tokens && current_tokens > 0) flush();
        current += line;
        current += '\n';
        current_tokens += line_tokens;
    }
    flush();
    return chunks;
}

std::vector<CorpusDocument> load_corpus_dir(const std::string& dir, std::size_t max_tokens) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw CorpusError("not a directory: " + dir);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".md")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    std::vector<CorpusDocument> docs;
    docs.reserve(files.size());
    for (const auto& path : files) {
        CorpusDocument doc;
        doc.doc_id = path.stem().string();
        doc.body = read_file_bytes(path.string());
        doc.images = parse_image_refs(doc.body);
        doc.chunks = chunk_markdown(doc.body, max_tokens);
        docs.push_back(std::move(doc));
    }
    return docs;
}

std::string chunk_vector_key(const std::string& doc_id, std::size_t ordinal) {
    return doc_id + '\x1f' + "chunk" + '\x1f' + std::to_string(ordinal);
}

std::string image_vector_key(const std::string& doc_id, std::size_t ordinal) {
    return doc_id + '\x1f' + "image" + '\x1f' + std::to_string(ordinal);
}

CorpusIndex::CorpusIndex(const std::vector<CorpusDocument>& docs, const VectorStore& vectors)
    : docs_(docs), dim_(vectors.dim()) {
    std::sort(docs_.begin(), docs_.end(),
              [](const CorpusDocument& a, const CorpusDocument& b) { return a.doc_id < b.doc_id; });
    for (std::size_t d = 0; d + 1 < docs_.size(); ++d)
        if (docs_[d].doc_id == docs_[d + 1].doc_id)
            throw CorpusError("duplicate document id: " + docs_[d].doc_id);

    auto fetch = [&](const std::string& key) {
        if (!vectors.contains(key)) throw CorpusError("missing vector for " + key);
        auto v = vectors.get(key);
        if (v.size() != dim_) throw CorpusError("vector dimension mismatch for " + key);
        return unit_normalized(v);
    };
    for (std::size_t d = 0; d < docs_.size(); ++d) {
        const auto& doc = docs_[d];
        for (const auto& chunk : doc.chunks)
            entries_.push_back(
                {d, chunk.chunk_id, ItemKind::text, fetch(chunk_vector_key(doc.doc_id, chunk.chunk_id))});
        for (std::size_t i = 0; i < doc.images.size(); ++i)
            entries_.push_back({d, i, ItemKind::image, fetch(image_vector_key(doc.doc_id, i))});
    }
}

std::vector<SearchHit> CorpusIndex::search(const std::vector<float>& query,
                                           std::size_t top_k) const {
    if (query.size() != dim_) throw CorpusError("query dimension mismatch");
    auto q = unit_normalized(query);

    // Exact scan; entries_ are in (doc_id, modality, item) order, so index
    // order is the documented tie order.
    std::vector<std::pair<double, std::size_t>> scored(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i)
        scored[i] = {static_cast<double>(dot(entries_[i].vec, q)), i};
    std::size_t k = std::min(top_k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + k, scored.end(),
                      [](const auto& a, const auto& b) {
                          if (a.first != b.first) return a.first > b.first;
                          return a.second < b.second;
                      });

    std::vector<SearchHit> hits;
    hits.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        const Entry& e = entries_[scored[i].second];
        const CorpusDocument& doc = docs_[e.doc];
        SearchHit hit;
        hit.doc_id = doc.doc_id;
        hit.item = e.item;
        hit.modality = e.modality;
        hit.score = scored[i].first;
        hit.content =
            e.modality == ItemKind::text ? doc.chunks[e.item].text : doc.images[e.item].caption;
        hits.push_back(std::move(hit));
    }
    return hits;
}

bool CorpusIndex::has_document(const std::string& doc_id) const {
    auto it = std::lower_bound(
        docs_.begin(), docs_.end(), doc_id,
        [](const CorpusDocument& d, const std::string& id) { return d.doc_id < id; });
    return it != docs_.end() && it->doc_id == doc_id;
}

const CorpusDocument& CorpusIndex::visit(const std::string& doc_id) const {
    auto it = std::lower_bound(
        docs_.begin(), docs_.end(), doc_id,
        [](const CorpusDocument& d, const std::string& id) { return d.doc_id < id; });
    if (it == docs_.end() || it->doc_id != doc_id)
        throw CorpusError("unknown document: " + doc_id);
    return *it;
}

} // namespace kgbench
