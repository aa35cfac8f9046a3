#pragma once
// Local retrieval corpus: parsed markdown documents with image references,
// heading-aligned chunking, and a flat exact inner-product index over text
// and image vectors. The encoder lives outside; vectors arrive via a sidecar
// store keyed doc US {chunk|image} US ordinal.

#include "kgbench/vector_index.hpp"
#include "kgbench/vector_store.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace kgbench {

class CorpusError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct ImageRef {
    std::string path;
    std::string caption;

    bool operator==(const ImageRef& o) const { return path == o.path && caption == o.caption; }
};

struct Chunk {
    std::size_t chunk_id = 0; // ordinal within the document
    std::string text;
};

struct CorpusDocument {
    std::string doc_id;
    std::string body; // parsed markdown, served verbatim by visit
    std::vector<ImageRef> images;
    std::vector<Chunk> chunks;

    // Stable content digest, recorded at ingest and comparable after visit.
    std::uint64_t digest() const;
};

// ![caption](path) occurrences in document order.
std::vector<ImageRef> parse_image_refs(const std::string& markdown);

// Heading-aligned chunking: every line starting with '#' opens a new chunk;
// within a section, chunks are cut when the whitespace-token budget would be
// exceeded. No overlap. Blank-only chunks are dropped.
std::vector<Chunk> chunk_markdown(const std::string& markdown, std::size_t max_tokens);

// One document per *.md file (doc_id = file name without extension), files
// in lexicographic order. Bodies are kept verbatim.
std::vector<CorpusDocument> load_corpus_dir(const std::string& dir, std::size_t max_tokens);

// Vector-store keys for corpus items.
std::string chunk_vector_key(const std::string& doc_id, std::size_t ordinal);
std::string image_vector_key(const std::string& doc_id, std::size_t ordinal);

// Corpus items are either text chunks or images; distinct from the graph's
// finer-grained node modalities.
enum class ItemKind : std::uint8_t { text = 0, image };

inline std::string_view item_kind_name(ItemKind k) {
    return k == ItemKind::text ? "text" : "image";
}

struct SearchHit {
    std::string doc_id;
    std::size_t item = 0; // chunk ordinal or image ordinal
    ItemKind modality = ItemKind::text;
    double score = 0.0;
    std::string content; // chunk text, or the stored caption for images
};

// Flat exact inner-product index over all chunk and image vectors of a
// corpus. Vectors are unit-normalized at build so scores are cosines.
class CorpusIndex {
  public:
    // Every chunk and image must have a vector in the store, all of the
    // store's dimension; anything else is a build error.
    CorpusIndex(const std::vector<CorpusDocument>& docs, const VectorStore& vectors);

    std::size_t size() const { return entries_.size(); }
    std::size_t dim() const { return dim_; }

    // Top-k by inner product; ties broken by (doc_id, modality, item) so
    // results are deterministic. Empty index yields an empty list.
    std::vector<SearchHit> search(const std::vector<float>& query, std::size_t top_k) const;

    const CorpusDocument& visit(const std::string& doc_id) const; // not-found -> CorpusError
    bool has_document(const std::string& doc_id) const;
    const std::vector<CorpusDocument>& documents() const { return docs_; }

  private:
    struct Entry {
        std::size_t doc = 0; // index into docs_
        std::size_t item = 0;
        ItemKind modality = ItemKind::text;
        std::vector<float> vec;
    };

    std::vector<CorpusDocument> docs_;
    std::vector<Entry> entries_; // sorted by (doc_id, modality, item)
    std::size_t dim_ = 0;
};

} // namespace kgbench
