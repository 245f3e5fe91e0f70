#pragma once

#include "docsync/corpus.hpp"

#include <memory>
#include <string>
#include <vector>

namespace docsync {

// One embedded documentation chunk. Vectors are unit L2 norm.
struct DocChunk {
    std::string chunk_id;
    std::string source_id;
    std::string text;
    std::vector<float> vector;
};

struct ScoredChunk {
    DocChunk chunk;
    double score = 0.0; // cosine similarity, non-increasing within a context
};

struct RetrievedContext {
    std::vector<ScoredChunk> chunks;
};

// Splits docstrings on paragraph boundaries and greedily packs paragraphs
// into chunks of at most max_chars (paragraphs longer than max_chars are
// word-split). Returned chunks are unembedded.
std::vector<DocChunk> chunk_corpus(const std::vector<CorpusRecord>& records,
                                   std::size_t max_chars);

class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::string id() const = 0;
    virtual std::size_t dimension() const = 0;
    // One unit vector per input text.
    virtual std::vector<std::vector<float>> embed(const std::vector<std::string>& texts) = 0;
};

// Deterministic, network-free embedder: hashed bag-of-words term
// frequencies over a fixed dimension, L2-normalized. Texts with no tokens
// map to the first basis vector.
class HashedBowEmbedder : public Embedder {
public:
    explicit HashedBowEmbedder(std::size_t dimension = 256);
    std::string id() const override;
    std::size_t dimension() const override { return dimension_; }
    std::vector<std::vector<float>> embed(const std::vector<std::string>& texts) override;

private:
    std::size_t dimension_;
};

// Exact-scan cosine index over embedded chunks. Build once, then retrieve
// concurrently; retrieval before build throws.
class VectorStore {
public:
    explicit VectorStore(std::shared_ptr<Embedder> embedder);

    void build(std::vector<DocChunk> chunks); // embeds chunks lacking vectors
    RetrievedContext retrieve(const std::string& query, std::size_t k) const;

    void save(const std::string& path) const;
    static VectorStore load(const std::string& path, std::shared_ptr<Embedder> embedder);

    bool built() const { return built_; }
    std::size_t size() const { return chunks_.size(); }

private:
    std::shared_ptr<Embedder> embedder_;
    std::vector<DocChunk> chunks_;
    bool built_ = false;
};

} // namespace docsync
