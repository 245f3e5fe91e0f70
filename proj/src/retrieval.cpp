#include "docsync/retrieval.hpp"

#include "docsync/errors.hpp"
#include "docsync/jsonl.hpp"
#include "docsync/textutil.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>

namespace docsync {

using nlohmann::json;

namespace {

std::vector<std::string> split_paragraphs(const std::string& text) {
    std::vector<std::string> paragraphs;
    std::string cur;
    std::size_t pos = 0;
    auto flush = [&]() {
        std::string t = trim(cur);
        if (!t.empty()) paragraphs.push_back(std::move(t));
        cur.clear();
    };
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string line =
            nl == std::string::npos ? text.substr(pos) : text.substr(pos, nl - pos);
        if (trim(line).empty()) {
            flush();
        } else {
            if (!cur.empty()) cur += '\n';
            cur += line;
        }
        if (nl == std::string::npos) break;
        pos = nl + 1;
    }
    flush();
    return paragraphs;
}

// Splits an oversized paragraph into word-packed pieces of at most max_chars.
std::vector<std::string> split_long_paragraph(const std::string& para, std::size_t max_chars) {
    std::vector<std::string> pieces;
    std::string cur;
    for (const std::string& word : whitespace_tokens(para)) {
        if (word.size() > max_chars) {
            if (!cur.empty()) {
                pieces.push_back(cur);
                cur.clear();
            }
            for (std::size_t off = 0; off < word.size(); off += max_chars) {
                pieces.push_back(word.substr(off, max_chars));
            }
            continue;
        }
        std::string candidate = cur.empty() ? word : cur + " " + word;
        if (candidate.size() <= max_chars) {
            cur = std::move(candidate);
        } else {
            pieces.push_back(cur);
            cur = word;
        }
    }
    if (!cur.empty()) pieces.push_back(cur);
    return pieces;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

void l2_normalize(std::vector<float>& v) {
    double norm = 0.0;
    for (float x : v) norm += static_cast<double>(x) * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) {
        if (!v.empty()) v[0] = 1.0f;
        return;
    }
    for (float& x : v) x = static_cast<float>(x / norm);
}

double dot(const std::vector<float>& a, const std::vector<float>& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += static_cast<double>(a[i]) * b[i];
    return sum;
}

} // namespace

std::vector<DocChunk> chunk_corpus(const std::vector<CorpusRecord>& records,
                                   std::size_t max_chars) {
    if (max_chars < 64) throw UsageError("chunk_corpus: max_chars must be >= 64");
    std::vector<DocChunk> chunks;
    for (const CorpusRecord& rec : records) {
        std::vector<std::string> packed;
        std::string cur;
        for (const std::string& para : split_paragraphs(rec.docstring)) {
            if (para.size() > max_chars) {
                if (!cur.empty()) {
                    packed.push_back(cur);
                    cur.clear();
                }
                for (std::string& piece : split_long_paragraph(para, max_chars)) {
                    packed.push_back(std::move(piece));
                }
                continue;
            }
            std::string candidate = cur.empty() ? para : cur + "\n\n" + para;
            if (candidate.size() <= max_chars) {
                cur = std::move(candidate);
            } else {
                packed.push_back(cur);
                cur = para;
            }
        }
        if (!cur.empty()) packed.push_back(cur);

        for (std::size_t i = 0; i < packed.size(); ++i) {
            DocChunk chunk;
            chunk.chunk_id = rec.id + "#" + std::to_string(i);
            chunk.source_id = rec.id;
            chunk.text = std::move(packed[i]);
            chunks.push_back(std::move(chunk));
        }
    }
    return chunks;
}

HashedBowEmbedder::HashedBowEmbedder(std::size_t dimension) : dimension_(dimension) {
    if (dimension_ == 0) throw UsageError("embedder dimension must be positive");
}

std::string HashedBowEmbedder::id() const {
    return "hashed-bow-" + std::to_string(dimension_);
}

std::vector<std::vector<float>> HashedBowEmbedder::embed(const std::vector<std::string>& texts) {
    std::vector<std::vector<float>> out;
    out.reserve(texts.size());
    for (const std::string& text : texts) {
        std::vector<float> v(dimension_, 0.0f);
        for (const std::string& tok : metric_tokens(text)) {
            v[fnv1a(tok) % dimension_] += 1.0f;
        }
        l2_normalize(v);
        out.push_back(std::move(v));
    }
    return out;
}

VectorStore::VectorStore(std::shared_ptr<Embedder> embedder) : embedder_(std::move(embedder)) {
    if (!embedder_) throw UsageError("VectorStore requires an embedder");
}

void VectorStore::build(std::vector<DocChunk> chunks) {
    std::vector<std::string> pending_texts;
    std::vector<std::size_t> pending_idx;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        if (chunks[i].vector.empty()) {
            pending_texts.push_back(chunks[i].text);
            pending_idx.push_back(i);
        } else if (chunks[i].vector.size() != embedder_->dimension()) {
            throw DataError("chunk " + chunks[i].chunk_id + ": vector dimension mismatch");
        }
    }
    if (!pending_texts.empty()) {
        std::vector<std::vector<float>> vectors = embedder_->embed(pending_texts);
        for (std::size_t i = 0; i < pending_idx.size(); ++i) {
            chunks[pending_idx[i]].vector = std::move(vectors[i]);
        }
    }
    chunks_ = std::move(chunks);
    built_ = true;
}

RetrievedContext VectorStore::retrieve(const std::string& query, std::size_t k) const {
    if (!built_) throw Error("vector store not built");
    RetrievedContext ctx;
    if (k == 0 || chunks_.empty()) return ctx;

    std::vector<float> q = embedder_->embed({query})[0];
    std::vector<std::pair<double, const DocChunk*>> scored;
    scored.reserve(chunks_.size());
    for (const DocChunk& chunk : chunks_) {
        scored.emplace_back(dot(q, chunk.vector), &chunk);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second->chunk_id < b.second->chunk_id;
    });
    std::size_t take = std::min(k, scored.size());
    for (std::size_t i = 0; i < take; ++i) {
        ctx.chunks.push_back({*scored[i].second, scored[i].first});
    }
    return ctx;
}

void VectorStore::save(const std::string& path) const {
    if (!built_) throw Error("vector store not built");
    AtomicWriter writer(path);
    json header{{"dimension", embedder_->dimension()},
                {"embedder", embedder_->id()},
                {"chunks", chunks_.size()}};
    writer.write_line(header.dump());
    for (const DocChunk& chunk : chunks_) {
        json obj{{"chunk_id", chunk.chunk_id},
                 {"source_id", chunk.source_id},
                 {"text", chunk.text},
                 {"vector", chunk.vector}};
        writer.write_line(obj.dump());
    }
    writer.commit();
}

VectorStore VectorStore::load(const std::string& path, std::shared_ptr<Embedder> embedder) {
    VectorStore store(std::move(embedder));
    std::vector<DocChunk> chunks;
    bool saw_header = false;
    std::size_t declared = 0;
    for_each_jsonl(path, [&](std::size_t line, const json& obj) {
        if (!saw_header) {
            saw_header = true;
            std::size_t dim = obj.value("dimension", std::size_t{0});
            std::string id = obj.value("embedder", std::string{});
            declared = obj.value("chunks", std::size_t{0});
            if (dim != store.embedder_->dimension() || id != store.embedder_->id()) {
                throw DataError(path + ": store was built with embedder \"" + id +
                                "\" (dimension " + std::to_string(dim) +
                                "), configured embedder is \"" + store.embedder_->id() + "\"");
            }
            return true;
        }
        DocChunk chunk;
        chunk.chunk_id = require_string(obj, "chunk_id", line);
        chunk.source_id = require_string(obj, "source_id", line);
        chunk.text = require_string(obj, "text", line);
        auto vec = obj.find("vector");
        if (vec == obj.end() || !vec->is_array()) {
            throw DataError("line " + std::to_string(line) + ": missing field vector");
        }
        chunk.vector = vec->get<std::vector<float>>();
        if (chunk.vector.size() != store.embedder_->dimension()) {
            throw DataError("line " + std::to_string(line) + ": vector dimension mismatch");
        }
        chunks.push_back(std::move(chunk));
        return true;
    });
    if (!saw_header) throw DataError(path + ": empty store file");
    if (chunks.size() != declared) {
        throw DataError(path + ": header declares " + std::to_string(declared) +
                        " chunks, file has " + std::to_string(chunks.size()));
    }
    store.build(std::move(chunks));
    return store;
}

} // namespace docsync
