#pragma once

#include "docsync/retrieval.hpp"

#include <chrono>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

namespace docsync {

struct BackendConfig {
    std::string endpoint_url;  // base URL, e.g. "http://127.0.0.1:8089/v1"
    std::string model_name;
    std::string api_key_env;   // name of the env var holding the key; may be empty
    int max_new_tokens = 96;
    double temperature = 0.0;
    std::chrono::milliseconds timeout{30000};
    int max_retries_network = 3;
};

enum class FinishReason { stop, length, error };

struct Completion {
    std::string text;
    FinishReason finish_reason = FinishReason::stop;
    long usage_prompt_tokens = 0;
    long usage_completion_tokens = 0;
};

// Opaque model access. The agent never distinguishes mock from live.
class Backend {
public:
    virtual ~Backend() = default;
    virtual Completion complete(const std::string& system, const std::string& user) = 0;
    virtual std::string name() const = 0;
};

// Chat-completions client over HTTP. Failures (transport errors and non-2xx
// statuses) are retried with exponential backoff up to max_retries_network
// before a BackendError surfaces.
class HttpBackend : public Backend {
public:
    explicit HttpBackend(BackendConfig config);

    Completion complete(const std::string& system, const std::string& user) override;
    std::string name() const override { return "http:" + config_.model_name; }

    // POST /embeddings with the same auth and retry policy. Vectors are
    // L2-normalized client-side.
    std::vector<std::vector<float>> embed_texts(const std::vector<std::string>& texts,
                                                const std::string& model);

    const BackendConfig& config() const { return config_; }

private:
    std::string post_json(const std::string& path, const std::string& body);

    BackendConfig config_;
    std::string scheme_host_; // "http://host:port"
    std::string base_path_;   // "" or "/v1"
};

// Scripted backend for deterministic tests: replays responses in order and
// records every request.
class MockBackend : public Backend {
public:
    explicit MockBackend(std::vector<std::string> script);

    // Fixture: UTF-8 file, one response per line, literal "\n" escapes.
    static std::shared_ptr<MockBackend> from_fixture(const std::string& path);

    Completion complete(const std::string& system, const std::string& user) override;
    std::string name() const override { return "mock"; }

    std::size_t calls() const;
    std::vector<std::pair<std::string, std::string>> requests() const;
    std::size_t capacity() const { return script_.size(); }

private:
    std::vector<std::string> script_;
    mutable std::mutex mutex_;
    std::size_t next_ = 0;
    std::vector<std::pair<std::string, std::string>> requests_;
};

// Embedder backed by a remote /embeddings endpoint.
class RemoteEmbedder : public Embedder {
public:
    RemoteEmbedder(BackendConfig config, std::string model, std::size_t dimension);
    std::string id() const override { return "remote:" + model_; }
    std::size_t dimension() const override { return dimension_; }
    std::vector<std::vector<float>> embed(const std::vector<std::string>& texts) override;

private:
    HttpBackend http_;
    std::string model_;
    std::size_t dimension_;
};

// Caps the code payload at `budget` whitespace tokens, dropping from the
// middle of the body. Lines introducing definitions are kept when they fall
// outside the head/tail windows, so the prompt keeps the API surface.
std::string cap_code_payload(const std::string& code, std::size_t budget);

} // namespace docsync
