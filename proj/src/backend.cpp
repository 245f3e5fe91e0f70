#include "docsync/backend.hpp"

#include "docsync/errors.hpp"
#include "docsync/textutil.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <thread>

namespace docsync {

using nlohmann::json;

namespace {

// "https://host:1234/v1" -> {"https://host:1234", "/v1"}
std::pair<std::string, std::string> split_endpoint(const std::string& url) {
    std::size_t scheme = url.find("://");
    if (scheme == std::string::npos) {
        throw UsageError("endpoint_url must include a scheme: " + url);
    }
    std::size_t path = url.find('/', scheme + 3);
    if (path == std::string::npos) return {url, ""};
    std::string base = url.substr(path);
    while (!base.empty() && base.back() == '/') base.pop_back();
    return {url.substr(0, path), base};
}

std::string decode_fixture_line(const std::string& line) {
    std::string out;
    out.reserve(line.size());
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '\\' && i + 1 < line.size()) {
            char next = line[i + 1];
            if (next == 'n') {
                out.push_back('\n');
                ++i;
                continue;
            }
            if (next == '\\') {
                out.push_back('\\');
                ++i;
                continue;
            }
        }
        out.push_back(line[i]);
    }
    return out;
}

std::string truncate_body(const std::string& body) {
    constexpr std::size_t kMax = 200;
    if (body.size() <= kMax) return body;
    return body.substr(0, kMax) + "...";
}

bool is_definition_line(const std::string& line) {
    std::string t = trim(line);
    return t.rfind("def ", 0) == 0 || t.rfind("class ", 0) == 0 || t.rfind("async def ", 0) == 0 ||
           t.rfind("@", 0) == 0;
}

} // namespace

HttpBackend::HttpBackend(BackendConfig config) : config_(std::move(config)) {
    if (config_.max_new_tokens < 1) throw UsageError("max_new_tokens must be >= 1");
    if (config_.timeout.count() <= 0) throw UsageError("timeout must be positive");
    auto parts = split_endpoint(config_.endpoint_url);
    scheme_host_ = parts.first;
    base_path_ = parts.second;
}

std::string HttpBackend::post_json(const std::string& path, const std::string& body) {
    std::string full_path = base_path_ + path;
    httplib::Headers headers;
    if (!config_.api_key_env.empty()) {
        const char* key = std::getenv(config_.api_key_env.c_str());
        if (key && *key) headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    int attempts = config_.max_retries_network + 1;
    std::string last_error;
    int last_status = 0;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) {
            auto delay = std::chrono::milliseconds(250) * (1 << std::min(attempt - 1, 4));
            std::this_thread::sleep_for(delay);
        }
        httplib::Client client(scheme_host_);
        auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
        client.set_connection_timeout(std::max<long>(1, seconds.count()), 0);
        client.set_read_timeout(std::max<long>(1, seconds.count()), 0);
        client.set_write_timeout(std::max<long>(1, seconds.count()), 0);

        auto res = client.Post(full_path, headers, body, "application/json");
        if (!res) {
            last_error = "connection failed: " + httplib::to_string(res.error());
            last_status = 0;
            continue;
        }
        if (res->status >= 200 && res->status < 300) return res->body;
        last_status = res->status;
        last_error = "HTTP " + std::to_string(res->status) + " from " + scheme_host_ + full_path +
                     ": " + truncate_body(res->body);
    }
    throw BackendError(last_error, last_status);
}

Completion HttpBackend::complete(const std::string& system, const std::string& user) {
    json body{{"model", config_.model_name},
              {"messages",
               json::array({json{{"role", "system"}, {"content", system}},
                            json{{"role", "user"}, {"content", user}}})},
              {"max_tokens", config_.max_new_tokens},
              {"temperature", config_.temperature}};

    std::string response = post_json("/chat/completions", body.dump());
    json payload = json::parse(response, nullptr, false);
    if (payload.is_discarded()) {
        throw BackendError("malformed response body: " + truncate_body(response));
    }
    auto choices = payload.find("choices");
    if (choices == payload.end() || !choices->is_array() || choices->empty()) {
        throw BackendError("response has no choices: " + truncate_body(response));
    }
    const json& first = (*choices)[0];
    Completion completion;
    if (first.contains("message") && first["message"].contains("content") &&
        first["message"]["content"].is_string()) {
        completion.text = first["message"]["content"].get<std::string>();
    } else {
        throw BackendError("response missing choices[0].message.content: " +
                           truncate_body(response));
    }
    std::string reason = first.value("finish_reason", "stop");
    completion.finish_reason = reason == "length" ? FinishReason::length : FinishReason::stop;
    if (payload.contains("usage") && payload["usage"].is_object()) {
        completion.usage_prompt_tokens = payload["usage"].value("prompt_tokens", 0L);
        completion.usage_completion_tokens = payload["usage"].value("completion_tokens", 0L);
    } else {
        completion.usage_prompt_tokens =
            static_cast<long>(count_whitespace_tokens(system) + count_whitespace_tokens(user));
        completion.usage_completion_tokens =
            static_cast<long>(count_whitespace_tokens(completion.text));
        if (completion.finish_reason == FinishReason::length) {
            completion.usage_completion_tokens =
                std::max<long>(completion.usage_completion_tokens, config_.max_new_tokens);
        }
    }
    return completion;
}

std::vector<std::vector<float>> HttpBackend::embed_texts(const std::vector<std::string>& texts,
                                                         const std::string& model) {
    if (texts.empty()) return {};
    json body{{"model", model}, {"input", texts}};
    std::string response = post_json("/embeddings", body.dump());
    json payload = json::parse(response, nullptr, false);
    if (payload.is_discarded() || !payload.contains("data") || !payload["data"].is_array()) {
        throw BackendError("malformed embeddings response: " + truncate_body(response));
    }
    std::vector<std::vector<float>> out(texts.size());
    for (const json& item : payload["data"]) {
        std::size_t index = item.value("index", out.size());
        if (index >= out.size() || !item.contains("embedding")) {
            throw BackendError("malformed embeddings response: bad data entry");
        }
        std::vector<float> v = item["embedding"].get<std::vector<float>>();
        double norm = 0.0;
        for (float x : v) norm += static_cast<double>(x) * x;
        norm = std::sqrt(norm);
        if (norm > 0) {
            for (float& x : v) x = static_cast<float>(x / norm);
        }
        out[index] = std::move(v);
    }
    for (const auto& v : out) {
        if (v.empty()) throw BackendError("embeddings response missing entries");
    }
    return out;
}

MockBackend::MockBackend(std::vector<std::string> script) : script_(std::move(script)) {}

std::shared_ptr<MockBackend> MockBackend::from_fixture(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(path + ": cannot open fixture");
    std::vector<std::string> script;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        script.push_back(decode_fixture_line(line));
    }
    return std::make_shared<MockBackend>(std::move(script));
}

Completion MockBackend::complete(const std::string& system, const std::string& user) {
    std::lock_guard<std::mutex> lock(mutex_);
    requests_.emplace_back(system, user);
    if (next_ >= script_.size()) {
        throw BackendError("mock script exhausted at call " + std::to_string(requests_.size()));
    }
    Completion completion;
    completion.text = script_[next_++];
    completion.usage_completion_tokens =
        static_cast<long>(count_whitespace_tokens(completion.text));
    completion.usage_prompt_tokens =
        static_cast<long>(count_whitespace_tokens(system) + count_whitespace_tokens(user));
    return completion;
}

std::size_t MockBackend::calls() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return requests_.size();
}

std::vector<std::pair<std::string, std::string>> MockBackend::requests() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return requests_;
}

RemoteEmbedder::RemoteEmbedder(BackendConfig config, std::string model, std::size_t dimension)
    : http_(std::move(config)), model_(std::move(model)), dimension_(dimension) {}

std::vector<std::vector<float>> RemoteEmbedder::embed(const std::vector<std::string>& texts) {
    auto vectors = http_.embed_texts(texts, model_);
    for (const auto& v : vectors) {
        if (v.size() != dimension_) {
            throw BackendError("remote embedder returned dimension " + std::to_string(v.size()) +
                               ", expected " + std::to_string(dimension_));
        }
    }
    return vectors;
}

std::string cap_code_payload(const std::string& code, std::size_t budget) {
    if (budget == 0) return "";
    if (count_whitespace_tokens(code) <= budget) return code;

    // Pathologically small budgets: plain head cut.
    std::vector<TextSpan> token_spans = whitespace_token_spans(code);
    if (budget < 8) {
        std::string out;
        for (std::size_t i = 0; i < budget; ++i) {
            if (i) out += ' ';
            out += code.substr(token_spans[i].begin, token_spans[i].end - token_spans[i].begin);
        }
        return out;
    }

    std::vector<std::string> lines;
    {
        std::size_t pos = 0;
        while (pos <= code.size()) {
            std::size_t nl = code.find('\n', pos);
            if (nl == std::string::npos) {
                lines.push_back(code.substr(pos));
                break;
            }
            lines.push_back(code.substr(pos, nl - pos));
            pos = nl + 1;
        }
    }
    std::vector<std::size_t> line_tokens(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        line_tokens[i] = count_whitespace_tokens(lines[i]);
    }

    constexpr std::size_t kMarkerTokens = 2; // "# ..."
    std::vector<bool> keep(lines.size(), false);
    std::size_t used = 0;

    // Definition lines anchor the API surface.
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (is_definition_line(lines[i]) && used + line_tokens[i] + kMarkerTokens <= budget) {
            keep[i] = true;
            used += line_tokens[i];
        }
    }
    // Fill from the head, then from the tail.
    std::size_t head_budget = used + (budget - used) * 3 / 5;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (keep[i]) continue;
        if (used + line_tokens[i] + kMarkerTokens > head_budget) break;
        keep[i] = true;
        used += line_tokens[i];
    }
    for (std::size_t i = lines.size(); i-- > 0;) {
        if (keep[i]) continue;
        if (used + line_tokens[i] + kMarkerTokens > budget) break;
        keep[i] = true;
        used += line_tokens[i];
    }

    std::string out;
    bool in_gap = false;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (!keep[i]) {
            in_gap = true;
            continue;
        }
        if (in_gap && !out.empty()) out += "# ...\n";
        in_gap = false;
        out += lines[i];
        out += '\n';
    }
    if (!out.empty() && out.back() == '\n') out.pop_back();

    // Markers around several kept islands can nudge the count past the
    // budget; enforce the bound with a plain token cut when that happens.
    std::vector<TextSpan> out_tokens = whitespace_token_spans(out);
    if (out_tokens.size() > budget) {
        out = out.substr(0, out_tokens[budget - 1].end);
    }
    return out;
}

} // namespace docsync
