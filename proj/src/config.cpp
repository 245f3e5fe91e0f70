#include "docsync/config.hpp"

#include "docsync/errors.hpp"
#include "docsync/textutil.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace docsync {

namespace {

long parse_long(const std::string& value, const std::string& key) {
    try {
        std::size_t pos = 0;
        long parsed = std::stol(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw DataError("config: key " + key + " expects an integer, got \"" + value + "\"");
    }
}

double parse_double(const std::string& value, const std::string& key) {
    try {
        std::size_t pos = 0;
        double parsed = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw DataError("config: key " + key + " expects a number, got \"" + value + "\"");
    }
}

std::string unquote(std::string value) {
    if (value.size() >= 2 && ((value.front() == '"' && value.back() == '"') ||
                              (value.front() == '\'' && value.back() == '\''))) {
        return value.substr(1, value.size() - 2);
    }
    return value;
}

// One setter per known key; shared by file parsing and env overrides.
using Setter = std::function<void(PipelineConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> map = {
        {"endpoint_url", [](PipelineConfig& c, const std::string& v) { c.backend.endpoint_url = v; }},
        {"model_name", [](PipelineConfig& c, const std::string& v) { c.backend.model_name = v; }},
        {"api_key_env", [](PipelineConfig& c, const std::string& v) { c.backend.api_key_env = v; }},
        {"max_new_tokens",
         [](PipelineConfig& c, const std::string& v) {
             c.backend.max_new_tokens = static_cast<int>(parse_long(v, "max_new_tokens"));
         }},
        {"temperature",
         [](PipelineConfig& c, const std::string& v) {
             c.backend.temperature = parse_double(v, "temperature");
         }},
        {"timeout_ms",
         [](PipelineConfig& c, const std::string& v) {
             c.backend.timeout = std::chrono::milliseconds(parse_long(v, "timeout_ms"));
         }},
        {"max_retries_network",
         [](PipelineConfig& c, const std::string& v) {
             c.backend.max_retries_network =
                 static_cast<int>(parse_long(v, "max_retries_network"));
         }},
        {"critic_endpoint_url",
         [](PipelineConfig& c, const std::string& v) {
             if (!c.critic_backend) c.critic_backend = c.backend;
             c.critic_backend->endpoint_url = v;
         }},
        {"critic_model_name",
         [](PipelineConfig& c, const std::string& v) {
             if (!c.critic_backend) c.critic_backend = c.backend;
             c.critic_backend->model_name = v;
         }},
        {"critic_api_key_env",
         [](PipelineConfig& c, const std::string& v) {
             if (!c.critic_backend) c.critic_backend = c.backend;
             c.critic_backend->api_key_env = v;
         }},
        {"embedder",
         [](PipelineConfig& c, const std::string& v) {
             if (v != "deterministic-local" && v != "remote") {
                 throw DataError("config: embedder must be deterministic-local or remote");
             }
             c.embedder.kind = v;
         }},
        {"embedder_dimension",
         [](PipelineConfig& c, const std::string& v) {
             c.embedder.dimension = static_cast<std::size_t>(parse_long(v, "embedder_dimension"));
         }},
        {"embedder_model",
         [](PipelineConfig& c, const std::string& v) { c.embedder.model = v; }},
        {"max_retries",
         [](PipelineConfig& c, const std::string& v) {
             c.max_retries = static_cast<int>(parse_long(v, "max_retries"));
         }},
        {"retrieval_k",
         [](PipelineConfig& c, const std::string& v) {
             c.retrieval_k = static_cast<std::size_t>(parse_long(v, "retrieval_k"));
         }},
        {"source_token_cap",
         [](PipelineConfig& c, const std::string& v) {
             c.source_token_cap = static_cast<std::size_t>(parse_long(v, "source_token_cap"));
         }},
        {"target_token_cap",
         [](PipelineConfig& c, const std::string& v) {
             c.target_token_cap = static_cast<std::size_t>(parse_long(v, "target_token_cap"));
         }},
        {"seed",
         [](PipelineConfig& c, const std::string& v) {
             c.seed = static_cast<std::uint64_t>(parse_long(v, "seed"));
         }},
        {"system_prompt_file",
         [](PipelineConfig& c, const std::string& v) { c.system_prompt_file = v; }},
        {"critic_prompt_file",
         [](PipelineConfig& c, const std::string& v) { c.critic_prompt_file = v; }},
        {"judge_prompt_file",
         [](PipelineConfig& c, const std::string& v) { c.judge_prompt_file = v; }},
    };
    return map;
}

} // namespace

PipelineConfig default_config() {
    PipelineConfig config;
    config.backend.api_key_env = "OPENAI_API_KEY";
    return config;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path + ": cannot open config file");

    PipelineConfig config = default_config();
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw DataError(path + ": line " + std::to_string(lineno) + ": expected key = value");
        }
        std::string key = trim(stripped.substr(0, eq));
        std::string value = unquote(trim(stripped.substr(eq + 1)));
        auto it = setters().find(key);
        if (it == setters().end()) {
            throw DataError(path + ": line " + std::to_string(lineno) + ": unknown key " + key);
        }
        it->second(config, value);
    }
    apply_env_overrides(config);
    validate(config);
    return config;
}

void apply_env_overrides(PipelineConfig& config) {
    for (const auto& [key, setter] : setters()) {
        std::string env_name = "DOCSYNC_" + key;
        for (char& c : env_name) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        const char* value = std::getenv(env_name.c_str());
        if (value && *value) setter(config, value);
    }
}

void validate(const PipelineConfig& config) {
    if (config.backend.max_new_tokens < 1) throw DataError("config: max_new_tokens must be >= 1");
    if (config.backend.timeout.count() <= 0) throw DataError("config: timeout_ms must be > 0");
    if (config.backend.max_retries_network < 0) {
        throw DataError("config: max_retries_network must be >= 0");
    }
    if (config.max_retries < 0) throw DataError("config: max_retries must be >= 0");
    if (config.source_token_cap < 1) throw DataError("config: source_token_cap must be >= 1");
    if (config.target_token_cap < 1) throw DataError("config: target_token_cap must be >= 1");
    if (config.embedder.dimension < 1) throw DataError("config: embedder_dimension must be >= 1");
    if (config.embedder.kind == "remote" && config.embedder.model.empty()) {
        throw DataError("config: remote embedder requires embedder_model");
    }
}

std::shared_ptr<Embedder> make_embedder(const PipelineConfig& config) {
    if (config.embedder.kind == "remote") {
        return std::make_shared<RemoteEmbedder>(config.backend, config.embedder.model,
                                                config.embedder.dimension);
    }
    return std::make_shared<HashedBowEmbedder>(config.embedder.dimension);
}

std::string load_prompt_override(const std::string& path) {
    if (path.empty()) return {};
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(path + ": cannot open prompt file");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return trim(buffer.str());
}

} // namespace docsync
