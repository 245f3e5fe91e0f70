#pragma once

#include "docsync/backend.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

namespace docsync {

struct EmbedderConfig {
    std::string kind = "deterministic-local"; // or "remote"
    std::size_t dimension = 256;
    std::string model; // remote embedding model name
};

struct PipelineConfig {
    BackendConfig backend;
    std::optional<BackendConfig> critic_backend;
    EmbedderConfig embedder;
    int max_retries = 2;
    std::size_t retrieval_k = 3;
    std::size_t source_token_cap = 256;
    std::size_t target_token_cap = 96;
    std::uint64_t seed = 0;
    std::string system_prompt_file; // optional overrides for the embedded prompts
    std::string critic_prompt_file;
    std::string judge_prompt_file;
};

// Flat key = value file, '#' comments, optional quotes around strings.
// Unknown keys are errors. Environment variables named DOCSYNC_<KEY> (key
// upper-cased) override file values; DOCSYNC_CONFIG overrides the path
// itself at the CLI layer.
PipelineConfig load_config(const std::string& path);
PipelineConfig default_config();
void apply_env_overrides(PipelineConfig& config);
void validate(const PipelineConfig& config);

// Builds the configured embedder ("deterministic-local" needs no network).
std::shared_ptr<Embedder> make_embedder(const PipelineConfig& config);

// Reads a prompt override file when configured, else returns empty (callers
// fall back to the embedded default).
std::string load_prompt_override(const std::string& path);

} // namespace docsync
