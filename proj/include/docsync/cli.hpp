#pragma once

#include "docsync/config.hpp"
#include "docsync/evalsuite.hpp"
#include "docsync/impact.hpp"

#include <optional>
#include <string>
#include <vector>

namespace docsync {

// Command implementations behind the docsync binary. Each writes outputs
// atomically (temp file + rename) and never mutates its inputs.

std::size_t cmd_ingest(const std::string& corpus_path, std::optional<std::size_t> limit,
                       const std::optional<std::string>& out_path);

std::size_t cmd_simulate(const std::string& corpus_path, const std::string& out_path,
                         std::optional<std::size_t> limit);

std::size_t cmd_index(const std::string& corpus_path, const std::string& out_path,
                      std::size_t max_chars, const PipelineConfig& config);

std::string cmd_ast(const std::string& file_path, const std::string& language,
                    bool* degraded = nullptr);

RelevanceDecision cmd_classify(const std::string& old_path, const std::string& new_path);

struct RepairSummary {
    std::size_t cases = 0;
    std::size_t relevant = 0;
    std::size_t accepted = 0;
    std::size_t retries_exhausted = 0;
    std::size_t errors = 0;
};

struct RepairOptions {
    std::optional<std::string> mock_fixture; // scripted backend instead of HTTP
    std::optional<std::string> store_path;   // retrieval store
    std::optional<int> max_retries;          // overrides config
    bool keep_going = false;
    std::size_t workers = 0; // 0: hardware concurrency (mock runs force 1)
};

RepairSummary cmd_repair(const std::string& cases_path, const std::string& out_path,
                         const PipelineConfig& config, const RepairOptions& options);

std::size_t cmd_normalize(const std::string& in_path, const std::string& out_path,
                          std::size_t max_tokens);

struct EvalOptions {
    bool with_judge = false;
    bool compare = false; // also score initial drafts and render the two-row table
};

struct EvalResult {
    std::vector<SystemRow> systems;
    std::string tables; // rendered text report
    std::size_t scored = 0;
    std::size_t skipped = 0; // unmatched ids or error traces
};

EvalResult cmd_eval(const std::string& traces_path, const std::string& refs_path,
                    const std::string& out_path, const PipelineConfig& config,
                    const EvalOptions& options);

// Renders tables from previously written eval files.
std::string cmd_report(const std::vector<std::string>& eval_paths,
                       const std::vector<std::string>& names);

} // namespace docsync
