#pragma once

#include "docsync/textutil.hpp"

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <string>
#include <vector>

namespace docsync {

// One code + reference-docstring pair, the unit of evaluation.
struct CorpusRecord {
    std::string id;
    std::string code;
    std::string docstring;
    std::string language = "python";
};

// A simulated drift instance: the stale doc is the reference truncated to
// its first sentence, and the code is unchanged (the proxy task).
struct DriftCase {
    std::string id;
    std::string code_old;
    std::string code_new;
    std::string doc_stale;
    std::string doc_ref;
};

// Loads a JSONL corpus file, validating every record. Stops after `limit`
// records when given. Malformed lines and duplicate ids abort the load with
// a DataError naming the line.
std::vector<CorpusRecord> load_corpus(const std::string& path,
                                      std::optional<std::size_t> limit = std::nullopt);

DriftCase simulate_drift(const CorpusRecord& record);

std::vector<DriftCase> load_drift_cases(const std::string& path);

nlohmann::json to_json(const CorpusRecord& record);
nlohmann::json to_json(const DriftCase& drift_case);

} // namespace docsync
