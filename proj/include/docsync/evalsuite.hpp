#pragma once

#include "docsync/backend.hpp"
#include "docsync/retrieval.hpp"

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <string>
#include <vector>

namespace docsync {

struct ExampleScore {
    std::string case_id;
    std::string system; // which system produced the candidate
    double bleu4 = 0.0;
    double emb_f1 = 0.0;
    int summary_exact = 0;
    std::optional<int> judge; // 1..5, absent when unparseable or not requested
};

struct AggregateReport {
    std::size_t n = 0;
    double mean_bleu4 = 0.0;
    double mean_emb_f1 = 0.0;
    double mean_summary_exact = 0.0;
    std::optional<double> mean_judge;
    std::optional<double> judge_ci_low;  // 95% normal approximation
    std::optional<double> judge_ci_high;
};

// Sentence-level BLEU with n-gram orders 1-4: geometric mean of modified
// precisions, add-one smoothing on any zero precision of order >= 2, times
// the standard brevity penalty. Tokens are lowercase runs split on
// whitespace and punctuation. Empty candidate scores 0; empty reference is
// an error.
double bleu4(const std::string& candidate, const std::string& reference);

// Greedy token-embedding matching: precision is the mean over candidate
// tokens of the max cosine to any reference token, recall symmetric, F1 the
// harmonic mean clipped to [0, 1].
double emb_f1(const std::string& candidate, const std::string& reference, Embedder& embedder);

// 1 iff the first sentences match after lowercasing and whitespace collapse.
int summary_exact(const std::string& candidate, const std::string& reference);

// First integer in 1..5 found in the response, else absent.
std::optional<int> parse_judge_score(const std::string& response);

std::optional<int> judge(const std::string& candidate, const std::string& code, Backend& backend,
                         const std::string& rubric = {});

// Means over present values; the judge CI is mean +/- 1.96*s/sqrt(n) with
// the sample standard deviation (a single value gives a zero-width CI).
// Throws DataError on an empty score list.
AggregateReport aggregate(const std::vector<ExampleScore>& scores);

struct SystemRow {
    std::string name;
    AggregateReport report;
};

// Text table: one row per system, columns BLEU / emb_f1 / Summary Exact /
// Judge with its CI. Preceded by a header line recording the metric choices.
std::string render_results_table(const std::vector<SystemRow>& rows);

nlohmann::json to_json(const ExampleScore& score);
nlohmann::json to_json(const AggregateReport& report, const std::string& system);

} // namespace docsync
