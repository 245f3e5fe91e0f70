#include "docsync/evalsuite.hpp"

#include "docsync/errors.hpp"
#include "docsync/prompts.hpp"
#include "docsync/textutil.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <unordered_map>

namespace docsync {

using nlohmann::json;

namespace {

std::unordered_map<std::string, int> ngram_counts(const std::vector<std::string>& tokens,
                                                  std::size_t n) {
    std::unordered_map<std::string, int> counts;
    if (tokens.size() < n) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string key;
        for (std::size_t j = 0; j < n; ++j) {
            if (j) key += '\x1f';
            key += tokens[i + j];
        }
        ++counts[key];
    }
    return counts;
}

double cosine(const std::vector<float>& a, const std::vector<float>& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += static_cast<double>(a[i]) * b[i];
    return sum;
}

std::string format_metric(double value) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(3) << value;
    return out.str();
}

} // namespace

double bleu4(const std::string& candidate, const std::string& reference) {
    std::vector<std::string> ref = metric_tokens(reference);
    if (ref.empty()) throw DataError("bleu4: empty reference");
    std::vector<std::string> cand = metric_tokens(candidate);
    if (cand.empty()) return 0.0;

    double log_sum = 0.0;
    for (std::size_t n = 1; n <= 4; ++n) {
        auto cand_counts = ngram_counts(cand, n);
        auto ref_counts = ngram_counts(ref, n);
        long total = cand.size() >= n ? static_cast<long>(cand.size() - n + 1) : 0;
        long matches = 0;
        for (const auto& [gram, count] : cand_counts) {
            auto it = ref_counts.find(gram);
            if (it != ref_counts.end()) matches += std::min(count, it->second);
        }
        double p;
        if (matches == 0) {
            if (n == 1) return 0.0; // no unigram overlap at all
            p = (matches + 1.0) / (total + 1.0);
        } else {
            p = static_cast<double>(matches) / static_cast<double>(total);
        }
        log_sum += std::log(p);
    }
    double geo_mean = std::exp(log_sum / 4.0);
    double bp = cand.size() > ref.size()
                    ? 1.0
                    : std::exp(1.0 - static_cast<double>(ref.size()) / cand.size());
    return bp * geo_mean;
}

double emb_f1(const std::string& candidate, const std::string& reference, Embedder& embedder) {
    std::vector<std::string> cand = metric_tokens(candidate);
    std::vector<std::string> ref = metric_tokens(reference);
    if (cand.empty() || ref.empty()) return 0.0;

    std::vector<std::string> all = cand;
    all.insert(all.end(), ref.begin(), ref.end());
    std::vector<std::vector<float>> vectors = embedder.embed(all);

    auto best_match_mean = [&](std::size_t from_begin, std::size_t from_count,
                               std::size_t to_begin, std::size_t to_count) {
        double sum = 0.0;
        for (std::size_t i = 0; i < from_count; ++i) {
            double best = -1.0;
            for (std::size_t j = 0; j < to_count; ++j) {
                best = std::max(best, cosine(vectors[from_begin + i], vectors[to_begin + j]));
            }
            sum += best;
        }
        return sum / static_cast<double>(from_count);
    };

    double precision = best_match_mean(0, cand.size(), cand.size(), ref.size());
    double recall = best_match_mean(cand.size(), ref.size(), 0, cand.size());
    if (precision + recall <= 0.0) return 0.0;
    double f1 = 2.0 * precision * recall / (precision + recall);
    return std::clamp(f1, 0.0, 1.0);
}

int summary_exact(const std::string& candidate, const std::string& reference) {
    if (trim(candidate).empty()) return 0;
    if (trim(reference).empty()) return 0;
    std::string cand_line = collapse_whitespace(to_lower(first_sentence(candidate)));
    std::string ref_line = collapse_whitespace(to_lower(first_sentence(reference)));
    return cand_line == ref_line ? 1 : 0;
}

std::optional<int> parse_judge_score(const std::string& response) {
    for (std::size_t i = 0; i < response.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(response[i]))) continue;
        std::size_t j = i;
        while (j < response.size() && std::isdigit(static_cast<unsigned char>(response[j]))) ++j;
        if (j - i == 1) {
            int value = response[i] - '0';
            if (value >= 1 && value <= 5) return value;
        }
        i = j; // skip integers outside 1..5 (e.g. "10/10")
    }
    return std::nullopt;
}

std::optional<int> judge(const std::string& candidate, const std::string& code, Backend& backend,
                         const std::string& rubric) {
    std::string system = rubric.empty() ? default_judge_prompt() : rubric;
    std::string user = "Code:\n" + code + "\n\nDocstring:\n" + candidate;
    Completion completion = backend.complete(system, user);
    return parse_judge_score(completion.text);
}

AggregateReport aggregate(const std::vector<ExampleScore>& scores) {
    if (scores.empty()) throw DataError("aggregate: empty score list");
    AggregateReport report;
    report.n = scores.size();

    double bleu_sum = 0.0, f1_sum = 0.0, exact_sum = 0.0;
    std::vector<double> judges;
    for (const ExampleScore& score : scores) {
        bleu_sum += score.bleu4;
        f1_sum += score.emb_f1;
        exact_sum += score.summary_exact;
        if (score.judge) judges.push_back(static_cast<double>(*score.judge));
    }
    report.mean_bleu4 = bleu_sum / report.n;
    report.mean_emb_f1 = f1_sum / report.n;
    report.mean_summary_exact = exact_sum / report.n;

    if (!judges.empty()) {
        double mean = 0.0;
        for (double j : judges) mean += j;
        mean /= judges.size();
        report.mean_judge = mean;
        if (judges.size() == 1) {
            report.judge_ci_low = mean;
            report.judge_ci_high = mean;
        } else {
            double ss = 0.0;
            for (double j : judges) ss += (j - mean) * (j - mean);
            double stddev = std::sqrt(ss / (judges.size() - 1));
            double half = 1.96 * stddev / std::sqrt(static_cast<double>(judges.size()));
            report.judge_ci_low = mean - half;
            report.judge_ci_high = mean + half;
        }
    }
    return report;
}

std::string render_results_table(const std::vector<SystemRow>& rows) {
    std::ostringstream out;
    out << "# sentence-level BLEU-4, macro-averaged; emb_f1 = greedy token-embedding "
           "match (BERTScore proxy); judge CI = 95% normal approximation\n";
    out << std::left << std::setw(24) << "Model" << std::setw(8) << "BLEU" << std::setw(26)
        << "emb_f1 (BERTScore proxy)" << std::setw(15) << "Summary Exact"
        << "Judge\n";
    for (const SystemRow& row : rows) {
        std::string judge_cell = "-";
        if (row.report.mean_judge) {
            std::ostringstream j;
            j << std::fixed << std::setprecision(2) << *row.report.mean_judge << " ["
              << *row.report.judge_ci_low << ", " << *row.report.judge_ci_high << "]";
            judge_cell = j.str();
        }
        out << std::left << std::setw(24) << row.name << std::setw(8)
            << format_metric(row.report.mean_bleu4) << std::setw(26)
            << format_metric(row.report.mean_emb_f1) << std::setw(15)
            << format_metric(row.report.mean_summary_exact) << judge_cell << "\n";
    }
    return out.str();
}

json to_json(const ExampleScore& score) {
    json obj{{"case_id", score.case_id},
             {"system", score.system},
             {"bleu4", score.bleu4},
             {"emb_f1", score.emb_f1},
             {"summary_exact", score.summary_exact}};
    if (score.judge) obj["judge"] = *score.judge;
    return obj;
}

json to_json(const AggregateReport& report, const std::string& system) {
    json obj{{"aggregate", true},
             {"system", system},
             {"n", report.n},
             {"mean_bleu4", report.mean_bleu4},
             {"mean_emb_f1", report.mean_emb_f1},
             {"mean_summary_exact", report.mean_summary_exact},
             {"bleu_aggregation", "macro"}};
    if (report.mean_judge) {
        obj["mean_judge"] = *report.mean_judge;
        obj["judge_ci_low"] = *report.judge_ci_low;
        obj["judge_ci_high"] = *report.judge_ci_high;
    }
    return obj;
}

} // namespace docsync
