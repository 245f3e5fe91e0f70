#include "docsync/cli.hpp"

#include "docsync/agent.hpp"
#include "docsync/astsig.hpp"
#include "docsync/corpus.hpp"
#include "docsync/errors.hpp"
#include "docsync/jsonl.hpp"
#include "docsync/normalize.hpp"
#include "docsync/textutil.hpp"

#include <nlohmann/json.hpp>

#include <condition_variable>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace docsync {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(path + ": cannot open file");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// References may come from a corpus file (docstring) or a cases file
// (doc_ref); both are JSONL keyed by id.
std::map<std::string, std::string> load_references(const std::string& path) {
    std::map<std::string, std::string> refs;
    for_each_jsonl(path, [&](std::size_t line, const json& obj) {
        std::string id = require_string(obj, "id", line);
        std::string text;
        if (obj.contains("doc_ref")) {
            text = require_string(obj, "doc_ref", line);
        } else {
            text = require_string(obj, "docstring", line);
        }
        refs[id] = std::move(text);
        return true;
    });
    return refs;
}

// Also pulls the code so the judge can see it; falls back to empty.
std::map<std::string, std::string> load_reference_code(const std::string& path) {
    std::map<std::string, std::string> code;
    for_each_jsonl(path, [&](std::size_t line, const json& obj) {
        std::string id = require_string(obj, "id", line);
        if (obj.contains("code_new")) {
            code[id] = obj["code_new"].is_string() ? obj["code_new"].get<std::string>() : "";
        } else if (obj.contains("code")) {
            code[id] = obj["code"].is_string() ? obj["code"].get<std::string>() : "";
        }
        return true;
    });
    return code;
}

} // namespace

std::size_t cmd_ingest(const std::string& corpus_path, std::optional<std::size_t> limit,
                       const std::optional<std::string>& out_path) {
    std::vector<CorpusRecord> records = load_corpus(corpus_path, limit);
    if (out_path) {
        AtomicWriter writer(*out_path);
        for (const CorpusRecord& rec : records) writer.write_line(to_json(rec).dump());
        writer.commit();
    }
    return records.size();
}

std::size_t cmd_simulate(const std::string& corpus_path, const std::string& out_path,
                         std::optional<std::size_t> limit) {
    std::vector<CorpusRecord> records = load_corpus(corpus_path, limit);
    AtomicWriter writer(out_path);
    for (const CorpusRecord& rec : records) {
        writer.write_line(to_json(simulate_drift(rec)).dump());
    }
    writer.commit();
    return records.size();
}

std::size_t cmd_index(const std::string& corpus_path, const std::string& out_path,
                      std::size_t max_chars, const PipelineConfig& config) {
    std::vector<CorpusRecord> records = load_corpus(corpus_path, std::nullopt);
    std::vector<DocChunk> chunks = chunk_corpus(records, max_chars);
    VectorStore store(make_embedder(config));
    store.build(std::move(chunks));
    store.save(out_path);
    return store.size();
}

std::string cmd_ast(const std::string& file_path, const std::string& language, bool* degraded) {
    SignatureSummary summary = extract_signatures(read_file(file_path), language);
    if (degraded) *degraded = summary.parse_degraded;
    return summary.rendered;
}

RelevanceDecision cmd_classify(const std::string& old_path, const std::string& new_path) {
    return is_relevant(diff(read_file(old_path), read_file(new_path)));
}

RepairSummary cmd_repair(const std::string& cases_path, const std::string& out_path,
                         const PipelineConfig& config, const RepairOptions& options) {
    std::vector<DriftCase> cases = load_drift_cases(cases_path);

    std::shared_ptr<Backend> generator;
    std::shared_ptr<Backend> critic;
    if (options.mock_fixture) {
        generator = MockBackend::from_fixture(*options.mock_fixture);
        critic = generator; // the script interleaves generation and critique
    } else {
        generator = std::make_shared<HttpBackend>(config.backend);
        if (config.critic_backend) {
            critic = std::make_shared<HttpBackend>(*config.critic_backend);
        } else {
            critic = generator;
        }
    }

    std::shared_ptr<Embedder> embedder;
    std::optional<VectorStore> store;
    if (options.store_path) {
        embedder = make_embedder(config);
        store.emplace(VectorStore::load(*options.store_path, embedder));
    }

    AgentDeps deps;
    deps.generator = generator.get();
    deps.critic = critic.get();
    deps.store = store ? &*store : nullptr;
    deps.retrieval_k = config.retrieval_k;
    deps.source_token_cap = config.source_token_cap;
    deps.target_token_cap = config.target_token_cap;
    deps.system_instruction = load_prompt_override(config.system_prompt_file);
    deps.critic_instruction = load_prompt_override(config.critic_prompt_file);
    int max_retries = options.max_retries.value_or(config.max_retries);

    // A scripted mock consumes responses in case order, so mock runs are
    // single-threaded to stay byte-reproducible.
    std::size_t workers = options.workers;
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    if (options.mock_fixture) workers = 1;
    workers = std::min(workers, cases.size() == 0 ? std::size_t{1} : cases.size());

    std::vector<RunTrace> traces(cases.size());
    std::vector<bool> done(cases.size(), false);
    std::mutex mutex;
    std::condition_variable cv;
    std::size_t next_case = 0;
    bool stop = false;

    auto work = [&]() {
        for (;;) {
            std::size_t index;
            {
                std::lock_guard<std::mutex> lock(mutex);
                if (stop || next_case >= cases.size()) return;
                index = next_case++;
            }
            RunTrace trace;
            try {
                trace = update_doc(cases[index], deps, max_retries);
            } catch (const std::exception& ex) {
                trace.case_id = cases[index].id;
                trace.error = ex.what();
            }
            {
                std::lock_guard<std::mutex> lock(mutex);
                traces[index] = std::move(trace);
                done[index] = true;
                if (!traces[index].error.empty() && !options.keep_going) stop = true;
            }
            cv.notify_all();
        }
    };

    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(work);

    // Traces are flushed in case order as they complete.
    RepairSummary summary;
    summary.cases = cases.size();
    AtomicWriter writer(out_path);
    std::string first_error;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        {
            std::unique_lock<std::mutex> lock(mutex);
            cv.wait(lock, [&] { return done[i] || (stop && !done[i] && i >= next_case); });
            if (!done[i]) break; // aborted before this case started
        }
        const RunTrace& trace = traces[i];
        writer.write_line(to_json(trace).dump());
        if (trace.relevant) ++summary.relevant;
        if (trace.accepted) ++summary.accepted;
        if (trace.relevant && !trace.accepted && trace.error.empty()) {
            ++summary.retries_exhausted;
        }
        if (!trace.error.empty()) {
            ++summary.errors;
            if (first_error.empty()) first_error = trace.error;
            if (!options.keep_going) break;
        }
    }
    for (std::thread& t : pool) t.join();
    writer.commit();

    if (!first_error.empty() && !options.keep_going) {
        throw BackendError("case failed: " + first_error);
    }
    return summary;
}

std::size_t cmd_normalize(const std::string& in_path, const std::string& out_path,
                          std::size_t max_tokens) {
    AtomicWriter writer(out_path);
    std::size_t count = 0;
    for_each_jsonl(in_path, [&](std::size_t, const json& obj) {
        json cleaned = obj;
        for (const char* field : {"draft_initial", "draft_final"}) {
            if (cleaned.contains(field) && cleaned[field].is_string()) {
                cleaned[field] = normalize(cleaned[field].get<std::string>(), max_tokens).text;
            }
        }
        writer.write_line(cleaned.dump());
        ++count;
        return true;
    });
    writer.commit();
    return count;
}

EvalResult cmd_eval(const std::string& traces_path, const std::string& refs_path,
                    const std::string& out_path, const PipelineConfig& config,
                    const EvalOptions& options) {
    std::map<std::string, std::string> refs = load_references(refs_path);
    std::map<std::string, std::string> code = load_reference_code(refs_path);

    std::vector<RunTrace> traces;
    for_each_jsonl(traces_path, [&](std::size_t line, const json& obj) {
        traces.push_back(trace_from_json(obj, line));
        return true;
    });

    std::shared_ptr<Embedder> embedder = make_embedder(config);
    std::shared_ptr<Backend> judge_backend;
    std::string judge_rubric;
    if (options.with_judge) {
        const BackendConfig& judge_config =
            config.critic_backend ? *config.critic_backend : config.backend;
        judge_backend = std::make_shared<HttpBackend>(judge_config);
        judge_rubric = load_prompt_override(config.judge_prompt_file);
    }

    struct SystemDef {
        std::string id;
        std::string display;
    };
    std::vector<SystemDef> systems;
    if (options.compare) systems.push_back({"initial", "DocSync (Initial)"});
    systems.push_back({"final", "DocSync (Final)"});

    EvalResult result;
    std::vector<std::vector<ExampleScore>> scores(systems.size());
    for (const RunTrace& trace : traces) {
        auto ref_it = refs.find(trace.case_id);
        if (ref_it == refs.end()) {
            std::cerr << "warning: case " << trace.case_id << " has no reference, skipping\n";
            ++result.skipped;
            continue;
        }
        if (!trace.error.empty()) {
            std::cerr << "warning: case " << trace.case_id << " carries an error trace, skipping\n";
            ++result.skipped;
            continue;
        }
        // Candidates get the generation cap; references are normalized
        // without truncation so ground truth is never cut.
        std::string reference =
            normalize(ref_it->second, std::numeric_limits<std::size_t>::max()).text;
        for (std::size_t s = 0; s < systems.size(); ++s) {
            const std::string& raw =
                systems[s].id == "initial" ? trace.draft_initial : trace.draft_final;
            std::string candidate = normalize(raw, config.target_token_cap).text;

            ExampleScore score;
            score.case_id = trace.case_id;
            score.system = systems[s].id;
            score.bleu4 = bleu4(candidate, reference);
            score.emb_f1 = emb_f1(candidate, reference, *embedder);
            score.summary_exact = summary_exact(candidate, reference);
            if (judge_backend) {
                auto code_it = code.find(trace.case_id);
                std::string case_code = code_it == code.end() ? std::string{} : code_it->second;
                score.judge = judge(candidate, case_code, *judge_backend, judge_rubric);
                if (!score.judge) {
                    std::cerr << "warning: case " << trace.case_id
                              << ": judge response had no score in 1..5, excluded\n";
                }
            }
            scores[s].push_back(std::move(score));
        }
        ++result.scored;
    }
    if (result.scored == 0) throw DataError("no cases matched");

    AtomicWriter writer(out_path);
    for (std::size_t s = 0; s < systems.size(); ++s) {
        for (const ExampleScore& score : scores[s]) writer.write_line(to_json(score).dump());
    }
    for (std::size_t s = 0; s < systems.size(); ++s) {
        AggregateReport report = aggregate(scores[s]);
        writer.write_line(to_json(report, systems[s].id).dump());
        result.systems.push_back({systems[s].display, report});
    }
    writer.commit();

    // Main table, plus the initial-vs-final sensitivity table when comparing.
    std::vector<SystemRow> main_rows(result.systems.rbegin(), result.systems.rend());
    result.tables = render_results_table(main_rows);
    if (options.compare) {
        result.tables += "\n";
        result.tables += render_results_table(result.systems);
    }
    return result;
}

std::string cmd_report(const std::vector<std::string>& eval_paths,
                       const std::vector<std::string>& names) {
    std::vector<SystemRow> rows;
    for (std::size_t i = 0; i < eval_paths.size(); ++i) {
        for_each_jsonl(eval_paths[i], [&](std::size_t, const json& obj) {
            if (!obj.value("aggregate", false)) return true;
            AggregateReport report;
            report.n = obj.value("n", std::size_t{0});
            report.mean_bleu4 = obj.value("mean_bleu4", 0.0);
            report.mean_emb_f1 = obj.value("mean_emb_f1", 0.0);
            report.mean_summary_exact = obj.value("mean_summary_exact", 0.0);
            if (obj.contains("mean_judge")) {
                report.mean_judge = obj["mean_judge"].get<double>();
                report.judge_ci_low = obj.value("judge_ci_low", 0.0);
                report.judge_ci_high = obj.value("judge_ci_high", 0.0);
            }
            std::string system = obj.value("system", std::string{"system"});
            std::string display = i < names.size() ? names[i] + " (" + system + ")"
                                                   : eval_paths[i] + " (" + system + ")";
            rows.push_back({display, report});
            return true;
        });
    }
    if (rows.empty()) throw DataError("no aggregate rows found in eval files");
    return render_results_table(rows);
}

} // namespace docsync
