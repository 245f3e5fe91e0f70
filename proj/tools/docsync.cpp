#include "docsync/cli.hpp"

#include "docsync/errors.hpp"
#include "docsync/impact.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

namespace {

// Exit codes: 0 success, 1 usage error, 2 data error, 3 backend error.
constexpr int kUsageExit = 1;
constexpr int kDataExit = 2;
constexpr int kBackendExit = 3;

docsync::PipelineConfig resolve_config(const std::string& config_path) {
    std::string path = config_path;
    if (path.empty()) {
        const char* env = std::getenv("DOCSYNC_CONFIG");
        if (env && *env) path = env;
    }
    if (path.empty()) {
        docsync::PipelineConfig config = docsync::default_config();
        docsync::apply_env_overrides(config);
        docsync::validate(config);
        return config;
    }
    return docsync::load_config(path);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"docsync - documentation drift detection, repair, and evaluation"};
    app.require_subcommand(1);
    app.fallthrough(); // lets subcommands pass --config up to the app

    std::string config_path;
    app.add_option("--config", config_path, "config file (flat key = value)");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "validate a corpus file");
    std::string ingest_corpus, ingest_out;
    std::size_t ingest_limit = 0;
    bool ingest_has_limit = false;
    ingest->add_option("--corpus", ingest_corpus, "corpus JSONL file")->required();
    ingest->add_option("--limit", ingest_limit, "validate only the first N records")
        ->each([&](const std::string&) { ingest_has_limit = true; });
    ingest->add_option("--out", ingest_out, "re-emit validated records to this file");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "manufacture drift cases from a corpus");
    std::string sim_corpus, sim_out;
    std::size_t sim_limit = 0;
    bool sim_has_limit = false;
    simulate->add_option("--corpus", sim_corpus, "corpus JSONL file")->required();
    simulate->add_option("--out", sim_out, "drift-case output file")->required();
    simulate->add_option("--limit", sim_limit, "use only the first N records")
        ->each([&](const std::string&) { sim_has_limit = true; });

    // index
    auto* index = app.add_subcommand("index", "build a retrieval store from a corpus");
    std::string index_corpus, index_out;
    std::size_t index_max_chars = 600;
    index->add_option("--corpus", index_corpus, "corpus JSONL file")->required();
    index->add_option("--out", index_out, "store output file")->required();
    index->add_option("--max-chars", index_max_chars, "chunk size limit (default 600)");

    // ast
    auto* ast = app.add_subcommand("ast", "print the signature summary of a source file");
    std::string ast_file, ast_language = "python";
    ast->add_option("--file", ast_file, "source file")->required();
    ast->add_option("--language", ast_language, "source language (default python)");

    // classify
    auto* classify = app.add_subcommand("classify", "classify the change between two files");
    std::string classify_old, classify_new;
    classify->add_option("--old", classify_old, "old source file")->required();
    classify->add_option("--new", classify_new, "new source file")->required();

    // repair
    auto* repair = app.add_subcommand("repair", "run the update loop over drift cases");
    std::string repair_cases, repair_out, repair_mock, repair_store;
    int repair_max_retries = -1;
    std::size_t repair_workers = 0;
    bool repair_keep_going = false;
    repair->add_option("--cases", repair_cases, "drift-case JSONL file")->required();
    repair->add_option("--out", repair_out, "trace output file")->required();
    repair->add_option("--max-retries", repair_max_retries, "refinement bound (default config)");
    repair->add_option("--mock", repair_mock, "scripted backend fixture instead of HTTP");
    repair->add_option("--store", repair_store, "retrieval store file");
    repair->add_option("--workers", repair_workers, "worker count (default CPU count)");
    repair->add_flag("--keep-going", repair_keep_going, "continue past failed cases");

    // normalize
    auto* norm = app.add_subcommand("normalize", "clean draft fields of a trace file");
    std::string norm_in, norm_out;
    norm->add_option("--in", norm_in, "trace JSONL file")->required();
    norm->add_option("--out", norm_out, "output file")->required();

    // eval
    auto* eval = app.add_subcommand("eval", "score traces against references");
    std::string eval_traces, eval_refs, eval_out;
    bool eval_judge = false, eval_compare = false;
    eval->add_option("--traces", eval_traces, "trace JSONL file")->required();
    eval->add_option("--refs", eval_refs, "references (corpus or cases file)")->required();
    eval->add_option("--out", eval_out, "score output file")->required();
    eval->add_flag("--judge", eval_judge, "also run the 1-5 judge");
    eval->add_flag("--compare", eval_compare, "score initial and final drafts");

    // report
    auto* report = app.add_subcommand("report", "render tables from eval output files");
    std::vector<std::string> report_evals, report_names;
    report->add_option("--eval", report_evals, "eval output file (repeatable)")->required();
    report->add_option("--name", report_names, "display name per eval file (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kUsageExit;
    }

    try {
        if (*ingest) {
            std::optional<std::size_t> limit;
            if (ingest_has_limit) limit = ingest_limit;
            std::optional<std::string> out;
            if (!ingest_out.empty()) out = ingest_out;
            std::cout << docsync::cmd_ingest(ingest_corpus, limit, out) << " records\n";
        } else if (*simulate) {
            std::optional<std::size_t> limit;
            if (sim_has_limit) limit = sim_limit;
            std::cout << docsync::cmd_simulate(sim_corpus, sim_out, limit) << " cases written\n";
        } else if (*index) {
            docsync::PipelineConfig config = resolve_config(config_path);
            std::cout << docsync::cmd_index(index_corpus, index_out, index_max_chars, config)
                      << " chunks indexed\n";
        } else if (*ast) {
            bool degraded = false;
            std::string rendered = docsync::cmd_ast(ast_file, ast_language, &degraded);
            if (degraded) std::cerr << "warning: parse degraded, summary is partial\n";
            std::cout << rendered << "\n";
        } else if (*classify) {
            docsync::RelevanceDecision decision = docsync::cmd_classify(classify_old, classify_new);
            nlohmann::json out{{"relevant", decision.relevant},
                               {"kind", docsync::to_string(decision.drift.kind)},
                               {"detail", decision.drift.detail}};
            std::cout << out.dump() << "\n";
        } else if (*repair) {
            docsync::PipelineConfig config = resolve_config(config_path);
            docsync::RepairOptions options;
            if (!repair_mock.empty()) options.mock_fixture = repair_mock;
            if (!repair_store.empty()) options.store_path = repair_store;
            if (repair_max_retries >= 0) options.max_retries = repair_max_retries;
            options.keep_going = repair_keep_going;
            options.workers = repair_workers;
            docsync::RepairSummary summary =
                docsync::cmd_repair(repair_cases, repair_out, config, options);
            nlohmann::json out{{"cases", summary.cases},
                               {"relevant", summary.relevant},
                               {"accepted", summary.accepted},
                               {"retries_exhausted", summary.retries_exhausted},
                               {"errors", summary.errors}};
            std::cout << out.dump() << "\n";
        } else if (*norm) {
            docsync::PipelineConfig config = resolve_config(config_path);
            std::cout << docsync::cmd_normalize(norm_in, norm_out, config.target_token_cap)
                      << " lines normalized\n";
        } else if (*eval) {
            docsync::PipelineConfig config = resolve_config(config_path);
            docsync::EvalOptions options;
            options.with_judge = eval_judge;
            options.compare = eval_compare;
            docsync::EvalResult result =
                docsync::cmd_eval(eval_traces, eval_refs, eval_out, config, options);
            std::cout << result.tables;
            std::cout << result.scored << " cases scored, " << result.skipped << " skipped\n";
        } else if (*report) {
            std::cout << docsync::cmd_report(report_evals, report_names);
        }
    } catch (const docsync::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsageExit;
    } catch (const docsync::BackendError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBackendExit;
    } catch (const docsync::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDataExit;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsageExit;
    }
    return 0;
}
