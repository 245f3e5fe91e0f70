#include "docsync/cli.hpp"

#include "docsync/agent.hpp"
#include "docsync/corpus.hpp"
#include "docsync/errors.hpp"
#include "docsync/jsonl.hpp"
#include "test_support.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace docsync;
using nlohmann::json;

namespace {

struct TempDir {
    std::filesystem::path dir;
    TempDir() {
        static int counter = 0;
        dir = std::filesystem::path("docsync_cli_test_" + std::to_string(counter++));
        std::filesystem::create_directories(dir);
    }
    ~TempDir() { std::filesystem::remove_all(dir); }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

std::string corpus_line(const std::string& id, const std::string& code,
                        const std::string& doc) {
    return json{{"id", id}, {"code", code}, {"docstring", doc}, {"language", "python"}}.dump() +
           "\n";
}

std::string small_corpus() {
    return corpus_line("c1", "def add(a, b):\n    return a + b",
                       "Adds two numbers. Returns their sum as given.") +
           corpus_line("c2", "def sub(a, b):\n    return a - b",
                       "Subtracts b from a. The result may be negative.") +
           corpus_line("c3", "def neg(a):\n    return -a", "Negates a value.");
}

std::size_t count_lines(const std::string& path) {
    std::ifstream in(path);
    std::string line;
    std::size_t count = 0;
    while (std::getline(in, line)) {
        if (!line.empty()) ++count;
    }
    return count;
}

} // namespace

TEST_CASE("config file parsing with overrides and validation") {
    TempDir tmp;
    std::string path = tmp.path("docsync.toml");
    write_file(path,
               "# config\n"
               "endpoint_url = \"http://127.0.0.1:9999/v1\"\n"
               "model_name = test-model\n"
               "max_retries = 4\n"
               "retrieval_k = 7\n"
               "temperature = 0.5\n"
               "embedder_dimension = 128\n");
    PipelineConfig config = load_config(path);
    CHECK(config.backend.endpoint_url == "http://127.0.0.1:9999/v1");
    CHECK(config.backend.model_name == "test-model");
    CHECK(config.max_retries == 4);
    CHECK(config.retrieval_k == 7);
    CHECK(config.backend.temperature == 0.5);
    CHECK(config.embedder.dimension == 128);
    // defaults hold where the file is silent
    CHECK(config.source_token_cap == 256);
    CHECK(config.target_token_cap == 96);
    CHECK(config.backend.max_new_tokens == 96);
}

TEST_CASE("config rejects unknown keys and bad values") {
    TempDir tmp;
    std::string path = tmp.path("bad.toml");
    write_file(path, "definitely_not_a_key = 1\n");
    CHECK_THROWS_AS(load_config(path), DataError);

    write_file(path, "max_retries = not-a-number\n");
    CHECK_THROWS_AS(load_config(path), DataError);

    write_file(path, "source_token_cap = 0\n");
    CHECK_THROWS_AS(load_config(path), DataError);
}

TEST_CASE("environment variables override config values") {
    TempDir tmp;
    std::string path = tmp.path("env.toml");
    write_file(path, "max_retries = 1\n");
    setenv("DOCSYNC_MAX_RETRIES", "5", 1);
    PipelineConfig config = load_config(path);
    unsetenv("DOCSYNC_MAX_RETRIES");
    CHECK(config.max_retries == 5);
}

TEST_CASE("critic backend inherits the generator backend settings") {
    TempDir tmp;
    std::string path = tmp.path("critic.toml");
    write_file(path,
               "endpoint_url = \"http://127.0.0.1:9999/v1\"\n"
               "model_name = gen\n"
               "critic_model_name = crit\n");
    PipelineConfig config = load_config(path);
    REQUIRE(config.critic_backend.has_value());
    CHECK(config.critic_backend->model_name == "crit");
    // inherited from the main backend at the time the critic key appeared
    CHECK(config.critic_backend->endpoint_url == "http://127.0.0.1:9999/v1");
}

TEST_CASE("cmd_simulate writes one case per record") {
    TempDir tmp;
    write_file(tmp.path("corpus.jsonl"), small_corpus());
    std::size_t written =
        cmd_simulate(tmp.path("corpus.jsonl"), tmp.path("cases.jsonl"), std::nullopt);
    CHECK(written == 3);
    auto cases = load_drift_cases(tmp.path("cases.jsonl"));
    REQUIRE(cases.size() == 3);
    CHECK(cases[0].doc_stale == "Adds two numbers.");
    CHECK(cases[0].code_old == cases[0].code_new);
}

TEST_CASE("cmd_simulate limit 0 writes an empty file") {
    TempDir tmp;
    write_file(tmp.path("corpus.jsonl"), small_corpus());
    CHECK(cmd_simulate(tmp.path("corpus.jsonl"), tmp.path("cases.jsonl"), 0) == 0);
    CHECK(std::filesystem::exists(tmp.path("cases.jsonl")));
    CHECK(count_lines(tmp.path("cases.jsonl")) == 0);
}

TEST_CASE("cmd_simulate leaves no partial output on corrupt input") {
    TempDir tmp;
    write_file(tmp.path("corpus.jsonl"),
               corpus_line("a", "x = 1", "Doc.") + "this is not json\n");
    CHECK_THROWS_AS(cmd_simulate(tmp.path("corpus.jsonl"), tmp.path("cases.jsonl"), std::nullopt),
                    DataError);
    CHECK_FALSE(std::filesystem::exists(tmp.path("cases.jsonl")));
}

TEST_CASE("cmd_ingest validates and optionally re-emits") {
    TempDir tmp;
    write_file(tmp.path("corpus.jsonl"), small_corpus());
    CHECK(cmd_ingest(tmp.path("corpus.jsonl"), 2, std::nullopt) == 2);
    CHECK(cmd_ingest(tmp.path("corpus.jsonl"), std::nullopt, tmp.path("copy.jsonl")) == 3);
    CHECK(load_corpus(tmp.path("copy.jsonl")).size() == 3);
}

TEST_CASE("cmd_index builds a loadable store") {
    TempDir tmp;
    write_file(tmp.path("corpus.jsonl"), small_corpus());
    PipelineConfig config = default_config();
    std::size_t chunks =
        cmd_index(tmp.path("corpus.jsonl"), tmp.path("store.jsonl"), 600, config);
    CHECK(chunks == 3);
    VectorStore store = VectorStore::load(tmp.path("store.jsonl"), make_embedder(config));
    CHECK(store.size() == 3);
}

TEST_CASE("cmd_ast prints the rendered summary") {
    TempDir tmp;
    write_file(tmp.path("mod.py"),
               "def connect(host, port):\n    return 1\n\nclass DB:\n    pass\n");
    CHECK(cmd_ast(tmp.path("mod.py"), "python") == "def connect(host, port) | class DB");
}

TEST_CASE("cmd_classify reports relevance and kind") {
    TempDir tmp;
    write_file(tmp.path("old.py"), "def f(a):\n    return a\n");
    write_file(tmp.path("new.py"), "def f(a, b):\n    return a\n");
    RelevanceDecision decision = cmd_classify(tmp.path("old.py"), tmp.path("new.py"));
    CHECK(decision.relevant);
    CHECK(decision.drift.kind == DriftKind::ParameterFlux);
}

TEST_CASE("cmd_repair with a mock fixture is deterministic") {
    TempDir tmp;
    write_file(tmp.path("corpus.jsonl"), small_corpus());
    cmd_simulate(tmp.path("corpus.jsonl"), tmp.path("cases.jsonl"), std::nullopt);

    // Simulated cases have code_old == code_new, so the gate returns the
    // stale doc with zero backend calls; the fixture can stay empty.
    write_file(tmp.path("mock.txt"), "");
    PipelineConfig config = default_config();
    RepairOptions options;
    options.mock_fixture = tmp.path("mock.txt");

    RepairSummary summary =
        cmd_repair(tmp.path("cases.jsonl"), tmp.path("traces.jsonl"), config, options);
    CHECK(summary.cases == 3);
    CHECK(summary.relevant == 0);
    CHECK(summary.errors == 0);

    std::ifstream first(tmp.path("traces.jsonl"));
    std::string bytes1((std::istreambuf_iterator<char>(first)), {});
    cmd_repair(tmp.path("cases.jsonl"), tmp.path("traces2.jsonl"), config, options);
    std::ifstream second(tmp.path("traces2.jsonl"));
    std::string bytes2((std::istreambuf_iterator<char>(second)), {});
    CHECK(bytes1 == bytes2);
    CHECK_FALSE(bytes1.empty());
}

TEST_CASE("cmd_repair runs the loop for relevant cases") {
    TempDir tmp;
    // hand-built case with a real signature change
    DriftCase dc;
    dc.id = "x1";
    dc.code_old = "def f(a):\n    return a\n";
    dc.code_new = "def f(a, b):\n    return a + b\n";
    dc.doc_stale = "Returns a.";
    dc.doc_ref = "Returns a. And more.";
    write_file(tmp.path("cases.jsonl"), to_json(dc).dump() + "\n");
    write_file(tmp.path("mock.txt"), "Adds a and b.\nGOOD\n");

    PipelineConfig config = default_config();
    RepairOptions options;
    options.mock_fixture = tmp.path("mock.txt");
    RepairSummary summary =
        cmd_repair(tmp.path("cases.jsonl"), tmp.path("traces.jsonl"), config, options);
    CHECK(summary.relevant == 1);
    CHECK(summary.accepted == 1);
    CHECK(summary.retries_exhausted == 0);

    std::vector<RunTrace> traces;
    for_each_jsonl(tmp.path("traces.jsonl"), [&](std::size_t line, const json& obj) {
        traces.push_back(trace_from_json(obj, line));
        return true;
    });
    REQUIRE(traces.size() == 1);
    CHECK(traces[0].draft_final == "Adds a and b.");
}

TEST_CASE("cmd_repair aborts on backend failure without --keep-going") {
    TempDir tmp;
    DriftCase dc;
    dc.id = "x1";
    dc.code_old = "def f(a):\n    return a\n";
    dc.code_new = "def f(a, b):\n    return a + b\n";
    dc.doc_stale = "Returns a.";
    dc.doc_ref = "Returns a.";
    write_file(tmp.path("cases.jsonl"), to_json(dc).dump() + "\n" +
                                            json{{"id", "x2"},
                                                 {"code_old", dc.code_old},
                                                 {"code_new", dc.code_new},
                                                 {"doc_stale", dc.doc_stale},
                                                 {"doc_ref", dc.doc_ref}}
                                                .dump() +
                                            "\n");
    write_file(tmp.path("mock.txt"), ""); // exhausted immediately
    PipelineConfig config = default_config();
    RepairOptions options;
    options.mock_fixture = tmp.path("mock.txt");
    CHECK_THROWS_AS(
        cmd_repair(tmp.path("cases.jsonl"), tmp.path("traces.jsonl"), config, options),
        BackendError);
    // the error trace is persisted for diagnosis
    CHECK(count_lines(tmp.path("traces.jsonl")) == 1);
}

TEST_CASE("cmd_repair writes traces in case order under concurrency") {
    TempDir tmp;
    // 12 relevant cases served over HTTP by several workers at once.
    std::string cases;
    for (int i = 0; i < 12; ++i) {
        json dc{{"id", "case-" + std::to_string(i)},
                {"code_old", "def f(a):\n    return a"},
                {"code_new", "def f(a, b):\n    return a + b"},
                {"doc_stale", "Returns a."},
                {"doc_ref", "Returns a. More."}};
        cases += dc.dump() + "\n";
    }
    write_file(tmp.path("cases.jsonl"), cases);

    docsync_test::TestServer server(
        [](const httplib::Request& req, httplib::Response& res) {
            json body = json::parse(req.body);
            std::string system = body["messages"][0]["content"];
            std::string reply =
                system.find("GOOD") != std::string::npos ? "GOOD" : "Adds a and b.";
            res.set_content(docsync_test::chat_body(reply), "application/json");
        });

    PipelineConfig config = default_config();
    config.backend.endpoint_url = server.endpoint();
    config.backend.model_name = "m";
    config.backend.max_retries_network = 0;

    RepairOptions options;
    options.workers = 4;
    RepairSummary summary =
        cmd_repair(tmp.path("cases.jsonl"), tmp.path("traces.jsonl"), config, options);
    CHECK(summary.cases == 12);
    CHECK(summary.accepted == 12);

    std::vector<std::string> ids;
    for_each_jsonl(tmp.path("traces.jsonl"), [&](std::size_t line, const json& obj) {
        ids.push_back(trace_from_json(obj, line).case_id);
        return true;
    });
    REQUIRE(ids.size() == 12);
    for (int i = 0; i < 12; ++i) {
        CHECK(ids[i] == "case-" + std::to_string(i));
    }
}

TEST_CASE("cmd_normalize cleans draft fields in place") {
    TempDir tmp;
    json trace{{"case_id", "a"},
               {"draft_initial", "\"\"\" Raw draft."},
               {"draft_final", "Done. Done."}};
    write_file(tmp.path("in.jsonl"), trace.dump() + "\n");
    CHECK(cmd_normalize(tmp.path("in.jsonl"), tmp.path("out.jsonl"), 96) == 1);

    for_each_jsonl(tmp.path("out.jsonl"), [&](std::size_t, const json& obj) {
        CHECK(obj["draft_initial"] == "Raw draft.");
        CHECK(obj["draft_final"] == "Done.");
        return true;
    });
}

TEST_CASE("cmd_eval scores stale docs at summary_exact 1.0") {
    TempDir tmp;
    write_file(tmp.path("corpus.jsonl"), small_corpus());
    cmd_simulate(tmp.path("corpus.jsonl"), tmp.path("cases.jsonl"), std::nullopt);

    // Build traces whose final draft is the stale doc (the gate output).
    write_file(tmp.path("mock.txt"), "");
    PipelineConfig config = default_config();
    RepairOptions repair_options;
    repair_options.mock_fixture = tmp.path("mock.txt");
    cmd_repair(tmp.path("cases.jsonl"), tmp.path("traces.jsonl"), config, repair_options);

    EvalOptions eval_options;
    EvalResult result = cmd_eval(tmp.path("traces.jsonl"), tmp.path("cases.jsonl"),
                                 tmp.path("eval.jsonl"), config, eval_options);
    REQUIRE(result.systems.size() == 1);
    CHECK(result.systems[0].report.mean_summary_exact == 1.0);
    // at least one reference has a second sentence, so BLEU < 1
    CHECK(result.systems[0].report.mean_bleu4 < 1.0);
    CHECK(result.systems[0].report.mean_bleu4 > 0.0);
    CHECK(result.scored == 3);
}

TEST_CASE("cmd_eval with --compare emits initial and final systems") {
    TempDir tmp;
    DriftCase dc;
    dc.id = "c1";
    dc.code_old = "def f(a):\n    return a\n";
    dc.code_new = "def f(a, b):\n    return a + b\n";
    dc.doc_stale = "Adds things.";
    dc.doc_ref = "Adds a and b. Returns the sum.";
    write_file(tmp.path("cases.jsonl"), to_json(dc).dump() + "\n");
    write_file(tmp.path("mock.txt"), "Adds things roughly.\nBAD: vague\nAdds a and b.\nGOOD\n");

    PipelineConfig config = default_config();
    RepairOptions repair_options;
    repair_options.mock_fixture = tmp.path("mock.txt");
    cmd_repair(tmp.path("cases.jsonl"), tmp.path("traces.jsonl"), config, repair_options);

    EvalOptions eval_options;
    eval_options.compare = true;
    EvalResult result = cmd_eval(tmp.path("traces.jsonl"), tmp.path("cases.jsonl"),
                                 tmp.path("eval.jsonl"), config, eval_options);
    REQUIRE(result.systems.size() == 2);
    CHECK(result.systems[0].name == "DocSync (Initial)");
    CHECK(result.systems[1].name == "DocSync (Final)");
    CHECK(result.tables.find("DocSync (Initial)") != std::string::npos);
    CHECK(result.tables.find("DocSync (Final)") != std::string::npos);

    // the eval file carries per-system score lines plus aggregates
    std::size_t aggregates = 0, examples = 0;
    for_each_jsonl(tmp.path("eval.jsonl"), [&](std::size_t, const json& obj) {
        if (obj.value("aggregate", false)) {
            ++aggregates;
        } else {
            ++examples;
        }
        return true;
    });
    CHECK(aggregates == 2);
    CHECK(examples == 2);
}

TEST_CASE("max_retries 0 forces attempts to 0 in every trace") {
    TempDir tmp;
    DriftCase dc;
    dc.id = "x1";
    dc.code_old = "def f(a):\n    return a\n";
    dc.code_new = "def f(a, b):\n    return a + b\n";
    dc.doc_stale = "Returns a.";
    dc.doc_ref = "Returns a.";
    write_file(tmp.path("cases.jsonl"), to_json(dc).dump() + "\n");
    write_file(tmp.path("mock.txt"), "draft A\nBAD: whatever\n");

    PipelineConfig config = default_config();
    RepairOptions options;
    options.mock_fixture = tmp.path("mock.txt");
    options.max_retries = 0;
    cmd_repair(tmp.path("cases.jsonl"), tmp.path("traces.jsonl"), config, options);
    for_each_jsonl(tmp.path("traces.jsonl"), [&](std::size_t, const json& obj) {
        CHECK(obj["attempts"] == 0);
        return true;
    });
}

TEST_CASE("simulate -> repair --mock -> eval is byte-reproducible") {
    TempDir tmp;
    write_file(tmp.path("corpus.jsonl"), small_corpus());
    write_file(tmp.path("mock.txt"), "");
    PipelineConfig config = default_config();

    auto run_pipeline = [&](const std::string& tag) {
        cmd_simulate(tmp.path("corpus.jsonl"), tmp.path("cases_" + tag), std::nullopt);
        RepairOptions options;
        options.mock_fixture = tmp.path("mock.txt");
        cmd_repair(tmp.path("cases_" + tag), tmp.path("traces_" + tag), config, options);
        EvalOptions eval_options;
        eval_options.compare = true;
        cmd_eval(tmp.path("traces_" + tag), tmp.path("cases_" + tag), tmp.path("eval_" + tag),
                 config, eval_options);
        std::string bytes;
        for (const std::string& name : {"cases_" + tag, "traces_" + tag, "eval_" + tag}) {
            std::ifstream in(tmp.path(name), std::ios::binary);
            bytes.append((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        }
        return bytes;
    };
    CHECK(run_pipeline("a") == run_pipeline("b"));
}

TEST_CASE("cmd_eval errors when nothing matches") {
    TempDir tmp;
    write_file(tmp.path("corpus.jsonl"), small_corpus());
    json trace{{"case_id", "unknown"}, {"draft_final", "Doc."}, {"relevant", true}};
    write_file(tmp.path("traces.jsonl"), trace.dump() + "\n");
    PipelineConfig config = default_config();
    CHECK_THROWS_WITH_AS(cmd_eval(tmp.path("traces.jsonl"), tmp.path("corpus.jsonl"),
                                  tmp.path("eval.jsonl"), config, {}),
                         "no cases matched", DataError);
}

TEST_CASE("cmd_report renders rows from eval files") {
    TempDir tmp;
    json aggregate_row{{"aggregate", true}, {"system", "final"},    {"n", 3},
                       {"mean_bleu4", 0.5}, {"mean_emb_f1", 0.9},   {"mean_summary_exact", 1.0},
                       {"mean_judge", 3.0}, {"judge_ci_low", 2.5},  {"judge_ci_high", 3.5}};
    write_file(tmp.path("eval.jsonl"), aggregate_row.dump() + "\n");
    std::string table = cmd_report({tmp.path("eval.jsonl")}, {"mysystem"});
    CHECK(table.find("mysystem (final)") != std::string::npos);
    CHECK(table.find("0.500") != std::string::npos);
}
