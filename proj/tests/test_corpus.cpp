#include "docsync/corpus.hpp"

#include "docsync/errors.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <random>
#include <string>

using namespace docsync;
using nlohmann::json;

namespace {

// RAII temp file seeded with the given content.
struct TempFile {
    std::string path;
    explicit TempFile(const std::string& content, const char* tag = "corpus") {
        static int counter = 0;
        path = std::string("docsync_test_") + tag + std::to_string(counter++) + ".jsonl";
        std::ofstream out(path, std::ios::binary);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

std::string record_line(const std::string& id, const std::string& doc) {
    json obj{{"id", id}, {"code", "def f(a):\n    return a"}, {"docstring", doc},
             {"language", "python"}};
    return obj.dump() + "\n";
}

} // namespace

TEST_CASE("load_corpus reads valid lines in order") {
    TempFile file(record_line("a", "Doc a.") + record_line("b", "Doc b.") +
                  record_line("c", "Doc c."));
    auto records = load_corpus(file.path);
    REQUIRE(records.size() == 3);
    CHECK(records[0].id == "a");
    CHECK(records[2].docstring == "Doc c.");
}

TEST_CASE("load_corpus honors the limit as a prefix") {
    TempFile file(record_line("a", "Doc a.") + record_line("b", "Doc b.") +
                  record_line("c", "Doc c."));
    auto records = load_corpus(file.path, 2);
    REQUIRE(records.size() == 2);
    CHECK(records[0].id == "a");
    CHECK(records[1].id == "b");
}

TEST_CASE("load_corpus reports a missing field with its line") {
    json bad{{"id", "b"}, {"code", "x = 1"}, {"language", "python"}};
    TempFile file(record_line("a", "Doc a.") + bad.dump() + "\n");
    CHECK_THROWS_WITH_AS(load_corpus(file.path), "line 2: missing field docstring", DataError);
}

TEST_CASE("load_corpus rejects duplicate ids by name") {
    TempFile file(record_line("dup", "Doc a.") + record_line("dup", "Doc b."));
    try {
        load_corpus(file.path);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("dup") != std::string::npos);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("load_corpus rejects empty required fields") {
    TempFile file(record_line("a", "   "));
    CHECK_THROWS_AS(load_corpus(file.path), DataError);
}

TEST_CASE("load_corpus ignores unknown fields") {
    json obj{{"id", "a"}, {"code", "x = 1"}, {"docstring", "Doc."}, {"language", "python"},
             {"extra", 42}};
    TempFile file(obj.dump() + "\n");
    CHECK(load_corpus(file.path).size() == 1);
}

TEST_CASE("load_corpus is deterministic") {
    TempFile file(record_line("a", "Doc a.") + record_line("b", "Doc b."));
    auto first = load_corpus(file.path, 2);
    auto second = load_corpus(file.path, 2);
    REQUIRE(first.size() == second.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(first[i].id == second[i].id);
        CHECK(first[i].docstring == second[i].docstring);
    }
}

TEST_CASE("simulate_drift truncates to the first sentence") {
    CorpusRecord record{"r1", "def f():\n    pass", "Smooth signal y. Radius sets the window.",
                        "python"};
    DriftCase dc = simulate_drift(record);
    CHECK(dc.doc_stale == "Smooth signal y.");
    CHECK(dc.doc_ref == record.docstring);
    CHECK(dc.code_old == record.code);
    CHECK(dc.code_new == record.code);
}

TEST_CASE("simulate_drift is identity on single-sentence docs") {
    CorpusRecord record{"r1", "x = 1", "Creates a wrapped environment.", "python"};
    DriftCase dc = simulate_drift(record);
    CHECK(dc.doc_stale == dc.doc_ref);
}

TEST_CASE("doc_ref always starts with doc_stale") {
    std::mt19937 rng(11);
    const char* words[] = {"alpha", "beta", "gamma", "delta", "eps"};
    for (int round = 0; round < 200; ++round) {
        std::string doc;
        int sentences = 1 + static_cast<int>(rng() % 4);
        for (int s = 0; s < sentences; ++s) {
            int len = 1 + static_cast<int>(rng() % 5);
            for (int w = 0; w < len; ++w) {
                if (!doc.empty()) doc += ' ';
                doc += words[rng() % 5];
            }
            doc += '.';
        }
        CorpusRecord record{"id", "x = 1", doc, "python"};
        DriftCase dc = simulate_drift(record);
        CHECK(dc.doc_ref.rfind(dc.doc_stale, 0) == 0);
    }
}

TEST_CASE("drift case round-trips through JSONL") {
    CorpusRecord record{"r1", "def f():\n    pass", "First. Second.", "python"};
    DriftCase dc = simulate_drift(record);
    TempFile file(to_json(dc).dump() + "\n", "cases");
    auto cases = load_drift_cases(file.path);
    REQUIRE(cases.size() == 1);
    CHECK(cases[0].id == dc.id);
    CHECK(cases[0].code_new == dc.code_new);
    CHECK(cases[0].doc_stale == dc.doc_stale);
    CHECK(cases[0].doc_ref == dc.doc_ref);
}
