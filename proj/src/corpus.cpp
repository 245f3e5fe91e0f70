#include "docsync/corpus.hpp"

#include "docsync/errors.hpp"
#include "docsync/jsonl.hpp"

#include <nlohmann/json.hpp>

#include <unordered_set>

namespace docsync {

using nlohmann::json;

std::vector<CorpusRecord> load_corpus(const std::string& path,
                                      std::optional<std::size_t> limit) {
    std::vector<CorpusRecord> records;
    std::unordered_set<std::string> seen_ids;
    if (limit && *limit == 0) return records;
    for_each_jsonl(path, [&](std::size_t line, const json& obj) {
        CorpusRecord rec;
        rec.id = require_string(obj, "id", line);
        rec.code = require_string(obj, "code", line);
        rec.docstring = require_string(obj, "docstring", line);
        rec.language = require_string(obj, "language", line);
        if (rec.id.empty()) throw DataError("line " + std::to_string(line) + ": empty field id");
        if (rec.code.empty()) {
            throw DataError("line " + std::to_string(line) + ": empty field code");
        }
        if (trim(rec.docstring).empty()) {
            throw DataError("line " + std::to_string(line) + ": empty field docstring");
        }
        if (!seen_ids.insert(rec.id).second) {
            throw DataError("line " + std::to_string(line) + ": duplicate id \"" + rec.id + "\"");
        }
        records.push_back(std::move(rec));
        return !limit || records.size() < *limit;
    });
    return records;
}

DriftCase simulate_drift(const CorpusRecord& record) {
    DriftCase dc;
    dc.id = record.id;
    dc.code_old = record.code;
    dc.code_new = record.code;
    dc.doc_stale = first_sentence(record.docstring);
    dc.doc_ref = record.docstring;
    return dc;
}

std::vector<DriftCase> load_drift_cases(const std::string& path) {
    std::vector<DriftCase> cases;
    std::unordered_set<std::string> seen_ids;
    for_each_jsonl(path, [&](std::size_t line, const json& obj) {
        DriftCase dc;
        dc.id = require_string(obj, "id", line);
        dc.code_old = require_string(obj, "code_old", line);
        dc.code_new = require_string(obj, "code_new", line);
        dc.doc_stale = require_string(obj, "doc_stale", line);
        dc.doc_ref = require_string(obj, "doc_ref", line);
        if (dc.code_new.empty()) {
            throw DataError("line " + std::to_string(line) + ": empty field code_new");
        }
        if (!seen_ids.insert(dc.id).second) {
            throw DataError("line " + std::to_string(line) + ": duplicate id \"" + dc.id + "\"");
        }
        cases.push_back(std::move(dc));
        return true;
    });
    return cases;
}

json to_json(const CorpusRecord& record) {
    return json{{"id", record.id},
                {"code", record.code},
                {"docstring", record.docstring},
                {"language", record.language}};
}

json to_json(const DriftCase& dc) {
    return json{{"id", dc.id},
                {"code_old", dc.code_old},
                {"code_new", dc.code_new},
                {"doc_stale", dc.doc_stale},
                {"doc_ref", dc.doc_ref}};
}

} // namespace docsync
