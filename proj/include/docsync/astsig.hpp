#pragma once

#include <string>
#include <vector>

namespace docsync {

// Linearized signature summary injected into prompts.
struct SignatureSummary {
    std::vector<std::string> entries; // source order, "def f(a, b)" / "class C"
    std::string rendered;             // entries joined by " | "
    bool parse_degraded = false;      // best-effort extraction from broken source
};

// Structured view of one parameter: star prefix ("", "*" or "**"), bare
// name, and the annotation text when present in source.
struct ParamSig {
    std::string star;
    std::string name;
    std::string annotation;
};

struct DefSig {
    std::string qualified_name; // nested defs and methods joined with '.'
    std::vector<ParamSig> params;
    std::string return_annotation; // "" when absent
};

// Per-source signature facts; `entries` carries the rendered order while
// defs/classes give the impact module structured access.
struct SourceSignatures {
    std::vector<std::string> entries;
    std::vector<DefSig> defs;
    std::vector<std::string> classes; // qualified class names
    bool degraded = false;
};

// Python-only structural scan. Tolerant of broken source: whatever parsed
// is returned with `degraded` set.
SourceSignatures parse_signatures(const std::string& source);

// Throws UsageError for unsupported languages ("python" is supported).
SignatureSummary extract_signatures(const std::string& source, const std::string& language);

} // namespace docsync
