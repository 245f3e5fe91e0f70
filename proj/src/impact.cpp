#include "docsync/impact.hpp"

#include "docsync/astsig.hpp"
#include "docsync/pylex.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <vector>

namespace docsync {

namespace pl = pylex;

namespace {

std::vector<std::string> split_lines(const std::string& s) {
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t nl = s.find('\n', pos);
        if (nl == std::string::npos) {
            lines.push_back(s.substr(pos));
            break;
        }
        lines.push_back(s.substr(pos, nl - pos));
        pos = nl + 1;
    }
    return lines;
}

// Marks which lines of `b` belong to an LCS with `a`.
std::vector<bool> lcs_matched_in_new(const std::vector<std::string>& a,
                                     const std::vector<std::string>& b) {
    const std::size_t n = a.size(), m = b.size();
    std::vector<std::vector<int>> dp(n + 1, std::vector<int>(m + 1, 0));
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = m; j-- > 0;) {
            dp[i][j] = a[i] == b[j] ? dp[i + 1][j + 1] + 1
                                    : std::max(dp[i + 1][j], dp[i][j + 1]);
        }
    }
    std::vector<bool> matched(m, false);
    std::size_t i = 0, j = 0;
    while (i < n && j < m) {
        if (a[i] == b[j]) {
            matched[j] = true;
            ++i;
            ++j;
        } else if (dp[i + 1][j] >= dp[i][j + 1]) {
            ++i;
        } else {
            ++j;
        }
    }
    return matched;
}

using TokStream = std::vector<std::pair<pl::Kind, std::string>>;

enum StreamFilter : unsigned {
    DropComments = 1u << 0,
    DropDocstrings = 1u << 1,
};

TokStream filtered_stream(const std::vector<pl::Token>& toks, unsigned filter) {
    TokStream out;
    out.reserve(toks.size());
    for (const pl::Token& t : toks) {
        if ((filter & DropComments) && t.kind == pl::Kind::Comment) continue;
        if ((filter & DropDocstrings) && t.kind == pl::Kind::Str && t.stmt_start) continue;
        out.emplace_back(t.kind, t.text);
    }
    return out;
}

// Flattened token texts of all return expressions, in source order.
std::vector<std::string> return_streams(const std::vector<pl::Token>& toks) {
    std::vector<std::string> out;
    bool capturing = false;
    for (const pl::Token& t : toks) {
        if (t.kind == pl::Kind::Comment) continue;
        if (capturing && t.stmt_start) capturing = false;
        if (capturing) out.push_back(t.text);
        if (t.kind == pl::Kind::Name && t.text == "return") {
            capturing = true;
            out.push_back(";"); // separator between return expressions
        }
    }
    return out;
}

std::multiset<std::string> number_literals(const std::vector<pl::Token>& toks) {
    std::multiset<std::string> out;
    for (const pl::Token& t : toks) {
        if (t.kind == pl::Kind::Number) out.insert(t.text);
    }
    return out;
}

std::multiset<std::string> comparison_ops(const std::vector<pl::Token>& toks) {
    static const std::set<std::string> kCompare = {"<", "<=", ">", ">=", "==", "!="};
    std::multiset<std::string> out;
    for (const pl::Token& t : toks) {
        if (t.kind == pl::Kind::Op && kCompare.count(t.text)) out.insert(t.text);
    }
    return out;
}

int guard_keyword_count(const std::vector<pl::Token>& toks) {
    int count = 0;
    for (const pl::Token& t : toks) {
        if (t.kind == pl::Kind::Name && (t.text == "raise" || t.text == "assert")) ++count;
    }
    return count;
}

std::set<std::string> name_tokens(const std::vector<pl::Token>& toks) {
    std::set<std::string> out;
    for (const pl::Token& t : toks) {
        if (t.kind == pl::Kind::Name) out.insert(t.text);
    }
    return out;
}

// Identifiers whose first appearance suggests a new observable side effect.
const std::set<std::string>& side_effect_markers() {
    static const std::set<std::string> markers = {
        "print",   "open",    "write",   "writelines", "global", "nonlocal", "logging",
        "logger",  "cache",   "session", "commit",     "send",   "socket",   "requests",
        "setattr", "delattr", "exec",    "remove",     "unlink", "flush"};
    return markers;
}

std::string join_param_names(const DefSig& def) {
    std::string out;
    for (std::size_t i = 0; i < def.params.size(); ++i) {
        if (i) out += ", ";
        out += def.params[i].star + def.params[i].name;
    }
    return out;
}

} // namespace

const char* to_string(DriftKind kind) {
    switch (kind) {
    case DriftKind::ParameterFlux: return "ParameterFlux";
    case DriftKind::TypeMigration: return "TypeMigration";
    case DriftKind::ReturnValueDivergence: return "ReturnValueDivergence";
    case DriftKind::SideEffectIntroduction: return "SideEffectIntroduction";
    case DriftKind::ConstraintChange: return "ConstraintChange";
    case DriftKind::TutorialRot: return "TutorialRot";
    case DriftKind::Irrelevant: return "Irrelevant";
    }
    return "Irrelevant";
}

CodeDelta diff(const std::string& old_source, const std::string& new_source) {
    CodeDelta delta;
    delta.old_source = old_source;
    delta.new_source = new_source;
    if (old_source == new_source) return delta;

    std::vector<std::string> a = split_lines(old_source);
    std::vector<std::string> b = split_lines(new_source);
    std::vector<bool> matched = lcs_matched_in_new(a, b);

    for (std::size_t j = 0; j < b.size(); ++j) {
        if (matched[j]) continue;
        int line = static_cast<int>(j) + 1;
        if (!delta.changed_line_spans.empty() && delta.changed_line_spans.back().end == line - 1) {
            delta.changed_line_spans.back().end = line;
        } else {
            delta.changed_line_spans.push_back({line, line});
        }
    }
    return delta;
}

RelevanceDecision is_relevant(const CodeDelta& delta) {
    if (delta.old_source == delta.new_source) {
        return {false, {DriftKind::Irrelevant, "no textual change"}};
    }

    pl::LexResult old_lex = pl::lex(delta.old_source);
    pl::LexResult new_lex = pl::lex(delta.new_source);
    if (new_lex.degraded) {
        return {true, {DriftKind::Irrelevant, "new source did not lex cleanly; unknown, treat as relevant"}};
    }

    TokStream norm_old = filtered_stream(old_lex.tokens, DropComments | DropDocstrings);
    TokStream norm_new = filtered_stream(new_lex.tokens, DropComments | DropDocstrings);
    if (norm_old == norm_new) {
        if (filtered_stream(old_lex.tokens, 0) == filtered_stream(new_lex.tokens, 0)) {
            return {false, {DriftKind::Irrelevant, "whitespace only"}};
        }
        bool docs_equal = filtered_stream(old_lex.tokens, DropDocstrings) ==
                          filtered_stream(new_lex.tokens, DropDocstrings);
        bool comments_equal = filtered_stream(old_lex.tokens, DropComments) ==
                              filtered_stream(new_lex.tokens, DropComments);
        if (docs_equal) return {false, {DriftKind::Irrelevant, "docstring literal only"}};
        if (comments_equal) return {false, {DriftKind::Irrelevant, "comment only"}};
        return {false, {DriftKind::Irrelevant, "comment and docstring only"}};
    }

    // Relevant: classify with the first matching taxonomy rule.
    SourceSignatures old_sigs = parse_signatures(delta.old_source);
    SourceSignatures new_sigs = parse_signatures(delta.new_source);
    std::map<std::string, const DefSig*> old_defs, new_defs;
    for (const DefSig& d : old_sigs.defs) old_defs[d.qualified_name] = &d;
    for (const DefSig& d : new_sigs.defs) new_defs[d.qualified_name] = &d;

    // ParameterFlux: renamed/added/removed arguments, or def set changes.
    for (const auto& [name, nd] : new_defs) {
        auto it = old_defs.find(name);
        if (it == old_defs.end()) {
            return {true, {DriftKind::ParameterFlux, "function added: " + name}};
        }
        const DefSig* od = it->second;
        bool names_differ = od->params.size() != nd->params.size();
        if (!names_differ) {
            for (std::size_t i = 0; i < od->params.size(); ++i) {
                if (od->params[i].name != nd->params[i].name ||
                    od->params[i].star != nd->params[i].star) {
                    names_differ = true;
                    break;
                }
            }
        }
        if (names_differ) {
            return {true,
                    {DriftKind::ParameterFlux, "parameters of " + name + " changed: (" +
                                                   join_param_names(*od) + ") -> (" +
                                                   join_param_names(*nd) + ")"}};
        }
    }
    for (const auto& [name, od] : old_defs) {
        (void)od;
        if (!new_defs.count(name)) {
            return {true, {DriftKind::ParameterFlux, "function removed: " + name}};
        }
    }

    // TypeMigration: same parameter names, different annotations.
    for (const auto& [name, nd] : new_defs) {
        const DefSig* od = old_defs.at(name);
        for (std::size_t i = 0; i < nd->params.size(); ++i) {
            if (od->params[i].annotation != nd->params[i].annotation) {
                auto shown = [](const std::string& ann) {
                    return ann.empty() ? std::string("none") : ann;
                };
                return {true,
                        {DriftKind::TypeMigration,
                         "annotation of parameter " + nd->params[i].name + " in " + name +
                             " changed: " + shown(od->params[i].annotation) + " -> " +
                             shown(nd->params[i].annotation)}};
            }
        }
    }

    // ReturnValueDivergence: changed return annotation or return expressions.
    for (const auto& [name, nd] : new_defs) {
        const DefSig* od = old_defs.at(name);
        if (od->return_annotation != nd->return_annotation) {
            return {true,
                    {DriftKind::ReturnValueDivergence,
                     "return annotation of " + name + " changed"}};
        }
    }
    if (return_streams(old_lex.tokens) != return_streams(new_lex.tokens)) {
        return {true, {DriftKind::ReturnValueDivergence, "return expressions changed"}};
    }

    // SideEffectIntroduction: a marker identifier appears only in the new code.
    std::set<std::string> old_names = name_tokens(old_lex.tokens);
    std::set<std::string> new_names = name_tokens(new_lex.tokens);
    for (const std::string& marker : side_effect_markers()) {
        if (!old_names.count(marker) && new_names.count(marker)) {
            return {true,
                    {DriftKind::SideEffectIntroduction, "new side-effect marker: " + marker}};
        }
    }

    // ConstraintChange: numeric literals, comparisons, or raise/assert shape.
    if (number_literals(old_lex.tokens) != number_literals(new_lex.tokens)) {
        return {true, {DriftKind::ConstraintChange, "numeric literals changed"}};
    }
    if (comparison_ops(old_lex.tokens) != comparison_ops(new_lex.tokens)) {
        return {true, {DriftKind::ConstraintChange, "comparison operators changed"}};
    }
    if (guard_keyword_count(old_lex.tokens) != guard_keyword_count(new_lex.tokens)) {
        return {true, {DriftKind::ConstraintChange, "raise/assert statements changed"}};
    }

    return {true, {DriftKind::Irrelevant, "tokens changed but matched no taxonomy rule"}};
}

} // namespace docsync
