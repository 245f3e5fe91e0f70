#include "docsync/astsig.hpp"

#include "docsync/errors.hpp"
#include "docsync/pylex.hpp"
#include "docsync/textutil.hpp"

#include <cstddef>

namespace docsync {

namespace pl = pylex;

namespace {

struct Scope {
    int indent;
    std::string name;
};

std::string qualify(const std::vector<Scope>& scopes, const std::string& name) {
    std::string out;
    for (const Scope& s : scopes) {
        out += s.name;
        out += '.';
    }
    out += name;
    return out;
}

std::string render_def(const DefSig& def) {
    std::string out = "def " + def.qualified_name + "(";
    for (std::size_t i = 0; i < def.params.size(); ++i) {
        if (i) out += ", ";
        out += def.params[i].star + def.params[i].name;
    }
    out += ")";
    if (!def.return_annotation.empty()) out += " -> " + def.return_annotation;
    return out;
}

// Parses the parameter list starting at the token after '('. Returns the
// index of the token following the closing ')' (or tokens.size() when the
// list is unterminated).
std::size_t parse_params(const std::vector<pl::Token>& toks, std::size_t i,
                         const std::string& src, std::vector<ParamSig>& out, bool& degraded) {
    int depth = 1;
    bool in_lambda = false;

    ParamSig cur;
    bool have_name = false;
    std::size_t ann_begin = 0; // byte offset of annotation start, 0 = none pending
    bool in_annotation = false;

    auto flush = [&](std::size_t ann_end) {
        if (in_annotation && ann_begin < ann_end) {
            cur.annotation = collapse_whitespace(src.substr(ann_begin, ann_end - ann_begin));
        }
        if (have_name) out.push_back(cur);
        cur = ParamSig{};
        have_name = false;
        in_annotation = false;
        ann_begin = 0;
    };

    for (; i < toks.size(); ++i) {
        const pl::Token& t = toks[i];
        if (t.kind == pl::Kind::Comment) continue;
        if (t.kind == pl::Kind::Op) {
            const std::string& op = t.text;
            if (op == "(" || op == "[" || op == "{") {
                ++depth;
                continue;
            }
            if (op == ")" || op == "]" || op == "}") {
                --depth;
                if (depth == 0) {
                    flush(t.begin);
                    return i + 1;
                }
                continue;
            }
            if (depth == 1) {
                if (op == "," && !in_lambda) {
                    flush(t.begin);
                    continue;
                }
                if (op == ":" && in_lambda) {
                    in_lambda = false;
                    continue;
                }
                if (op == ":" && !in_annotation && have_name) {
                    in_annotation = true;
                    ann_begin = t.end;
                    continue;
                }
                if (op == "=" && in_annotation) {
                    // default value ends the annotation text
                    cur.annotation =
                        collapse_whitespace(src.substr(ann_begin, t.begin - ann_begin));
                    in_annotation = false;
                    ann_begin = 0;
                    continue;
                }
                if ((op == "*" || op == "**") && !have_name && !in_annotation) {
                    cur.star = op;
                    continue;
                }
            }
            continue;
        }
        if (t.kind == pl::Kind::Name && depth >= 1) {
            if (t.text == "lambda") {
                in_lambda = true;
                continue;
            }
            if (depth == 1 && !have_name && !in_annotation) {
                cur.name = t.text;
                have_name = true;
            }
            continue;
        }
    }
    degraded = true; // ran off the end of the token stream inside the list
    flush(src.size());
    return i;
}

} // namespace

SourceSignatures parse_signatures(const std::string& source) {
    SourceSignatures result;
    pl::LexResult lexed = pl::lex(source);
    result.degraded = lexed.degraded;
    const auto& toks = lexed.tokens;

    std::vector<Scope> scopes;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        const pl::Token& t = toks[i];
        if (t.stmt_start) {
            while (!scopes.empty() && t.indent <= scopes.back().indent) scopes.pop_back();
        }
        if (t.kind != pl::Kind::Name) continue;

        bool header_start =
            t.stmt_start ||
            (i > 0 && toks[i - 1].kind == pl::Kind::Name && toks[i - 1].text == "async" &&
             toks[i - 1].stmt_start);
        if (!header_start) continue;
        int stmt_indent =
            t.stmt_start ? t.indent : toks[i - 1].indent; // async def uses the async token

        if (t.text == "class") {
            if (i + 1 >= toks.size() || toks[i + 1].kind != pl::Kind::Name) {
                result.degraded = true;
                continue;
            }
            std::string qualified = qualify(scopes, toks[i + 1].text);
            result.classes.push_back(qualified);
            result.entries.push_back("class " + qualified);
            scopes.push_back({stmt_indent, toks[i + 1].text});
            ++i;
            continue;
        }
        if (t.text != "def") continue;
        if (i + 1 >= toks.size() || toks[i + 1].kind != pl::Kind::Name) {
            result.degraded = true;
            continue;
        }
        DefSig def;
        const std::string& name = toks[i + 1].text;
        def.qualified_name = qualify(scopes, name);

        std::size_t j = i + 2;
        if (j < toks.size() && toks[j].kind == pl::Kind::Op && toks[j].text == "(") {
            j = parse_params(toks, j + 1, source, def.params, result.degraded);
        } else {
            result.degraded = true;
        }
        // optional "-> annotation" up to the header colon
        if (j < toks.size() && toks[j].kind == pl::Kind::Op && toks[j].text == "->") {
            std::size_t ann_begin = toks[j].end;
            int depth = 0;
            std::size_t k = j + 1;
            std::size_t ann_end = ann_begin;
            for (; k < toks.size(); ++k) {
                const std::string& op = toks[k].text;
                if (toks[k].kind == pl::Kind::Op) {
                    if (op == "(" || op == "[" || op == "{") ++depth;
                    if (op == ")" || op == "]" || op == "}") --depth;
                    if (op == ":" && depth == 0) break;
                }
                if (toks[k].stmt_start) break; // header never closed
                ann_end = toks[k].end;
            }
            def.return_annotation = collapse_whitespace(source.substr(ann_begin, ann_end - ann_begin));
            j = k;
        }
        result.entries.push_back(render_def(def));
        result.defs.push_back(def);
        scopes.push_back({stmt_indent, name});
        i = j > i ? j - 1 : i; // resume after the header
    }
    return result;
}

SignatureSummary extract_signatures(const std::string& source, const std::string& language) {
    if (language != "python") {
        throw UsageError("unsupported language: " + language);
    }
    SourceSignatures parsed = parse_signatures(source);
    SignatureSummary summary;
    summary.entries = std::move(parsed.entries);
    summary.parse_degraded = parsed.degraded;
    for (std::size_t i = 0; i < summary.entries.size(); ++i) {
        if (i) summary.rendered += " | ";
        summary.rendered += summary.entries[i];
    }
    return summary;
}

} // namespace docsync
