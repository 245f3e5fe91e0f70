#include "docsync/normalize.hpp"

#include "docsync/errors.hpp"
#include "docsync/textutil.hpp"

#include <algorithm>

namespace docsync {

namespace {

bool is_quote(char c) { return c == '"' || c == '\''; }

bool is_orphan_punct(char c) { return c == ':' || c == ';' || c == ','; }

bool starts_with_triple(const std::string& s) {
    return s.rfind("\"\"\"", 0) == 0 || s.rfind("'''", 0) == 0;
}

std::string strip_delimiters(const std::string& in) {
    std::string s = trim(in);
    for (;;) {
        if (starts_with_triple(s)) {
            s = trim(s.substr(3));
            continue;
        }
        // A same-quote pair wrapping the whole payload is delimiter debris.
        if (s.size() >= 2 && is_quote(s.front()) && s.back() == s.front()) {
            s = trim(s.substr(1, s.size() - 2));
            continue;
        }
        break;
    }
    // An interior triple quote closes the payload; drop what follows.
    for (const char* delim : {"\"\"\"", "'''"}) {
        std::size_t pos = s.find(delim);
        if (pos != std::string::npos) s = trim(s.substr(0, pos));
    }
    // Unbalanced edge quotes are stray markers; balanced ones are content.
    if (!s.empty() && is_quote(s.front()) &&
        std::count(s.begin(), s.end(), s.front()) % 2 == 1) {
        s = trim(s.substr(1));
    }
    if (!s.empty() && is_quote(s.back()) && std::count(s.begin(), s.end(), s.back()) % 2 == 1) {
        s.pop_back();
        s = trim(s);
    }
    return s;
}

std::string strip_fences(const std::string& in) {
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos <= in.size()) {
        std::size_t nl = in.find('\n', pos);
        if (nl == std::string::npos) {
            lines.push_back(in.substr(pos));
            break;
        }
        lines.push_back(in.substr(pos, nl - pos));
        pos = nl + 1;
    }

    auto starts_fence = [](const std::string& line) { return trim(line).rfind("```", 0) == 0; };
    auto starts_code = [](const std::string& line) {
        std::string t = trim(line);
        return t.rfind("def ", 0) == 0 || t.rfind("class ", 0) == 0 ||
               t.rfind("async def ", 0) == 0;
    };

    std::size_t begin = 0;
    if (!lines.empty() && starts_fence(lines[0])) begin = 1;

    std::string out;
    for (std::size_t i = begin; i < lines.size(); ++i) {
        if (starts_fence(lines[i]) || starts_code(lines[i])) break;
        if (!out.empty()) out += '\n';
        out += lines[i];
    }
    // Inline fence debris.
    std::size_t tick;
    while ((tick = out.find("```")) != std::string::npos) out.erase(tick, 3);
    return trim(out);
}

std::string trim_boundary_punct(const std::string& in) {
    if (in.empty() || !is_orphan_punct(in.back())) return in;
    std::string s = in;
    while (!s.empty() && is_orphan_punct(s.back())) s.pop_back();
    s = trim(s);
    if (s.empty()) return s;
    s += '.';
    return s;
}

std::string collapse_repeats(const std::string& in) {
    std::vector<TextSpan> spans = sentence_spans(in);
    if (spans.size() < 2) return in;

    std::vector<bool> keep(spans.size(), true);
    std::string prev_key = collapse_whitespace(to_lower(
        std::string_view(in).substr(spans[0].begin, spans[0].end - spans[0].begin)));
    bool changed = false;
    for (std::size_t i = 1; i < spans.size(); ++i) {
        std::string key = collapse_whitespace(to_lower(
            std::string_view(in).substr(spans[i].begin, spans[i].end - spans[i].begin)));
        if (key == prev_key) {
            keep[i] = false;
            changed = true;
        } else {
            prev_key = key;
        }
    }
    if (!changed) return in;

    // Splice dropped sentences out, keeping the original bytes elsewhere.
    // The bytes between consecutive spans are whitespace by construction,
    // so each kept sentence is prefixed with the gap right before it.
    std::string out = in.substr(0, spans[0].end);
    for (std::size_t i = 1; i < spans.size(); ++i) {
        if (!keep[i]) continue;
        out += in.substr(spans[i - 1].end, spans[i].begin - spans[i - 1].end);
        out += in.substr(spans[i].begin, spans[i].end - spans[i].begin);
    }
    return trim(out);
}

std::string cap_length(const std::string& in, std::size_t max_tokens) {
    std::vector<TextSpan> tokens = whitespace_token_spans(in);
    if (tokens.size() <= max_tokens) return in;

    std::size_t hard_cut = tokens[max_tokens - 1].end;
    std::size_t cut = hard_cut;
    bool found_boundary = false;
    for (const TextSpan& sp : sentence_spans(in)) {
        if (sp.end <= hard_cut && sp.end > 0 && in[sp.end - 1] == '.') {
            cut = sp.end;
            found_boundary = true;
        }
    }
    if (!found_boundary) cut = hard_cut;
    return trim(in.substr(0, cut));
}

} // namespace

const char* to_string(NormalizeRule rule) {
    switch (rule) {
    case NormalizeRule::StripDelimiters: return "StripDelimiters";
    case NormalizeRule::StripFences: return "StripFences";
    case NormalizeRule::TrimBoundaryPunct: return "TrimBoundaryPunct";
    case NormalizeRule::CollapseRepeats: return "CollapseRepeats";
    case NormalizeRule::CapLength: return "CapLength";
    }
    return "";
}

Payload normalize(const std::string& raw, std::size_t max_tokens) {
    if (max_tokens < 1) throw UsageError("normalize: max_tokens must be >= 1");

    bool applied[5] = {false, false, false, false, false};
    std::string text = trim(raw);

    // One cleanup can expose debris for an earlier rule (a fence cut may
    // leave a stray quote), so the ordered pass repeats until stable.
    for (int round = 0; round < 8; ++round) {
        std::string before_round = text;

        auto step = [&](NormalizeRule rule, auto&& fn) {
            std::string next = fn(text);
            if (next != text) {
                applied[static_cast<int>(rule)] = true;
                text = std::move(next);
            }
        };
        step(NormalizeRule::StripDelimiters, strip_delimiters);
        step(NormalizeRule::StripFences, strip_fences);
        step(NormalizeRule::TrimBoundaryPunct, trim_boundary_punct);
        step(NormalizeRule::CollapseRepeats, collapse_repeats);
        step(NormalizeRule::CapLength,
             [max_tokens](const std::string& s) { return cap_length(s, max_tokens); });

        if (text == before_round) break;
    }

    Payload payload;
    payload.text = std::move(text);
    for (int i = 0; i < 5; ++i) {
        if (applied[i]) payload.applied_rules.push_back(static_cast<NormalizeRule>(i));
    }
    return payload;
}

} // namespace docsync
