#include "docsync/textutil.hpp"

#include "docsync/errors.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace docsync {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Abbreviations whose trailing period does not end a sentence when followed
// by a lowercase letter.
constexpr std::array<std::string_view, 3> kAbbreviations = {"e.g.", "i.e.", "etc."};

bool ends_with_abbreviation(const std::string& text, std::size_t period_pos) {
    for (std::string_view abbr : kAbbreviations) {
        if (period_pos + 1 < abbr.size()) continue;
        std::size_t start = period_pos + 1 - abbr.size();
        if (text.compare(start, abbr.size(), abbr) != 0) continue;
        // The abbreviation must start a word.
        if (start == 0 || is_space(text[start - 1]) || text[start - 1] == '(') return true;
    }
    return false;
}

// Returns the index one past the sentence-ending period at or after `from`,
// or npos when no boundary exists.
std::size_t find_boundary(const std::string& text, std::size_t from) {
    for (std::size_t i = from; i < text.size(); ++i) {
        if (text[i] != '.') continue;
        bool at_end = i + 1 == text.size();
        if (!at_end && !is_space(text[i + 1])) continue;
        if (!at_end && ends_with_abbreviation(text, i)) {
            std::size_t j = i + 1;
            while (j < text.size() && is_space(text[j])) ++j;
            if (j < text.size() && std::islower(static_cast<unsigned char>(text[j]))) continue;
        }
        return i + 1;
    }
    return std::string::npos;
}

} // namespace

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_ws = true; // swallow leading whitespace
    for (char c : s) {
        if (is_space(c)) {
            in_ws = true;
            continue;
        }
        if (in_ws && !out.empty()) out.push_back(' ');
        in_ws = false;
        out.push_back(c);
    }
    return out;
}

std::vector<TextSpan> sentence_spans(const std::string& text) {
    std::vector<TextSpan> spans;
    std::size_t pos = 0;
    while (pos < text.size()) {
        while (pos < text.size() && is_space(text[pos])) ++pos;
        if (pos >= text.size()) break;
        std::size_t end = find_boundary(text, pos);
        if (end == std::string::npos) {
            end = text.size();
            while (end > pos && is_space(text[end - 1])) --end;
        }
        spans.push_back({pos, end});
        pos = end;
    }
    return spans;
}

std::vector<std::string> split_sentences(const std::string& text) {
    std::vector<std::string> out;
    for (const TextSpan& sp : sentence_spans(text)) {
        out.push_back(text.substr(sp.begin, sp.end - sp.begin));
    }
    return out;
}

std::string first_sentence(const std::string& text) {
    std::string t = trim(text);
    if (t.empty()) throw DataError("first_sentence: empty input");
    std::size_t end = find_boundary(t, 0);
    if (end == std::string::npos) return t;
    return t.substr(0, end);
}

std::vector<TextSpan> whitespace_token_spans(std::string_view s) {
    std::vector<TextSpan> spans;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_space(s[i])) ++i;
        if (i >= s.size()) break;
        std::size_t b = i;
        while (i < s.size() && !is_space(s[i])) ++i;
        spans.push_back({b, i});
    }
    return spans;
}

std::vector<std::string> whitespace_tokens(std::string_view s) {
    std::vector<std::string> out;
    for (const TextSpan& sp : whitespace_token_spans(s)) {
        out.emplace_back(s.substr(sp.begin, sp.end - sp.begin));
    }
    return out;
}

std::size_t count_whitespace_tokens(std::string_view s) {
    return whitespace_token_spans(s).size();
}

std::vector<std::string> metric_tokens(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        unsigned char uc = static_cast<unsigned char>(c);
        if (std::isspace(uc) || std::ispunct(uc)) {
            if (!cur.empty()) {
                out.push_back(cur);
                cur.clear();
            }
            continue;
        }
        cur.push_back(static_cast<char>(std::tolower(uc)));
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

} // namespace docsync
