#include "docsync/pylex.hpp"

#include <array>
#include <cctype>

namespace docsync::pylex {

namespace {

bool is_name_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool is_name_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }
bool is_digit(unsigned char c) { return std::isdigit(c) != 0; }

bool is_string_prefix(const std::string& word) {
    if (word.empty() || word.size() > 3) return false;
    for (char c : word) {
        switch (std::tolower(static_cast<unsigned char>(c))) {
        case 'r': case 'b': case 'u': case 'f': break;
        default: return false;
        }
    }
    return true;
}

constexpr std::array<std::string_view, 5> kOps3 = {"**=", "//=", ">>=", "<<=", "..."};
constexpr std::array<std::string_view, 19> kOps2 = {
    "**", "//", "<<", ">>", "<=", ">=", "==", "!=", "->", ":=",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "@="};

} // namespace

LexResult lex(const std::string& src) {
    LexResult result;
    std::size_t i = 0;
    const std::size_t n = src.size();
    int line = 1;
    int bracket_depth = 0;
    bool pending_stmt_start = true;
    int cur_indent = 0;
    bool at_line_start = true;

    auto compute_indent = [&]() {
        int ind = 0;
        std::size_t j = i;
        while (j < n && (src[j] == ' ' || src[j] == '\t')) {
            ind = src[j] == '\t' ? (ind / 8 + 1) * 8 : ind + 1;
            ++j;
        }
        cur_indent = ind;
        at_line_start = false;
    };

    auto push = [&](Kind kind, std::size_t begin, std::size_t end, int start_line) {
        Token tok;
        tok.kind = kind;
        tok.text = src.substr(begin, end - begin);
        tok.line = start_line;
        tok.indent = cur_indent;
        if (kind != Kind::Comment && pending_stmt_start) {
            tok.stmt_start = true;
            pending_stmt_start = false;
        }
        tok.begin = begin;
        tok.end = end;
        result.tokens.push_back(std::move(tok));
    };

    // Consumes the body of a string literal whose opening quote is at `i`.
    // Returns false when the literal is unterminated.
    auto scan_string = [&](char quote) -> bool {
        bool triple = i + 2 < n && src[i + 1] == quote && src[i + 2] == quote;
        i += triple ? 3 : 1;
        while (i < n) {
            if (src[i] == '\\' && i + 1 < n) {
                if (src[i + 1] == '\n') ++line;
                i += 2;
                continue;
            }
            if (src[i] == '\n') {
                if (!triple) return false; // newline ends an unterminated short string
                ++line;
                ++i;
                continue;
            }
            if (src[i] == quote) {
                if (!triple) {
                    ++i;
                    return true;
                }
                if (i + 2 < n && src[i + 1] == quote && src[i + 2] == quote) {
                    i += 3;
                    return true;
                }
                ++i;
                continue;
            }
            ++i;
        }
        return false;
    };

    while (i < n) {
        if (at_line_start) compute_indent();
        char c = src[i];
        unsigned char uc = static_cast<unsigned char>(c);

        if (c == '\n') {
            ++line;
            ++i;
            at_line_start = true;
            if (bracket_depth == 0) pending_stmt_start = true;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
            ++i;
            continue;
        }
        if (c == '\\' && i + 1 < n && src[i + 1] == '\n') {
            // explicit line continuation: no logical break
            ++line;
            i += 2;
            at_line_start = true;
            continue;
        }
        if (c == '#') {
            std::size_t begin = i;
            while (i < n && src[i] != '\n') ++i;
            push(Kind::Comment, begin, i, line);
            continue;
        }
        if (c == '"' || c == '\'') {
            std::size_t begin = i;
            int start_line = line;
            if (!scan_string(c)) result.degraded = true;
            push(Kind::Str, begin, i, start_line);
            continue;
        }
        if (is_name_start(uc)) {
            std::size_t begin = i;
            while (i < n && is_name_char(static_cast<unsigned char>(src[i]))) ++i;
            std::string word = src.substr(begin, i - begin);
            if (i < n && (src[i] == '"' || src[i] == '\'') && is_string_prefix(word)) {
                // prefixed string literal, e.g. r"...", f'...'
                int start_line = line;
                if (!scan_string(src[i])) result.degraded = true;
                push(Kind::Str, begin, i, start_line);
                continue;
            }
            push(Kind::Name, begin, i, line);
            continue;
        }
        if (is_digit(uc) ||
            (c == '.' && i + 1 < n && is_digit(static_cast<unsigned char>(src[i + 1])))) {
            std::size_t begin = i;
            while (i < n) {
                unsigned char d = static_cast<unsigned char>(src[i]);
                if (std::isalnum(d) || d == '_' || d == '.') {
                    ++i;
                    continue;
                }
                // exponent sign: 1e-5, 2E+3
                if ((d == '+' || d == '-') && i > begin) {
                    char prev = src[i - 1];
                    if ((prev == 'e' || prev == 'E') && i + 1 < n &&
                        is_digit(static_cast<unsigned char>(src[i + 1]))) {
                        ++i;
                        continue;
                    }
                }
                break;
            }
            push(Kind::Number, begin, i, line);
            continue;
        }
        // operators and punctuation
        {
            std::size_t begin = i;
            std::size_t len = 1;
            if (i + 2 < n) {
                std::string_view three(src.data() + i, 3);
                for (std::string_view op : kOps3) {
                    if (three == op) {
                        len = 3;
                        break;
                    }
                }
            }
            if (len == 1 && i + 1 < n) {
                std::string_view two(src.data() + i, 2);
                for (std::string_view op : kOps2) {
                    if (two == op) {
                        len = 2;
                        break;
                    }
                }
            }
            if (len == 1) {
                if (c == '(' || c == '[' || c == '{') ++bracket_depth;
                if (c == ')' || c == ']' || c == '}') {
                    if (bracket_depth > 0) {
                        --bracket_depth;
                    } else {
                        result.degraded = true;
                    }
                }
            }
            i += len;
            push(Kind::Op, begin, i, line);
        }
    }
    if (bracket_depth != 0) result.degraded = true;
    return result;
}

} // namespace docsync::pylex
