#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace docsync::pylex {

enum class Kind { Name, Number, Op, Str, Comment };

struct Token {
    Kind kind;
    std::string text;       // the lexeme; for Str the full literal including prefix/quotes
    int line = 1;           // 1-based physical line of the first character
    int indent = 0;         // indentation width of that physical line (tabs advance to 8)
    bool stmt_start = false; // first non-comment token of a logical statement at depth 0
    std::size_t begin = 0;  // byte offsets [begin, end) into the source
    std::size_t end = 0;
};

struct LexResult {
    std::vector<Token> tokens;
    // Set when the source did not scan cleanly: unterminated string, EOF
    // inside brackets, or a stray closing bracket. Tokens up to the problem
    // are still returned.
    bool degraded = false;
};

// Tolerant scanner for Python source. It does not validate the grammar;
// it produces a token stream with enough structure (logical statement
// starts, indentation, byte spans) to extract signatures and to compare
// files modulo whitespace, comments, and docstring literals.
LexResult lex(const std::string& source);

} // namespace docsync::pylex
