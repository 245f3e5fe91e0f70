#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace docsync {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

// Collapses every whitespace run to a single space and trims the ends.
std::string collapse_whitespace(std::string_view s);

// Half-open [begin, end) byte range into the string it was computed from.
struct TextSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
};

// Sentence boundary rule: a period followed by whitespace or end-of-string
// ends a sentence, except when the period closes one of a short list of
// abbreviations ("e.g.", "i.e.", "etc.") and the next non-space character is
// a lowercase letter. The final span may end without a period.
std::vector<TextSpan> sentence_spans(const std::string& text);
std::vector<std::string> split_sentences(const std::string& text);

// Prefix of the trimmed text through the first sentence boundary; the whole
// trimmed text when no boundary exists. Throws DataError on empty input.
std::string first_sentence(const std::string& text);

// Whitespace-delimited tokens, optionally with their byte spans.
std::vector<std::string> whitespace_tokens(std::string_view s);
std::vector<TextSpan> whitespace_token_spans(std::string_view s);
std::size_t count_whitespace_tokens(std::string_view s);

// Metric tokenization: lowercase, split on whitespace and punctuation,
// keeping maximal runs of the remaining characters.
std::vector<std::string> metric_tokens(std::string_view s);

} // namespace docsync
