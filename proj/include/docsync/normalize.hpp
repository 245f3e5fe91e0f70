#pragma once

#include <string>
#include <vector>

namespace docsync {

enum class NormalizeRule {
    StripDelimiters,
    StripFences,
    TrimBoundaryPunct,
    CollapseRepeats,
    CapLength,
};

const char* to_string(NormalizeRule rule);

// Clean docstring payload extracted from raw model output. The text carries
// no docstring delimiters, no code-fence markers, and no two identical
// consecutive sentences.
struct Payload {
    std::string text;
    std::vector<NormalizeRule> applied_rules; // rules that changed the text, in fixed order
};

// Applies, in order: delimiter stripping, fence/leaked-code stripping,
// trailing-punctuation repair, consecutive-duplicate-sentence collapse, and
// a whitespace-token cap that prefers the last sentence boundary inside the
// cap. Idempotent: normalizing a normalized payload is a no-op.
Payload normalize(const std::string& raw, std::size_t max_tokens);

} // namespace docsync
