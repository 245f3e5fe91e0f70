#pragma once

#include <string>
#include <vector>

namespace docsync {

// 1-based inclusive line range in new_source.
struct LineSpan {
    int start = 0;
    int end = 0;

    bool operator==(const LineSpan&) const = default;
};

struct CodeDelta {
    std::string old_source;
    std::string new_source;
    std::vector<LineSpan> changed_line_spans; // sorted, non-overlapping
};

enum class DriftKind {
    ParameterFlux,
    TypeMigration,
    ReturnValueDivergence,
    SideEffectIntroduction,
    ConstraintChange,
    TutorialRot, // recognized in the taxonomy, never emitted by this heuristic
    Irrelevant,
};

const char* to_string(DriftKind kind);

struct DriftClass {
    DriftKind kind = DriftKind::Irrelevant;
    std::string detail;
};

struct RelevanceDecision {
    bool relevant = false;
    DriftClass drift;
};

// Line-based LCS diff; changed_line_spans covers exactly the lines of
// new_source that are not part of the longest common subsequence.
CodeDelta diff(const std::string& old_source, const std::string& new_source);

// False iff the change is whitespace-only, comment-only, or
// docstring-literal-only after token normalization. Unlexable new source is
// treated as relevant (fail-open). The drift kind is the first match in
// DriftKind order; Irrelevant doubles as the no-rule-matched catch-all.
RelevanceDecision is_relevant(const CodeDelta& delta);

} // namespace docsync
