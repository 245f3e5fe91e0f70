#pragma once

#include "docsync/astsig.hpp"
#include "docsync/backend.hpp"
#include "docsync/corpus.hpp"
#include "docsync/retrieval.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

namespace docsync {

// Composite prompt. The rendered form concatenates, in this order: the
// system instruction, the (token-capped) new code, the stale doc, the AST
// line, the retrieved context, then critic feedback in arrival order.
struct PromptBundle {
    std::string system_instruction;
    std::string code_new;
    std::string doc_stale;
    std::string ast_section;                 // "AST: " + rendered summary
    std::string rag_section;                 // "Context: "-prefixed chunks, may be empty
    std::vector<std::string> critic_feedback; // each entry already "Critic: "-prefixed

    std::string render() const;      // full prompt, system instruction included
    std::string render_user() const; // everything after the system instruction
};

struct CriticVerdict {
    bool is_good = false;
    std::string reason; // non-empty whenever is_good is false
};

// Full record of one agent run.
struct RunTrace {
    std::string case_id;
    bool relevant = false;
    std::string draft_initial;
    std::string draft_final;
    int attempts = 0;                    // refinements performed, 0-based
    std::vector<CriticVerdict> verdicts; // attempts + 1 entries when relevant
    bool accepted = false;               // last verdict was GOOD
    std::vector<std::string> prompts;    // rendered prompt per generation call
    std::string error;                   // non-empty when a backend error aborted the case
};

PromptBundle build_prompt(const DriftCase& drift_case, const SignatureSummary& sig,
                          const RetrievedContext& ctx, const std::vector<std::string>& feedback,
                          const std::string& system_instruction, std::size_t source_token_cap);

// Asks the critic backend for a first line of exactly "GOOD" or
// "BAD: <reason>"; anything else is conservatively treated as BAD.
CriticVerdict run_critic(const std::string& draft, const std::string& code_new, Backend& backend,
                         const std::string& critic_instruction);

// Deterministic stand-in critic: rejects empty drafts, delimiter or fence
// artifacts, and two identical consecutive sentences.
CriticVerdict rule_critic(const std::string& draft, const SignatureSummary& sig);

struct AgentDeps {
    Backend* generator = nullptr;
    Backend* critic = nullptr;          // null: generator doubles as critic
    const VectorStore* store = nullptr; // null: no retrieved context
    std::size_t retrieval_k = 3;
    std::size_t source_token_cap = 256;
    std::size_t target_token_cap = 96;
    std::string system_instruction; // empty: embedded default
    std::string critic_instruction; // empty: embedded default
};

// The update loop: relevance gate, context assembly, generation, critique,
// feedback-appended refinement bounded by max_retries. Drafts are stored
// post-normalization. Backend errors do not throw; they are recorded on the
// returned trace so sibling cases can proceed.
RunTrace update_doc(const DriftCase& drift_case, const AgentDeps& deps, int max_retries);

nlohmann::json to_json(const RunTrace& trace);
RunTrace trace_from_json(const nlohmann::json& obj, std::size_t line);

} // namespace docsync
