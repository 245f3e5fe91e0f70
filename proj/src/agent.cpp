#include "docsync/agent.hpp"

#include "docsync/errors.hpp"
#include "docsync/impact.hpp"
#include "docsync/jsonl.hpp"
#include "docsync/normalize.hpp"
#include "docsync/prompts.hpp"
#include "docsync/textutil.hpp"

#include <nlohmann/json.hpp>

namespace docsync {

using nlohmann::json;

namespace {

void append_section(std::string& out, const std::string& section) {
    if (section.empty()) return;
    if (!out.empty()) out += '\n';
    out += section;
}

std::string first_line(const std::string& s) {
    std::size_t nl = s.find('\n');
    return trim(nl == std::string::npos ? s : s.substr(0, nl));
}

} // namespace

std::string PromptBundle::render_user() const {
    std::string out;
    append_section(out, code_new);
    append_section(out, doc_stale);
    append_section(out, ast_section);
    append_section(out, rag_section);
    for (const std::string& entry : critic_feedback) append_section(out, entry);
    return out;
}

std::string PromptBundle::render() const {
    std::string out;
    append_section(out, system_instruction);
    append_section(out, render_user());
    return out;
}

PromptBundle build_prompt(const DriftCase& drift_case, const SignatureSummary& sig,
                          const RetrievedContext& ctx, const std::vector<std::string>& feedback,
                          const std::string& system_instruction, std::size_t source_token_cap) {
    PromptBundle bundle;
    bundle.system_instruction =
        system_instruction.empty() ? default_generator_prompt() : system_instruction;
    bundle.doc_stale = drift_case.doc_stale;

    // The cap covers the code+doc payload; the stale doc is never dropped.
    std::size_t doc_tokens = count_whitespace_tokens(bundle.doc_stale);
    std::size_t code_budget = source_token_cap > doc_tokens ? source_token_cap - doc_tokens : 8;
    bundle.code_new = cap_code_payload(drift_case.code_new, code_budget);

    bundle.ast_section = "AST: " + sig.rendered;
    for (const ScoredChunk& scored : ctx.chunks) {
        if (!bundle.rag_section.empty()) bundle.rag_section += '\n';
        bundle.rag_section += "Context: " + scored.chunk.text;
    }
    for (const std::string& reason : feedback) {
        bundle.critic_feedback.push_back("Critic: " + reason);
    }
    return bundle;
}

CriticVerdict run_critic(const std::string& draft, const std::string& code_new, Backend& backend,
                         const std::string& critic_instruction) {
    std::string system =
        critic_instruction.empty() ? default_critic_prompt() : critic_instruction;
    std::string user = "Code:\n" + code_new + "\n\nDocstring:\n" + draft;
    Completion completion = backend.complete(system, user);

    std::string head = first_line(completion.text);
    if (head.rfind("GOOD", 0) == 0) return {true, ""};
    if (head.rfind("BAD", 0) == 0) {
        std::string reason = trim(head.substr(3));
        if (!reason.empty() && reason.front() == ':') reason = trim(reason.substr(1));
        if (reason.empty()) reason = "critic gave no reason";
        return {false, reason};
    }
    return {false, "critic response unparsable"};
}

CriticVerdict rule_critic(const std::string& draft, const SignatureSummary& sig) {
    (void)sig; // the deterministic rules are purely textual
    std::string text = trim(draft);
    if (text.empty()) return {false, "draft is empty"};
    if (text.find("\"\"\"") != std::string::npos || text.find("'''") != std::string::npos ||
        text.front() == '"' || text.front() == '\'') {
        return {false, "draft contains docstring delimiter artifacts"};
    }
    if (text.find("```") != std::string::npos) {
        return {false, "draft contains code fence artifacts"};
    }
    std::vector<std::string> sentences = split_sentences(text);
    for (std::size_t i = 1; i < sentences.size(); ++i) {
        if (collapse_whitespace(to_lower(sentences[i])) ==
            collapse_whitespace(to_lower(sentences[i - 1]))) {
            return {false, "draft repeats a sentence"};
        }
    }
    return {true, ""};
}

RunTrace update_doc(const DriftCase& drift_case, const AgentDeps& deps, int max_retries) {
    if (!deps.generator) throw UsageError("update_doc: generator backend is required");
    if (max_retries < 0) throw UsageError("update_doc: max_retries must be >= 0");
    Backend& generator = *deps.generator;
    Backend& critic = deps.critic ? *deps.critic : generator;

    RunTrace trace;
    trace.case_id = drift_case.id;

    RelevanceDecision decision = is_relevant(diff(drift_case.code_old, drift_case.code_new));
    trace.relevant = decision.relevant;
    if (!decision.relevant) {
        trace.draft_initial = drift_case.doc_stale;
        trace.draft_final = drift_case.doc_stale;
        return trace;
    }

    SignatureSummary sig = extract_signatures(drift_case.code_new, "python");
    RetrievedContext ctx;
    if (deps.store && deps.store->built() && deps.retrieval_k > 0) {
        std::string query = sig.rendered + "\n" + drift_case.code_new.substr(0, 512);
        ctx = deps.store->retrieve(query, deps.retrieval_k);
    }

    std::vector<std::string> feedback;
    PromptBundle bundle = build_prompt(drift_case, sig, ctx, feedback,
                                       deps.system_instruction, deps.source_token_cap);

    try {
        trace.prompts.push_back(bundle.render());
        Completion completion = generator.complete(bundle.system_instruction, bundle.render_user());
        std::string draft = normalize(completion.text, deps.target_token_cap).text;
        trace.draft_initial = draft;
        trace.draft_final = draft;

        CriticVerdict verdict =
            run_critic(draft, drift_case.code_new, critic, deps.critic_instruction);
        trace.verdicts.push_back(verdict);

        while (!verdict.is_good && trace.attempts < max_retries) {
            bundle.critic_feedback.push_back("Critic: " + verdict.reason);
            trace.prompts.push_back(bundle.render());
            completion = generator.complete(bundle.system_instruction, bundle.render_user());
            draft = normalize(completion.text, deps.target_token_cap).text;
            trace.draft_final = draft;
            ++trace.attempts;

            verdict = run_critic(draft, drift_case.code_new, critic, deps.critic_instruction);
            trace.verdicts.push_back(verdict);
        }
        trace.accepted = verdict.is_good;
    } catch (const BackendError& err) {
        trace.error = err.what();
        if (trace.draft_final.empty()) trace.draft_final = drift_case.doc_stale;
    }
    return trace;
}

json to_json(const RunTrace& trace) {
    json verdicts = json::array();
    for (const CriticVerdict& v : trace.verdicts) {
        verdicts.push_back(json{{"is_good", v.is_good}, {"reason", v.reason}});
    }
    json obj{{"case_id", trace.case_id},
             {"relevant", trace.relevant},
             {"draft_initial", trace.draft_initial},
             {"draft_final", trace.draft_final},
             {"attempts", trace.attempts},
             {"verdicts", verdicts},
             {"accepted", trace.accepted},
             {"prompts", trace.prompts}};
    if (!trace.error.empty()) obj["error"] = trace.error;
    return obj;
}

RunTrace trace_from_json(const json& obj, std::size_t line) {
    RunTrace trace;
    trace.case_id = require_string(obj, "case_id", line);
    trace.relevant = obj.value("relevant", false);
    trace.draft_initial = obj.value("draft_initial", std::string{});
    trace.draft_final = obj.value("draft_final", std::string{});
    trace.attempts = obj.value("attempts", 0);
    trace.accepted = obj.value("accepted", false);
    trace.error = obj.value("error", std::string{});
    if (obj.contains("verdicts") && obj["verdicts"].is_array()) {
        for (const json& v : obj["verdicts"]) {
            trace.verdicts.push_back(
                {v.value("is_good", false), v.value("reason", std::string{})});
        }
    }
    if (obj.contains("prompts") && obj["prompts"].is_array()) {
        for (const json& p : obj["prompts"]) {
            if (p.is_string()) trace.prompts.push_back(p.get<std::string>());
        }
    }
    return trace;
}

} // namespace docsync
