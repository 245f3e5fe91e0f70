#include "docsync/prompts.hpp"

#include "docsync/prompts_gen.hpp"

namespace docsync {

std::string default_generator_prompt() { return prompts_gen::kGeneratorSystem; }
std::string default_critic_prompt() { return prompts_gen::kCriticSystem; }
std::string default_judge_prompt() { return prompts_gen::kJudgeRubric; }

} // namespace docsync
