#pragma once

#include <string>

namespace docsync {

// Instruction texts ship as asset files under assets/prompts/ and are
// embedded at build time; these accessors return the embedded copies.
std::string default_generator_prompt();
std::string default_critic_prompt();
std::string default_judge_prompt();

} // namespace docsync
