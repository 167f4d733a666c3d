#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace graphwalk {

// The stock prompt blocks for the academic-style graphs.  Callers may swap
// any block (for another domain's walkthroughs, say) via PromptParts.
std::string_view prompt_header();
std::string_view default_function_definitions();
std::string_view default_demonstrations();
std::string_view answer_instruction();

// Everything that goes into a prompt besides the question and transcript.
struct PromptParts {
  std::string function_definitions{default_function_definitions()};
  std::string demonstrations{default_demonstrations()};
  std::string schema_text;  // graph definition prose
  // Maximum prompt size in characters.  Old transcript steps are elided
  // before this is ever exceeded.
  std::size_t context_budget = 60000;
};

}  // namespace graphwalk
