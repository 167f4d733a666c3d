#include <doctest.h>

#include <string>

#include "graphwalk/prompts.hpp"

namespace {

using namespace graphwalk;

bool contains(std::string_view haystack, std::string_view needle) {
  return haystack.find(needle) != std::string_view::npos;
}

}  // namespace

TEST_CASE("prompt header frames the thought-action-feedback loop") {
  std::string_view header = prompt_header();
  CHECK(contains(header, "Solve a question answering task"));
  CHECK(contains(header, "Thought"));
  CHECK(contains(header, "Interaction with Graph"));
}

TEST_CASE("function definitions describe all four graph calls") {
  std::string_view defs = default_function_definitions();
  CHECK(contains(defs, "(1) RetrieveNode[keyword]"));
  CHECK(contains(defs, "(2) NodeFeature[Node, feature]"));
  CHECK(contains(defs, "(3) NodeDegree[Node, neighbor_type]"));
  CHECK(contains(defs, "(4) NeighbourCheck[Node, neighbor_type]"));
  CHECK(contains(defs, "If nothing is returned from the graph"));
  CHECK(contains(defs, "the reference neighbors of 123456 are: []"));
}

TEST_CASE("demonstrations carry five bracketed walkthroughs") {
  std::string_view demos = default_demonstrations();
  CHECK(demos.find("BEGINNING OF EXAMPLES") == 0);
  CHECK(contains(demos, "END OF EXAMPLES"));
  for (const char* example : {"Example 1", "Example 2", "Example 3", "Example 4",
                              "Example 5"}) {
    CAPTURE(example);
    CHECK(contains(demos, example));
  }
}

TEST_CASE("demonstration transcripts keep their exact call and feedback lines") {
  std::string_view demos = default_demonstrations();

  // Walkthrough 1: retrieve, read the year, finish.
  CHECK(contains(demos,
                 "Action 1: RetrieveNode[Strongly Interacting Higgs Sector in the "
                 "Minimal Standard Model]"));
  CHECK(contains(demos, "Observation 1: The ID of this node is 3101448248."));
  CHECK(contains(demos, "Action 2: NodeFeature[3101448248, year]"));
  CHECK(contains(demos, "Observation 2: 1993"));
  CHECK(contains(demos, "Action 3: Finish[1993]"));

  // Walkthrough 2: author count via degree.
  CHECK(contains(demos, "Action 2: NodeDegree[2090642949, author]"));
  CHECK(contains(demos, "Action 3: Finish[5]"));

  // Walkthrough 3: multi-valued feature answer.
  CHECK(contains(demos,
                 "Action 3: Finish[the astrophysical journal, the atmosphere journal]"));

  // Walkthrough 4: the alternate neighbor-check spelling and the id list.
  CHECK(contains(demos, "Action 2: NeighbourCheck[3101448248, author]"));
  CHECK(contains(demos,
                 "['98581309', '2440536741', '2345070782', '2113669516', '1968129287', "
                 "'2112021749', '2165059783', '2790497238', '2035459489', "
                 "'2166580174']"));
  CHECK(contains(demos,
                 "Action 9: Finish[John F. Gunion, Howard E. Haber, Gordon Kane, Sally "
                 "Dawson,"));

  // Walkthrough 5 ends with an unnumbered action line, kept verbatim.
  CHECK(contains(demos, "Action 3: NeighbourCheck[3101448248, reference]"));
  CHECK(contains(demos, "Action: Finish[The Higgs Sector and Hidden Symmetry]"));
}

TEST_CASE("answer instruction asks for features, not ids") {
  std::string_view text = answer_instruction();
  CHECK(text ==
        "Please answer by providing node main features (e.g., names) rather than node "
        "IDs. YOU MUST follow the structure of the examples.");
}

TEST_CASE("prompt parts default to the stock blocks") {
  PromptParts parts;
  CHECK(parts.function_definitions == std::string(default_function_definitions()));
  CHECK(parts.demonstrations == std::string(default_demonstrations()));
  CHECK(parts.schema_text.empty());
  CHECK(parts.context_budget == 60000);
}
