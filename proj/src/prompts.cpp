#include "graphwalk/prompts.hpp"

namespace graphwalk {

std::string_view prompt_header() {
  return "Solve a question answering task with interleaving Thought, Interaction with "
         "Graph, and Feedback from Graph steps.\n"
         "\n"
         "In the Thought step, you should reflect on what further information is needed "
         "to answer the question. In the Interaction step, you interact with the graph "
         "using one of the following four functions:\n";
}

std::string_view default_function_definitions() {
  return
      "You are a helpful AI bot who can assist in answering questions with help of a "
      "knowledge graph. You can answer questions by interacting with the graph using "
      "four functions:\n"
      "\n"
      "(1) RetrieveNode[keyword], which retrieves the related node from the graph "
      "according to the corresponding query.\n"
      "\n"
      "(2) NodeFeature[Node, feature], which returns the detailed attribute information "
      "of Node regarding the given \"feature\" key.\n"
      "\n"
      "(3) NodeDegree[Node, neighbor_type], which calculates the number of "
      "\"neighbor_type\" neighbors of the node Node in the graph.\n"
      "\n"
      "(4) NeighbourCheck[Node, neighbor_type], which lists the \"neighbor_type\" "
      "neighbours of the node Node in the graph and returns them.\n"
      "\n"
      "You answer these questions with an interleaving Thought, Action taken on the "
      "graph using one of the above functions, and an Observation that is returned from "
      "the graph. You may take as many steps as necessary to answer the question.\n"
      "\n"
      "In the Thought step you should come up with a plan to answer the question, this "
      "can include what information is still needed or a plan to solving the question.\n"
      "In the Action step you should interact with the graph using one of the four "
      "functions based on the previous Thought.\n"
      "In the Observation step you should provide the information returned from the "
      "graph based on the previous Action.\n"
      "\n"
      "If nothing is returned from the graph, you should try another strategy. e.g. "
      "Observation 1: the reference neighbors of 123456 are: []. You should move on to "
      "another strategy.\n";
}

namespace {

constexpr const char* kAcademicDefinition =
    "There are three types of nodes in the graph: paper, author and venue.\n"
    "Paper nodes have features: title, abstract, year and label. Author nodes have "
    "features: name. Venue nodes have features: name.\n"
    "Paper nodes are linked to their author nodes, venue nodes, reference paper nodes "
    "and cited_by paper nodes. Author nodes are linked to their paper nodes. Venue "
    "nodes are linked to their paper nodes.\n";

}  // namespace

std::string_view default_demonstrations() {
  static const std::string demos = [] {
    std::string d;
    d += "BEGINNING OF EXAMPLES\n\nExample 1\n\nDefinition of the graph:\n";
    d += kAcademicDefinition;
    d +=
        "\nQuestion: When was the paper Strongly Interacting Higgs Sector in the "
        "Minimal Standard Model published?\n"
        "\n"
        "Thought 1: The question is asking some basic information about a paper. I "
        "should first find the paper node related to the paper Strongly Interacting "
        "Higgs Sector in the Minimal Standard Model.\n"
        "Action 1: RetrieveNode[Strongly Interacting Higgs Sector in the Minimal "
        "Standard Model]\n"
        "Observation 1: The ID of this node is 3101448248.\n"
        "\n"
        "Thought 2: The question is asking for the publication year of the paper. I "
        "need to check the node feature (year) from the graph.\n"
        "Action 2: NodeFeature[3101448248, year]\n"
        "Observation 2: 1993\n"
        "\n"
        "Thought 3: The publication year of the paper is 1993.\n"
        "Action 3: Finish[1993]\n"
        "\n"
        "Example 2\n\nDefinition of the graph:\n";
    d += kAcademicDefinition;
    d +=
        "\nQuestion: How many authors do the paper Mass Accretion Rates in "
        "Self-Regulated Disks of T Tauri Stars have?\n"
        "\n"
        "Thought 1: The question is asking for the number of authors of a paper. I "
        "should first find the paper node related to the paper Mass Accretion Rates in "
        "Self-Regulated Disks of T Tauri Stars in the graph.\n"
        "Action 1: RetrieveNode[Mass Accretion Rates in Self-Regulated Disks of T "
        "Tauri Stars]\n"
        "Observation 1: The ID of this node is 2090642949.\n"
        "\n"
        "Thought 2: The question is asking for the number of authors of the paper. I "
        "should check the node's author neighbor degree from the graph.\n"
        "Action 2: NodeDegree[2090642949, author]\n"
        "Observation 2: 5\n"
        "\n"
        "Thought 3: The number of authors of the paper is 5.\n"
        "Action 3: Finish[5]\n"
        "\n"
        "Example 3\n\nDefinition of the graph:\n";
    d += kAcademicDefinition;
    d +=
        "\nQuestion: What was the publish venue of the paper Mass Accretion Rates in "
        "Self-Regulated Disks of T Tauri Stars?\n"
        "\n"
        "Thought 1: The question is asking information about the node related to the "
        "paper Mass Accretion Rates in Self-Regulated Disks of T Tauri Stars. I should "
        "first find the paper node related to the paper in the graph.\n"
        "Action 1: RetrieveNode[Mass Accretion Rates in Self-Regulated Disks of T "
        "Tauri Stars]\n"
        "Observation 1: The ID of this node is 2090642949.\n"
        "\n"
        "Thought 2: The question is asking for the publish venue of the paper. I "
        "should check the node's venue neighbor feature from the graph.\n"
        "Action 2: NodeFeature[2090642949, venue]\n"
        "Observation 2: the astrophysical journal, the atmosphere journal\n"
        "\n"
        "Thought 3: The publish venue of the paper is the astrophysical journal, the "
        "atmosphere journal.\n"
        "Action 3: Finish[the astrophysical journal, the atmosphere journal]\n"
        "\n"
        "Example 4\n\nDefinition of the graph:\n";
    d += kAcademicDefinition;
    d +=
        "\nQuestion: Who wrote the paper titled \"Strongly Interacting Higgs Sector in "
        "the Minimal Standard Model\"?\n"
        "\n"
        "Thought 1: The question is asking for the author(s) of a paper. I should "
        "first find the paper node related to the paper titled \"Strongly Interacting "
        "Higgs Sector in the Minimal Standard Model\" in the graph.\n"
        "Action 1: RetrieveNode[Strongly Interacting Higgs Sector in the Minimal "
        "Standard Model]\n"
        "Observation 1: The ID of this node is 3101448248.\n"
        "\n"
        "Thought 2: The question is asking for the author(s) of the paper. I should "
        "check the node's author neighbor degree from the graph.\n"
        "Action 2: NeighbourCheck[3101448248, author]\n"
        "Observation 2: The author neighbors of 3101448248 are: ['98581309', "
        "'2440536741', '2345070782', '2113669516', '1968129287', '2112021749', "
        "'2165059783', '2790497238', '2035459489', '2166580174'].\n"
        "\n"
        "Thought 3: The author(s) of the paper are: ['98581309', '2440536741', "
        "'2345070782', '2113669516', '1968129287', '2112021749']. I should check each "
        "of the author nodes to get the author names.\n"
        "Action 3: NodeFeature[98581309, name]\n"
        "Observation 3: Author 1: John F. Gunion\n"
        "\n"
        "Thought 4: The author(s) of the paper are: ['98581309', '2440536741', "
        "'2345070782', '2113669516', '1968129287', '2112021749']. I should check each "
        "of the author nodes to get the author names. I have already checked the first "
        "author. I should check the next author.\n"
        "Action 4: NodeFeature[2440536741, name]\n"
        "Observation 4: Author 2: Howard E. Haber\n"
        "\n"
        "Thought 5: The author(s) of the paper are: ['98581309', '2440536741', "
        "'2345070782', '2113669516', '1968129287', '2112021749']. I should check each "
        "of the author nodes to get the author names. I have already checked the first "
        "two authors. I should check the next author.\n"
        "Action 5: NodeFeature[2345070782, name]\n"
        "Observation 5: Author 3: Gordon Kane\n"
        "\n"
        "Thought 6: The author(s) of the paper are: ['98581309', '2440536741', "
        "'2345070782', '2113669516', '1968129287', '2112021749']. I should check each "
        "of the author nodes to get the author names. I have already checked the first "
        "three authors. I should check the next author.\n"
        "Action 6: NodeFeature[2113669516, name]\n"
        "Observation 6: Author 4: Sally Dawson\n"
        "\n"
        "Thought 7: The author(s) of the paper are: ['98581309', '2440536741', "
        "'2345070782', '2113669516', '1968129287', '2112021749']. I should check each "
        "of the author nodes to get the author names. I have already checked the first "
        "four authors. I should check the next author.\n"
        "Action 7: NodeFeature[1968129287, name]\n"
        "Observation 7: Author 5: Michael S. Chanowitz\n"
        "\n"
        "Thought 8: The author(s) of the paper are: ['98581309', '2440536741', "
        "'2345070782', '2113669516', '1968129287', '2112021749']. I should check each "
        "of the author nodes to get the author names. I have already checked the first "
        "five authors. I should check the next author.\n"
        "Action 8: NodeFeature[2112021749, name]\n"
        "Observation 8: Author 6: Lian-Tao Wang\n"
        "\n"
        "Thought 9: The author(s) of the paper are: ['98581309', '2440536741', "
        "'2345070782', '2113669516', '1968129287', '2112021749']. I have checked all "
        "the authors and am finished.\n"
        "Action 9: Finish[John F. Gunion, Howard E. Haber, Gordon Kane, Sally Dawson, "
        "Michael S. Chanowitz, Lian-Tao Wang]\n"
        "\n"
        "Example 5\n\nDefinition of the graph:\n";
    d += kAcademicDefinition;
    d +=
        "\nQuestion: Considering a reader of the paper Strongly Interacting Higgs "
        "Sector in the Minimal Standard Model, Select another paper that the reader "
        "would be interested in reading.\n"
        "\n"
        "Thought 1: The question is asking for the papers that a reader of the paper "
        "Strongly Interacting Higgs Sector in the Minimal Standard Model would be "
        "interested in reading. I should first find the paper node related to the "
        "paper Strongly Interacting Higgs Sector in the Minimal Standard Model in the "
        "graph.\n"
        "Action 1: RetrieveNode[Strongly Interacting Higgs Sector in the Minimal "
        "Standard Model]\n"
        "Observation 1: The ID of this node is 3101448248.\n"
        "\n"
        "Thought 2: I should also check the venue of the paper Strongly Interacting "
        "Higgs Sector in the Minimal Standard Model to provide the best paper.\n"
        "Action 2: NodeFeature[3101448248, venue]\n"
        "Observation 2: The venue of the paper is Physical Review D.\n"
        "\n"
        "Thought 3: The question is asking for the papers that a reader of the paper "
        "would be interested in reading. I should check the node's reference paper "
        "neighbors from the graph.\n"
        "Action 3: NeighbourCheck[3101448248, reference]\n"
        "Observation 3: The reference paper neighbors of 3101448248 are: "
        "['1988913734', '1988913735', '1988913736'].\n"
        "\n"
        "Thought 4: The papers that a reader of the paper would be interested in "
        "reading are: ['1988913734', '1988913735', '1988913736']. I should check the "
        "first paper.\n"
        "Action 4: NodeFeature[1988913734, title]\n"
        "Observation 4: Paper 1: Advances in Quantum Computing Algorithms\n"
        "\n"
        "Thought 5: The papers that a reader of the paper would be interested in "
        "reading are: ['1988913735', '1988913736']. I should check the second paper.\n"
        "Action 5: NodeFeature[1988913735, title]\n"
        "Observation 5: Paper 2: Machine Learning Techniques for Big Data Analysis\n"
        "\n"
        "Thought 6: The papers that a reader of the paper would be interested in "
        "reading are: ['1988913734', '1988913735', '1988913736']. I should check the "
        "third paper.\n"
        "Action 6: NodeFeature[1988913736, title]\n"
        "Observation 6: Paper 3: The Higgs Sector and Hidden Symmetry\n"
        "\n"
        "Thought 7: The venue of the papers Strongly Interacting Higgs Sector in the "
        "Minimal Standard Model and The Higgs Sector and Hidden Symmetry are Physical "
        "Review D. which is the same. The question asked for one paper so I will "
        "select the best paper.\n"
        "Action: Finish[The Higgs Sector and Hidden Symmetry]\n"
        "\n"
        "END OF EXAMPLES\n";
    return d;
  }();
  return demos;
}

std::string_view answer_instruction() {
  return "Please answer by providing node main features (e.g., names) rather than node "
         "IDs. YOU MUST follow the structure of the examples.";
}

}  // namespace graphwalk
