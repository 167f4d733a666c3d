#include "graphwalk/graph_api.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace graphwalk {
namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

struct NameEntry {
  const char* surface;  // lowercased
  ActionKind kind;
};

// NeighbourCheck is the alternate spelling of NeighborCheck.
constexpr NameEntry kNames[] = {
    {"retrievenode", ActionKind::RetrieveNode},
    {"nodefeature", ActionKind::NodeFeature},
    {"neighborcheck", ActionKind::NeighborCheck},
    {"neighbourcheck", ActionKind::NeighborCheck},
    {"nodedegree", ActionKind::NodeDegree},
    {"finish", ActionKind::Finish},
};

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

struct Candidate {
  std::size_t pos;       // index of the name in the text
  std::size_t body_pos;  // index just past the opening bracket
  ActionKind kind;
};

// All occurrences of a known name immediately followed by '[', with a word
// boundary on the left, in text order.
std::vector<Candidate> find_candidates(const std::string& lower) {
  std::vector<Candidate> out;
  for (const NameEntry& entry : kNames) {
    std::string_view name(entry.surface);
    std::size_t from = 0;
    while (true) {
      std::size_t pos = lower.find(name, from);
      if (pos == std::string::npos) break;
      from = pos + 1;
      if (pos > 0 && is_word_char(lower[pos - 1])) continue;
      std::size_t after = pos + name.size();
      if (after >= lower.size() || lower[after] != '[') continue;
      out.push_back({pos, after + 1, entry.kind});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const Candidate& a, const Candidate& b) { return a.pos < b.pos; });
  return out;
}

// Content of the brackets opened just before `body_pos`, bracket-depth
// matched so nested brackets survive.  nullopt when unbalanced.
std::optional<std::string> bracket_body(const std::string& text, std::size_t body_pos) {
  int depth = 1;
  for (std::size_t i = body_pos; i < text.size(); ++i) {
    if (text[i] == '[') ++depth;
    if (text[i] == ']') {
      --depth;
      if (depth == 0) {
        return text.substr(body_pos, i - body_pos);
      }
    }
  }
  return std::nullopt;
}

// First comma not nested inside brackets.
std::optional<std::size_t> top_level_comma(const std::string& body) {
  int depth = 0;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] == '[') ++depth;
    if (body[i] == ']') --depth;
    if (body[i] == ',' && depth == 0) return i;
  }
  return std::nullopt;
}

}  // namespace

const char* action_name(ActionKind kind) {
  switch (kind) {
    case ActionKind::RetrieveNode: return "RetrieveNode";
    case ActionKind::NodeFeature: return "NodeFeature";
    case ActionKind::NeighborCheck: return "NeighborCheck";
    case ActionKind::NodeDegree: return "NodeDegree";
    case ActionKind::Finish: return "Finish";
  }
  return "Unknown";
}

bool operator==(const Action& a, const Action& b) {
  return a.kind == b.kind && a.arg0 == b.arg0 && a.arg1 == b.arg1;
}

std::string action_surface(const Action& a) {
  std::string out = action_name(a.kind);
  out += '[';
  out += a.arg0;
  if (a.kind == ActionKind::NodeFeature || a.kind == ActionKind::NeighborCheck ||
      a.kind == ActionKind::NodeDegree) {
    out += ", ";
    out += a.arg1;
  }
  out += ']';
  return out;
}

Action parse_action(const std::string& text) {
  const std::string lower = to_lower(text);
  std::vector<Candidate> candidates = find_candidates(lower);

  std::optional<ActionParseError> first_failure;
  for (const Candidate& c : candidates) {
    std::optional<std::string> body = bracket_body(text, c.body_pos);
    if (!body) {
      if (!first_failure) {
        first_failure = ActionParseError(ActionParseError::Kind::Malformed,
                                         "call has no closing bracket");
      }
      continue;
    }
    Action a;
    a.kind = c.kind;
    if (c.kind == ActionKind::RetrieveNode || c.kind == ActionKind::Finish) {
      a.arg0 = trim(*body);
    } else {
      std::optional<std::size_t> comma = top_level_comma(*body);
      if (!comma) {
        if (!first_failure) {
          first_failure = ActionParseError(
              ActionParseError::Kind::Arity,
              std::string(action_name(c.kind)) + " takes two arguments");
        }
        continue;
      }
      a.arg0 = trim(std::string_view(*body).substr(0, *comma));
      a.arg1 = trim(std::string_view(*body).substr(*comma + 1));
    }
    std::size_t end = c.body_pos + body->size() + 1;
    a.raw = text.substr(c.pos, end - c.pos);
    return a;
  }
  if (first_failure) {
    throw *first_failure;
  }

  // No known call.  Something[..] means an unknown function, otherwise the
  // sample is plain prose.
  for (std::size_t i = 0; i + 1 < text.size(); ++i) {
    if (text[i + 1] == '[' && is_word_char(text[i])) {
      std::size_t b = i;
      while (b > 0 && is_word_char(text[b - 1])) --b;
      throw ActionParseError(ActionParseError::Kind::UnknownFunction,
                             "unknown function \"" + text.substr(b, i + 1 - b) + "\"");
    }
  }
  throw ActionParseError(ActionParseError::Kind::Malformed, "no call found in sample");
}

const char* observation_kind_name(const Observation& o) {
  struct Visitor {
    const char* operator()(const NodeHit&) const { return "NodeHit"; }
    const char* operator()(const FeatureValue&) const { return "FeatureValue"; }
    const char* operator()(const NeighborList&) const { return "NeighborList"; }
    const char* operator()(const DegreeValue&) const { return "DegreeValue"; }
    const char* operator()(const GraphFault&) const { return "Error"; }
  };
  return std::visit(Visitor{}, o);
}

Observation execute(const Action& action, const KnowledgeGraph& graph,
                    const VectorIndex& index, EmbeddingBackend& backend) {
  try {
    switch (action.kind) {
      case ActionKind::RetrieveNode: {
        RetrievalHit hit = index.retrieve(action.arg0, backend);
        return NodeHit{hit.id, hit.score};
      }
      case ActionKind::NodeFeature:
        return FeatureValue{graph.node_feature(action.arg0, action.arg1)};
      case ActionKind::NeighborCheck: {
        auto ids = graph.neighbors(action.arg0, action.arg1);
        return NeighborList{action.arg0, action.arg1,
                            std::vector<std::string>(ids.begin(), ids.end())};
      }
      case ActionKind::NodeDegree:
        return DegreeValue{graph.degree(action.arg0, action.arg1)};
      case ActionKind::Finish:
        break;
    }
  } catch (const QueryError& e) {
    return GraphFault{e.kind(), e.what()};
  }
  throw std::logic_error("execute called with a Finish action");
}

std::string render_observation(const Observation& o, std::size_t list_cap) {
  struct Visitor {
    std::size_t cap;
    std::string operator()(const NodeHit& v) const {
      return "The ID of this node is " + v.id + ".";
    }
    std::string operator()(const FeatureValue& v) const { return v.value; }
    std::string operator()(const NeighborList& v) const {
      std::ostringstream out;
      out << "The " << v.relation << " neighbors of " << v.node_id << " are: [";
      std::size_t shown = std::min(v.ids.size(), cap);
      for (std::size_t i = 0; i < shown; ++i) {
        if (i > 0) out << ", ";
        out << "'" << v.ids[i] << "'";
      }
      if (v.ids.size() > shown) {
        out << ", ... and " << (v.ids.size() - shown) << " more";
      }
      out << "].";
      return out.str();
    }
    std::string operator()(const DegreeValue& v) const { return std::to_string(v.value); }
    std::string operator()(const GraphFault& v) const { return v.message; }
  };
  return std::visit(Visitor{list_cap}, o);
}

}  // namespace graphwalk
