#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pid/node_set.hpp"

namespace pid {

enum class NodeKind { Chance, Decision, Value };

inline std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Chance: return "chance";
    case NodeKind::Decision: return "decision";
    case NodeKind::Value: return "value";
  }
  return "?";
}

inline std::optional<NodeKind> parse_kind(std::string_view text) {
  if (text == "chance") return NodeKind::Chance;
  if (text == "decision") return NodeKind::Decision;
  if (text == "value") return NodeKind::Value;
  return std::nullopt;
}

// Unvalidated node description, as read from a document.
struct NodeSpec {
  std::string id;
  NodeKind kind = NodeKind::Chance;
  std::vector<std::string> states;
  std::vector<std::string> parents;
};

struct DiagramSpec {
  std::vector<NodeSpec> nodes;
};

struct Violation {
  enum class Kind { DuplicateId, DanglingParent, EmptyStates, ValueWithStates, ValueHasChild, Cycle };
  Kind kind;
  std::string node;     // offending node
  std::string related;  // other end of the offending arc, if any
  std::string message;
};

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<Violation> violations)
      : std::runtime_error(summarize(violations)), violations_(std::move(violations)) {}

  const std::vector<Violation>& violations() const { return violations_; }

 private:
  static std::string summarize(const std::vector<Violation>& vs) {
    std::string out = std::to_string(vs.size()) + " validation error(s)";
    for (const auto& v : vs) out += "; " + v.message;
    return out;
  }
  std::vector<Violation> violations_;
};

struct Node {
  std::string name;
  NodeKind kind = NodeKind::Chance;
  std::vector<std::string> states;
  std::vector<NodeId> parents;
  std::vector<NodeId> children;
};

// A validated influence-diagram structure. Immutable; node ids are
// declaration indices.
class Diagram {
 public:
  Diagram() = default;

  std::size_t size() const { return nodes_.size(); }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  const std::string& name(NodeId id) const { return nodes_.at(id).name; }
  NodeKind kind(NodeId id) const { return nodes_.at(id).kind; }
  const std::vector<NodeId>& parents(NodeId id) const { return nodes_.at(id).parents; }
  const std::vector<NodeId>& children(NodeId id) const { return nodes_.at(id).children; }
  std::size_t cardinality(NodeId id) const { return nodes_.at(id).states.size(); }

  bool is_chance(NodeId id) const { return kind(id) == NodeKind::Chance; }
  bool is_decision(NodeId id) const { return kind(id) == NodeKind::Decision; }
  bool is_value(NodeId id) const { return kind(id) == NodeKind::Value; }
  // Chance and decision nodes carry the temporal order.
  bool is_carrier(NodeId id) const { return kind(id) != NodeKind::Value; }

  std::optional<NodeId> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  NodeId at(std::string_view name) const {
    auto id = find(name);
    if (!id) throw std::out_of_range("unknown node '" + std::string(name) + "'");
    return *id;
  }

  std::vector<NodeId> nodes_of(NodeKind k) const {
    std::vector<NodeId> out;
    for (NodeId i = 0; i < size(); ++i)
      if (kind(i) == k) out.push_back(i);
    return out;
  }
  std::vector<NodeId> chance_nodes() const { return nodes_of(NodeKind::Chance); }
  std::vector<NodeId> decision_nodes() const { return nodes_of(NodeKind::Decision); }
  std::vector<NodeId> value_nodes() const { return nodes_of(NodeKind::Value); }

  NodeSet empty_set() const { return NodeSet(size()); }

  std::string names(const NodeSet& set) const {
    std::string out = "{";
    bool first = true;
    for (NodeId id : set.members()) {
      if (!first) out += ", ";
      out += name(id);
      first = false;
    }
    return out + "}";
  }

  DiagramSpec to_spec() const {
    DiagramSpec spec;
    for (const auto& n : nodes_) {
      NodeSpec s{n.name, n.kind, n.states, {}};
      for (NodeId p : n.parents) s.parents.push_back(nodes_[p].name);
      spec.nodes.push_back(std::move(s));
    }
    return spec;
  }

  friend Diagram validate(const DiagramSpec& spec);

 private:
  std::vector<Node> nodes_;
  std::map<std::string, NodeId> index_;
};

// Builds a Diagram, reporting every violated invariant at once.
inline Diagram validate(const DiagramSpec& spec) {
  std::vector<Violation> errors;
  std::map<std::string, NodeId> index;
  for (NodeId i = 0; i < spec.nodes.size(); ++i) {
    const auto& n = spec.nodes[i];
    if (!index.emplace(n.id, i).second)
      errors.push_back({Violation::Kind::DuplicateId, n.id, "", "duplicate node id '" + n.id + "'"});
    if (n.kind != NodeKind::Value && n.states.empty())
      errors.push_back({Violation::Kind::EmptyStates, n.id, "", "node '" + n.id + "' has no states"});
    if (n.kind == NodeKind::Value && !n.states.empty())
      errors.push_back({Violation::Kind::ValueWithStates, n.id, "",
                        "value node '" + n.id + "' must not declare states"});
  }

  Diagram d;
  d.nodes_.resize(spec.nodes.size());
  for (NodeId i = 0; i < spec.nodes.size(); ++i) {
    const auto& s = spec.nodes[i];
    d.nodes_[i].name = s.id;
    d.nodes_[i].kind = s.kind;
    d.nodes_[i].states = s.states;
    for (const auto& p : s.parents) {
      auto it = index.find(p);
      if (it == index.end()) {
        errors.push_back({Violation::Kind::DanglingParent, s.id, p,
                          "node '" + s.id + "' references unknown parent '" + p + "'"});
        continue;
      }
      NodeId pid = it->second;
      if (std::find(d.nodes_[i].parents.begin(), d.nodes_[i].parents.end(), pid) != d.nodes_[i].parents.end())
        continue;
      d.nodes_[i].parents.push_back(pid);
      if (spec.nodes[pid].kind == NodeKind::Value)
        errors.push_back({Violation::Kind::ValueHasChild, p, s.id,
                          "value node '" + p + "' has child '" + s.id + "'"});
    }
  }
  for (NodeId i = 0; i < d.nodes_.size(); ++i)
    for (NodeId p : d.nodes_[i].parents) d.nodes_[p].children.push_back(i);

  // Cycle detection by iterative DFS; each back edge is reported once.
  enum : char { White, Grey, Black };
  std::vector<char> color(d.nodes_.size(), White);
  for (NodeId root = 0; root < d.nodes_.size(); ++root) {
    if (color[root] != White) continue;
    std::vector<std::pair<NodeId, std::size_t>> stack{{root, 0}};
    color[root] = Grey;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next < d.nodes_[v].children.size()) {
        NodeId c = d.nodes_[v].children[next++];
        if (color[c] == Grey) {
          errors.push_back({Violation::Kind::Cycle, d.nodes_[v].name, d.nodes_[c].name,
                            "cycle through arc " + d.nodes_[v].name + " -> " + d.nodes_[c].name});
        } else if (color[c] == White) {
          color[c] = Grey;
          stack.emplace_back(c, 0);
        }
      } else {
        color[v] = Black;
        stack.pop_back();
      }
    }
  }

  if (!errors.empty()) throw ValidationError(std::move(errors));
  d.index_ = std::move(index);
  return d;
}

// A node is barren if it is a chance or decision node whose children
// (of any arc type) are all barren; childless nodes are barren.
inline NodeSet barren_nodes(const Diagram& d) {
  NodeSet barren(d.size());
  bool changed = true;
  while (changed) {
    changed = false;
    for (NodeId v = 0; v < d.size(); ++v) {
      if (d.is_value(v) || barren.contains(v)) continue;
      bool all = std::all_of(d.children(v).begin(), d.children(v).end(),
                             [&](NodeId c) { return barren.contains(c); });
      if (all) {
        barren.insert(v);
        changed = true;
      }
    }
  }
  return barren;
}

inline Diagram strip_barren(const Diagram& d) {
  NodeSet barren = barren_nodes(d);
  DiagramSpec spec;
  for (NodeId v = 0; v < d.size(); ++v) {
    if (barren.contains(v)) continue;
    NodeSpec s{d.name(v), d.kind(v), d.node(v).states, {}};
    for (NodeId p : d.parents(v))
      if (!barren.contains(p)) s.parents.push_back(d.name(p));
    spec.nodes.push_back(std::move(s));
  }
  return validate(spec);
}

// Arc set over the full node set of a diagram. Directed views keep
// parent/child lists; undirected views store symmetric neighbour lists
// in both.
class GraphView {
 public:
  GraphView(std::size_t n, bool directed) : directed_(directed), parents_(n), children_(n) {}

  std::size_t size() const { return parents_.size(); }
  bool directed() const { return directed_; }

  void add_arc(NodeId from, NodeId to) {
    if (from == to || has_arc(from, to)) return;
    children_[from].push_back(to);
    parents_[to].push_back(from);
    if (!directed_) {
      children_[to].push_back(from);
      parents_[from].push_back(to);
    }
  }
  bool has_arc(NodeId from, NodeId to) const {
    const auto& c = children_.at(from);
    return std::find(c.begin(), c.end(), to) != c.end();
  }
  void remove_node_arcs(NodeId v) {
    for (NodeId c : children_[v]) std::erase(parents_[c], v);
    for (NodeId p : parents_[v]) std::erase(children_[p], v);
    children_[v].clear();
    parents_[v].clear();
  }

  const std::vector<NodeId>& parents(NodeId v) const { return parents_.at(v); }
  const std::vector<NodeId>& children(NodeId v) const { return children_.at(v); }
  // Undirected neighbourhood (children == parents for undirected views).
  const std::vector<NodeId>& neighbours(NodeId v) const { return children_.at(v); }

  std::size_t arc_count() const {
    std::size_t n = 0;
    for (const auto& c : children_) n += c.size();
    return directed_ ? n : n / 2;
  }

 private:
  bool directed_;
  std::vector<std::vector<NodeId>> parents_;
  std::vector<std::vector<NodeId>> children_;
};

inline GraphView full_view(const Diagram& d) {
  GraphView g(d.size(), true);
  for (NodeId v = 0; v < d.size(); ++v)
    for (NodeId p : d.parents(v)) g.add_arc(p, v);
  return g;
}

// The diagram without informational arcs: decisions become parentless.
inline GraphView strip_informational(const Diagram& d) {
  GraphView g(d.size(), true);
  for (NodeId v = 0; v < d.size(); ++v) {
    if (d.is_decision(v)) continue;
    for (NodeId p : d.parents(v)) g.add_arc(p, v);
  }
  return g;
}

// Moral graph: informational arcs dropped, co-parents of chance and value
// nodes married, then value nodes and arc directions removed.
inline GraphView moral_view(const Diagram& d) {
  GraphView g(d.size(), false);
  for (NodeId v = 0; v < d.size(); ++v) {
    if (d.is_decision(v)) continue;
    const auto& ps = d.parents(v);
    if (!d.is_value(v))
      for (NodeId p : ps) g.add_arc(p, v);
    for (std::size_t i = 0; i < ps.size(); ++i)
      for (std::size_t j = i + 1; j < ps.size(); ++j) g.add_arc(ps[i], ps[j]);
  }
  for (NodeId v : d.value_nodes()) g.remove_node_arcs(v);
  return g;
}

}  // namespace pid
