#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pid/pid.hpp"

namespace pid::testing {

inline std::string fixture_path(const std::string& name) { return std::string(PID_FIXTURE_DIR) + "/" + name; }

inline Document fixture(const std::string& name) { return load_document(fixture_path(name)); }

inline std::vector<std::string> corpus() {
  return {"fig1.pid", "fig2.pid", "fig3.pid", "fig4_psi1.pid", "fig4_psi2.pid", "fig5.pid",
          "fig6.pid", "fig7.pid", "fig8.pid", "fig8_modified.pid"};
}

struct RandomShape {
  int chance = 4;
  int decisions = 2;
  int values = 1;
  double arc_p = 0.35;
  bool classic = false;  // chain the decisions so they are totally ordered
  int max_states = 2;
  bool consistent = true;  // redraw until the induced order is consistent
};

// Random PID: nodes placed in a random topological order, arcs only
// forward. Value nodes come last and each gets at least one parent.
inline Diagram random_diagram_once(std::mt19937_64& rng, const RandomShape& shape) {
  std::bernoulli_distribution arc(shape.arc_p);
  std::uniform_int_distribution<int> states(2, std::max(2, shape.max_states));

  std::vector<NodeKind> kinds;
  for (int i = 0; i < shape.chance; ++i) kinds.push_back(NodeKind::Chance);
  for (int i = 0; i < shape.decisions; ++i) kinds.push_back(NodeKind::Decision);
  std::shuffle(kinds.begin(), kinds.end(), rng);

  DiagramSpec spec;
  int nc = 0, nd = 0;
  std::string last_decision;
  for (NodeKind k : kinds) {
    NodeSpec s;
    s.kind = k;
    s.id = k == NodeKind::Chance ? "C" + std::to_string(nc++) : "D" + std::to_string(nd++);
    int card = states(rng);
    for (int j = 0; j < card; ++j) s.states.push_back(s.id + "_" + std::to_string(j));
    for (const auto& prev : spec.nodes)
      if (arc(rng)) s.parents.push_back(prev.id);
    if (shape.classic && k == NodeKind::Decision && !last_decision.empty() &&
        std::find(s.parents.begin(), s.parents.end(), last_decision) == s.parents.end())
      s.parents.push_back(last_decision);
    if (k == NodeKind::Decision) last_decision = s.id;
    spec.nodes.push_back(std::move(s));
  }
  const std::size_t carriers = spec.nodes.size();
  for (int i = 0; i < shape.values; ++i) {
    NodeSpec s;
    s.kind = NodeKind::Value;
    s.id = "U" + std::to_string(i);
    for (std::size_t j = 0; j < carriers; ++j)
      if (arc(rng)) s.parents.push_back(spec.nodes[j].id);
    if (s.parents.empty() && carriers > 0)
      s.parents.push_back(spec.nodes[std::uniform_int_distribution<std::size_t>(0, carriers - 1)(rng)].id);
    spec.nodes.push_back(std::move(s));
  }
  return validate(spec);
}

inline Diagram random_diagram(std::uint64_t seed, const RandomShape& shape = {}) {
  std::mt19937_64 rng(seed);
  for (;;) {
    Diagram d = random_diagram_once(rng, shape);
    if (!shape.consistent) return d;
    try {
      induce_partial_order(d);
      return d;
    } catch (const InconsistentOrder&) {
    }
  }
}

// All permutations of the carrier nodes consistent with ≺.
inline std::vector<std::vector<NodeId>> linear_extensions(const PartialOrder& po) {
  std::vector<NodeId> nodes = po.carriers();
  std::vector<std::vector<NodeId>> out;
  std::sort(nodes.begin(), nodes.end());
  do {
    if (is_admissible(po, nodes)) out.push_back(nodes);
  } while (std::next_permutation(nodes.begin(), nodes.end()));
  return out;
}

}  // namespace pid::testing
