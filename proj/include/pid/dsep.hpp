#pragma once

#include <deque>
#include <map>
#include <stdexcept>
#include <vector>

#include "pid/model.hpp"
#include "pid/ordering.hpp"

namespace pid {

// One d-connection question over a directed view. Value nodes are sinks
// and may appear as targets.
struct SeparationQuery {
  const GraphView* view = nullptr;
  NodeId source = 0;
  NodeSet targets;
  NodeSet conditioning;
};

struct SeparationResult {
  bool connected = false;
  NodeSet reachable;  // unconditioned nodes with an active trail from the source
};

namespace detail {

// Ball-passing reachability. A ball arriving at an unconditioned node from
// a child moves on to parents and children; from a parent it moves on to
// children only. At a conditioned node a ball from a parent bounces back to
// the parents and a ball from a child stops. Returns, per node, how the
// ball reached it (bit 0: from a child, bit 1: from a parent).
struct BallState {
  NodeId node;
  bool from_child;
};

inline std::vector<unsigned char> pass_ball(const GraphView& g, const std::vector<NodeId>& starts,
                                            const NodeSet& conditioning,
                                            std::map<std::pair<NodeId, bool>, BallState>* trace = nullptr) {
  std::vector<unsigned char> visited(g.size(), 0);
  std::deque<BallState> queue;
  for (NodeId s : starts) {
    visited[s] |= 1;
    queue.push_back({s, true});
  }
  auto schedule = [&](NodeId to, bool from_child, const BallState& origin) {
    unsigned char bit = from_child ? 1 : 2;
    if (visited[to] & bit) return;
    visited[to] |= bit;
    if (trace) trace->emplace(std::make_pair(to, from_child), origin);
    queue.push_back({to, from_child});
  };
  while (!queue.empty()) {
    BallState cur = queue.front();
    queue.pop_front();
    const bool observed = conditioning.contains(cur.node);
    if (cur.from_child) {
      if (observed) continue;
      for (NodeId p : g.parents(cur.node)) schedule(p, true, cur);
      for (NodeId c : g.children(cur.node)) schedule(c, false, cur);
    } else {
      if (observed) {
        for (NodeId p : g.parents(cur.node)) schedule(p, true, cur);
      } else {
        for (NodeId c : g.children(cur.node)) schedule(c, false, cur);
      }
    }
  }
  return visited;
}

}  // namespace detail

inline SeparationResult d_connected(const SeparationQuery& q) {
  if (!q.view || !q.view->directed()) throw std::invalid_argument("d_connected needs a directed view");
  if (q.conditioning.contains(q.source)) throw std::invalid_argument("d_connected: source is conditioned");
  SeparationResult r;
  r.reachable = NodeSet(q.view->size());
  auto visited = detail::pass_ball(*q.view, {q.source}, q.conditioning);
  for (NodeId v = 0; v < q.view->size(); ++v)
    if (visited[v] && !q.conditioning.contains(v)) r.reachable.insert(v);
  r.connected = r.reachable.intersects(q.targets);
  return r;
}

inline bool d_connected(const GraphView& view, NodeId source, NodeId target, const NodeSet& conditioning) {
  NodeSet t(view.size());
  t.insert(target);
  return d_connected(SeparationQuery{&view, source, t, conditioning}).connected;
}

// An active trail from source to target (inclusive), or empty if none.
inline std::vector<NodeId> active_trail(const GraphView& view, NodeId source, NodeId target,
                                        const NodeSet& conditioning) {
  if (source == target) return {source};
  if (conditioning.contains(target)) return {};
  std::map<std::pair<NodeId, bool>, detail::BallState> trace;
  auto visited = detail::pass_ball(view, {source}, conditioning, &trace);
  if (!visited[target]) return {};
  std::vector<NodeId> path;
  detail::BallState cur{target, (visited[target] & 1) != 0};
  for (;;) {
    path.push_back(cur.node);
    if (cur.node == source && cur.from_child) break;
    auto it = trace.find({cur.node, cur.from_child});
    if (it == trace.end()) break;
    cur = it->second;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

// Reflexive: a node reaches itself by the empty path.
inline bool directed_path_exists(const GraphView& view, NodeId from, NodeId to) {
  if (from == to) return true;
  std::vector<bool> seen(view.size(), false);
  std::vector<NodeId> stack{from};
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    for (NodeId c : view.children(u)) {
      if (c == to) return true;
      if (!seen[c]) {
        seen[c] = true;
        stack.push_back(c);
      }
    }
  }
  return false;
}

inline NodeSet descendants(const GraphView& view, NodeId from) {
  NodeSet out(view.size());
  std::vector<NodeId> stack{from};
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    for (NodeId c : view.children(u))
      if (!out.contains(c)) {
        out.insert(c);
        stack.push_back(c);
      }
  }
  return out;
}

class NotTotalOrder : public std::invalid_argument {
 public:
  NotTotalOrder() : std::invalid_argument("not a total order: decisions are not totally ordered") {}
};

// Decision Bayes-ball baseline. Works on the diagram with its informational
// arcs kept and no-forgetting arcs added, so a decision's value
// descendants include everything downstream of later decisions. For D the
// ball starts at those value nodes with {D} ∪ pred(D) observed; the
// requisite observations are the visited members of pred(D).
inline NodeSet bayes_ball_requisite(const Diagram& d, const PartialOrder& po, NodeId decision) {
  if (!po.decisions_totally_ordered()) throw NotTotalOrder();
  const OrderSchema schema = canonical_schema(po);

  GraphView g = full_view(d);
  for (NodeId dj : schema.decisions)
    for (NodeId p : pred_set(schema, dj).members()) g.add_arc(p, dj);

  NodeSet pred = pred_set(schema, decision);
  NodeSet observed = pred;
  observed.insert(decision);

  std::vector<NodeId> starts;
  NodeSet below = descendants(g, decision);
  for (NodeId v : d.value_nodes())
    if (below.contains(v)) starts.push_back(v);
  if (starts.empty()) return NodeSet(d.size());

  auto visited = detail::pass_ball(g, starts, observed);
  NodeSet out(d.size());
  for (NodeId v : pred.members())
    if (visited[v]) out.insert(v);
  return out;
}

// Elimination neighbourhood N(D): members of pred(D) joined to D in the
// moral graph by a path whose intermediate nodes lie outside pred(D).
inline NodeSet elimination_neighbors(const Diagram& d, const OrderSchema& schema, NodeId decision) {
  if (!d.is_decision(decision)) throw std::invalid_argument("elimination_neighbors: not a decision");
  GraphView moral = moral_view(d);
  NodeSet pred = pred_set(schema, decision);
  NodeSet out(d.size());
  std::vector<bool> seen(d.size(), false);
  std::vector<NodeId> stack{decision};
  seen[decision] = true;
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    for (NodeId w : moral.neighbours(u)) {
      if (seen[w]) continue;
      seen[w] = true;
      if (pred.contains(w)) {
        out.insert(w);
      } else {
        stack.push_back(w);
      }
    }
  }
  return out;
}

}  // namespace pid
