#pragma once

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pid/model.hpp"

namespace pid {

class InconsistentOrder : public std::runtime_error {
 public:
  InconsistentOrder(std::string first, std::string second)
      : std::runtime_error("inconsistent order: " + first + " and " + second + " precede each other"),
        first_(std::move(first)),
        second_(std::move(second)) {}
  const std::string& first() const { return first_; }
  const std::string& second() const { return second_; }

 private:
  std::string first_, second_;
};

// Extra temporal constraint `before` ≺ `after`, used when proposing
// resolutions for ambiguous diagrams.
struct OrderConstraint {
  NodeId before;
  NodeId after;
  friend bool operator==(const OrderConstraint&, const OrderConstraint&) = default;
};

// Temporal precedence over chance and decision nodes, transitively closed.
class PartialOrder {
 public:
  PartialOrder() = default;
  PartialOrder(std::vector<NodeKind> kinds, std::vector<std::vector<bool>> before)
      : kinds_(std::move(kinds)), before_(std::move(before)) {}

  std::size_t size() const { return kinds_.size(); }
  NodeKind kind(NodeId v) const { return kinds_.at(v); }
  bool is_carrier(NodeId v) const { return kinds_.at(v) != NodeKind::Value; }

  bool precedes(NodeId x, NodeId y) const { return before_.at(x).at(y); }

  bool incompatible(NodeId x, NodeId y) const {
    if (x == y) throw std::invalid_argument("incompatible: identical nodes");
    return !precedes(x, y) && !precedes(y, x);
  }

  std::vector<NodeId> carriers() const {
    std::vector<NodeId> out;
    for (NodeId v = 0; v < size(); ++v)
      if (is_carrier(v)) out.push_back(v);
    return out;
  }
  std::vector<NodeId> decisions() const {
    std::vector<NodeId> out;
    for (NodeId v = 0; v < size(); ++v)
      if (kinds_[v] == NodeKind::Decision) out.push_back(v);
    return out;
  }
  std::vector<NodeId> chances() const {
    std::vector<NodeId> out;
    for (NodeId v = 0; v < size(); ++v)
      if (kinds_[v] == NodeKind::Chance) out.push_back(v);
    return out;
  }

  // Incompatible pairs (x, y) with x < y in declaration order.
  std::vector<std::pair<NodeId, NodeId>> incompatible_pairs() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    auto cs = carriers();
    for (std::size_t i = 0; i < cs.size(); ++i)
      for (std::size_t j = i + 1; j < cs.size(); ++j)
        if (incompatible(cs[i], cs[j])) out.emplace_back(cs[i], cs[j]);
    return out;
  }

  // True when the decisions are totally ordered (a classic influence diagram).
  bool decisions_totally_ordered() const {
    auto ds = decisions();
    for (std::size_t i = 0; i < ds.size(); ++i)
      for (std::size_t j = i + 1; j < ds.size(); ++j)
        if (incompatible(ds[i], ds[j])) return false;
    return true;
  }

  friend bool operator==(const PartialOrder&, const PartialOrder&) = default;

 private:
  std::vector<NodeKind> kinds_;
  std::vector<std::vector<bool>> before_;
};

namespace detail {

inline void transitive_close(std::vector<std::vector<bool>>& rel) {
  const std::size_t n = rel.size();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (rel[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (rel[k][j]) rel[i][j] = true;
}

}  // namespace detail

// Induces ≺ from the arcs: observations precede the decision observing
// them, decisions precede their descendants, never-observed chance nodes
// follow every decision, and a chance node observed before D_j follows
// every decision preceding D_j that does not itself observe it.
inline PartialOrder induce_partial_order(const Diagram& d, const std::vector<OrderConstraint>& extra = {}) {
  const std::size_t n = d.size();
  std::vector<std::vector<bool>> rel(n, std::vector<bool>(n, false));

  for (NodeId v : d.decision_nodes()) {
    for (NodeId p : d.parents(v)) rel[p][v] = true;
    // every node reachable from a decision along arcs of the full diagram
    std::vector<NodeId> stack(d.children(v).begin(), d.children(v).end());
    std::vector<bool> seen(n, false);
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      if (seen[u]) continue;
      seen[u] = true;
      if (d.is_carrier(u)) rel[v][u] = true;
      for (NodeId c : d.children(u)) stack.push_back(c);
    }
  }
  for (const auto& c : extra) rel.at(c.before).at(c.after) = true;

  const auto decisions = d.decision_nodes();
  const auto chances = d.chance_nodes();
  auto check = [&] {
    for (NodeId x = 0; x < n; ++x) {
      if (rel[x][x]) {
        for (NodeId y = 0; y < n; ++y)
          if (y != x && rel[x][y] && rel[y][x]) throw InconsistentOrder(d.name(x), d.name(y));
        throw InconsistentOrder(d.name(x), d.name(x));
      }
    }
  };

  for (;;) {
    detail::transitive_close(rel);
    check();
    std::vector<std::pair<NodeId, NodeId>> added;
    for (NodeId a : chances) {
      bool observed = std::any_of(decisions.begin(), decisions.end(), [&](NodeId dj) { return rel[a][dj]; });
      for (NodeId di : decisions) {
        if (rel[di][a]) continue;
        if (!observed) {
          added.emplace_back(di, a);
          continue;
        }
        if (rel[a][di]) continue;
        bool later = std::any_of(decisions.begin(), decisions.end(),
                                 [&](NodeId dj) { return rel[di][dj] && rel[a][dj]; });
        if (later) added.emplace_back(di, a);
      }
    }
    if (added.empty()) break;
    for (auto [x, y] : added) rel[x][y] = true;
  }

  std::vector<NodeKind> kinds;
  for (NodeId v = 0; v < n; ++v) kinds.push_back(d.kind(v));
  return PartialOrder(std::move(kinds), std::move(rel));
}

inline bool incompatible(const PartialOrder& po, NodeId x, NodeId y) { return po.incompatible(x, y); }

// Canonical representative of the admissible total orders that differ only
// by permutations of chance nodes between the same two decisions.
struct OrderSchema {
  std::vector<NodeId> decisions;  // D_(1) … D_(n)
  std::vector<int> slot;          // per node id; -1 for non-chance nodes

  std::size_t position(NodeId decision) const {
    auto it = std::find(decisions.begin(), decisions.end(), decision);
    if (it == decisions.end()) throw std::out_of_range("decision not in schema");
    return static_cast<std::size_t>(it - decisions.begin());
  }

  // C_0, D_(1), C_1, …, D_(n), C_n with chance nodes in declaration order.
  std::vector<NodeId> sequence() const {
    std::vector<NodeId> out;
    for (std::size_t k = 0; k <= decisions.size(); ++k) {
      for (NodeId v = 0; v < slot.size(); ++v)
        if (slot[v] == static_cast<int>(k)) out.push_back(v);
      if (k < decisions.size()) out.push_back(decisions[k]);
    }
    return out;
  }

  friend bool operator==(const OrderSchema&, const OrderSchema&) = default;
};

// Visits every admissible schema in lexicographic order of the decision
// sequence, then of the slot vector. Stops early when `visit` returns false.
inline void for_each_schema(const PartialOrder& po, const std::function<bool(const OrderSchema&)>& visit) {
  const auto decisions = po.decisions();
  const auto chances = po.chances();
  const std::size_t n = decisions.size();

  OrderSchema schema;
  schema.slot.assign(po.size(), -1);
  std::vector<bool> used(n, false);
  bool stop = false;

  std::function<void(std::size_t)> assign_slots = [&](std::size_t ci) {
    if (stop) return;
    if (ci == chances.size()) {
      if (!visit(schema)) stop = true;
      return;
    }
    NodeId a = chances[ci];
    int lo = 0, hi = static_cast<int>(n);
    for (std::size_t p = 0; p < n; ++p) {
      if (po.precedes(schema.decisions[p], a)) lo = std::max(lo, static_cast<int>(p) + 1);
      if (po.precedes(a, schema.decisions[p])) hi = std::min(hi, static_cast<int>(p));
    }
    for (int s = lo; s <= hi && !stop; ++s) {
      schema.slot[a] = s;
      assign_slots(ci + 1);
    }
    schema.slot[a] = -1;
  };

  std::function<void()> permute = [&] {
    if (stop) return;
    if (schema.decisions.size() == n) {
      assign_slots(0);
      return;
    }
    for (std::size_t i = 0; i < n && !stop; ++i) {
      if (used[i]) continue;
      // every decision that must precede decisions[i] is already placed
      bool ready = true;
      for (std::size_t j = 0; j < n; ++j)
        if (!used[j] && j != i && po.precedes(decisions[j], decisions[i])) ready = false;
      if (!ready) continue;
      used[i] = true;
      schema.decisions.push_back(decisions[i]);
      permute();
      schema.decisions.pop_back();
      used[i] = false;
    }
  };
  permute();
}

inline std::vector<OrderSchema> enumerate_schemas(const PartialOrder& po, std::size_t limit = 0) {
  std::vector<OrderSchema> out;
  for_each_schema(po, [&](const OrderSchema& s) {
    out.push_back(s);
    return limit == 0 || out.size() < limit;
  });
  return out;
}

inline OrderSchema canonical_schema(const PartialOrder& po) {
  auto first = enumerate_schemas(po, 1);
  if (first.empty()) throw std::logic_error("partial order admits no schema");
  return first.front();
}

inline bool is_admissible(const PartialOrder& po, const std::vector<NodeId>& order) {
  std::vector<std::size_t> pos(po.size(), SIZE_MAX);
  for (std::size_t i = 0; i < order.size(); ++i) pos.at(order[i]) = i;
  for (NodeId x : po.carriers())
    for (NodeId y : po.carriers())
      if (po.precedes(x, y) && !(pos[x] < pos[y])) return false;
  return true;
}

// Whether the neighbours at positions i and i+1 may be swapped under
// C-equivalence: same kind, or incompatible.
inline bool c_swap_allowed(const PartialOrder& po, const std::vector<NodeId>& order, std::size_t i) {
  if (i + 1 >= order.size()) throw std::out_of_range("c_swap_allowed: position out of range");
  NodeId x = order[i], y = order[i + 1];
  if (po.kind(x) == po.kind(y)) return true;
  return po.incompatible(x, y);
}

// Maps an admissible total order to the schema that represents it.
inline OrderSchema schema_of(const PartialOrder& po, const std::vector<NodeId>& order) {
  OrderSchema s;
  s.slot.assign(po.size(), -1);
  int k = 0;
  for (NodeId v : order) {
    if (po.kind(v) == NodeKind::Decision) {
      s.decisions.push_back(v);
      ++k;
    } else if (po.kind(v) == NodeKind::Chance) {
      s.slot[v] = k;
    }
  }
  return s;
}

// pred(D): chance nodes in slots up to D's position plus earlier decisions.
inline NodeSet pred_set(const OrderSchema& schema, NodeId decision) {
  const std::size_t p = schema.position(decision);
  NodeSet out(schema.slot.size());
  for (std::size_t k = 0; k < p; ++k) out.insert(schema.decisions[k]);
  for (NodeId v = 0; v < schema.slot.size(); ++v)
    if (schema.slot[v] >= 0 && schema.slot[v] <= static_cast<int>(p)) out.insert(v);
  return out;
}

}  // namespace pid
