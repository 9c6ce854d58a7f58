#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pid/dsep.hpp"
#include "pid/model.hpp"
#include "pid/ordering.hpp"

namespace pid {

// Relevant utilities and required variables of one decision under a schema.
struct DecisionRules {
  NodeSet pred;
  NodeSet relevant;
  NodeSet required;
};

// Why a chance node A is significant for a decision D.
struct Witness {
  enum class Clause {
    Connected,            // A is d-connected to a relevant utility given pred(D)
    RequiredLater,        // A is required for a later decision sharing the utility
    ConnectedToRequired,  // A is d-connected to a variable required for a later decision
  };
  NodeId chance = 0;
  NodeId decision = 0;
  OrderSchema schema;
  NodeId utility = 0;
  Clause clause = Clause::Connected;
  std::optional<NodeId> later_decision;
  std::optional<NodeId> via;
  std::vector<NodeId> trail;  // active trail for the d-connection clauses

  friend bool operator==(const Witness&, const Witness&) = default;
};

inline std::string_view to_string(Witness::Clause c) {
  switch (c) {
    case Witness::Clause::Connected: return "connected";
    case Witness::Clause::RequiredLater: return "required-later";
    case Witness::Clause::ConnectedToRequired: return "connected-to-required";
  }
  return "?";
}

enum class SearchMode { Pruned, Exact };

class PairNotIncompatible : public std::invalid_argument {
 public:
  PairNotIncompatible(const std::string& a, const std::string& d)
      : std::invalid_argument("pair not incompatible: " + a + ", " + d) {}
};

// Evaluates the relevance and requirement rules. The rules for the decision
// at position k only look at later decisions, so results are memoized by
// the schema suffix from k (which also fixes pred of every decision from k).
class RuleEngine {
 public:
  RuleEngine(const Diagram& d, const PartialOrder& po) : d_(d), po_(po), bar_(strip_informational(d)) {
    reach_.resize(d.size());
    for (NodeId v : d.decision_nodes()) reach_[v] = descendants(bar_, v);
  }

  const Diagram& diagram() const { return d_; }
  const PartialOrder& order() const { return po_; }
  const GraphView& bar() const { return bar_; }

  const DecisionRules& at(const OrderSchema& s, std::size_t k) {
    std::string key = suffix_key(s, k);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    std::vector<const DecisionRules*> later;
    for (std::size_t j = k + 1; j < s.decisions.size(); ++j) later.push_back(&at(s, j));

    const NodeId dk = s.decisions[k];
    DecisionRules r;
    r.pred = pred_set(s, dk);
    r.relevant = NodeSet(d_.size());
    for (NodeId v : d_.value_nodes())
      if (reach_[dk].contains(v)) r.relevant.insert(v);
    for (const DecisionRules* rj : later) {
      bool influences = rj->required.contains(dk);
      for (NodeId x : rj->required.members())
        if (!influences && d_.is_chance(x) && reach_[dk].contains(x)) influences = true;
      if (influences) r.relevant |= rj->relevant;
    }

    r.required = NodeSet(d_.size());
    for (NodeId x : r.pred.members()) {
      NodeSet reach = reachable_from(x, conditioning(r.pred, dk, x));
      bool req = reach.intersects(r.relevant);
      for (const DecisionRules* rj : later) {
        if (req) break;
        if (!rj->relevant.intersects(r.relevant)) continue;
        if (rj->required.contains(x)) req = true;
        for (NodeId y : rj->required.members())
          if (d_.is_chance(y) && reach.contains(y)) req = true;
      }
      if (req) r.required.insert(x);
    }
    return memo_.emplace(std::move(key), std::move(r)).first->second;
  }

  const DecisionRules& for_decision(const OrderSchema& s, NodeId decision) { return at(s, s.position(decision)); }

  // ({D} ∪ pred(D)) \ {x}
  NodeSet conditioning(const NodeSet& pred, NodeId decision, NodeId x) const {
    NodeSet c = pred;
    c.insert(decision);
    c.erase(x);
    return c;
  }

  NodeSet reachable_from(NodeId x, const NodeSet& cond) const {
    NodeSet t(d_.size());
    return d_connected(SeparationQuery{&bar_, x, t, cond}).reachable;
  }

  std::string suffix_key(const OrderSchema& s, std::size_t k) const {
    std::string key;
    for (std::size_t j = k; j < s.decisions.size(); ++j) key += std::to_string(s.decisions[j]) + ",";
    key += "|";
    for (NodeId v = 0; v < s.slot.size(); ++v) {
      if (s.slot[v] < 0) continue;
      key += s.slot[v] > static_cast<int>(k) ? std::to_string(s.slot[v]) : std::string("p");
      key += ",";
    }
    return key;
  }

  std::size_t memo_size() const { return memo_.size(); }

 private:
  const Diagram& d_;
  const PartialOrder& po_;
  GraphView bar_;
  std::vector<NodeSet> reach_;
  std::unordered_map<std::string, DecisionRules> memo_;
};

inline NodeSet relevant_utilities(RuleEngine& engine, const OrderSchema& s, NodeId decision) {
  return engine.for_decision(s, decision).relevant;
}

inline NodeSet required_variables(RuleEngine& engine, const OrderSchema& s, NodeId decision) {
  return engine.for_decision(s, decision).required;
}

inline NodeSet relevant_utilities(const Diagram& d, const OrderSchema& s, NodeId decision) {
  PartialOrder po = induce_partial_order(d);
  RuleEngine engine(d, po);
  return relevant_utilities(engine, s, decision);
}

inline NodeSet required_variables(const Diagram& d, const OrderSchema& s, NodeId decision) {
  PartialOrder po = induce_partial_order(d);
  RuleEngine engine(d, po);
  return required_variables(engine, s, decision);
}

// Significance of A for D under one schema that places A in the slot
// directly before D.
inline std::optional<Witness> significant_rel(RuleEngine& engine, const OrderSchema& s, NodeId a, NodeId decision) {
  const Diagram& d = engine.diagram();
  if (!d.is_chance(a) || !d.is_decision(decision) || !engine.order().incompatible(a, decision))
    throw PairNotIncompatible(d.name(a), d.name(decision));
  const std::size_t k = s.position(decision);
  if (s.slot.at(a) != static_cast<int>(k))
    throw std::invalid_argument("significant_rel: schema does not place " + d.name(a) + " directly before " +
                                d.name(decision));

  const DecisionRules& r = engine.at(s, k);
  const NodeSet cond = engine.conditioning(r.pred, decision, a);
  const NodeSet reach = engine.reachable_from(a, cond);

  for (NodeId psi : r.relevant.members()) {
    if (reach.contains(psi))
      return Witness{a, decision, s, psi, Witness::Clause::Connected, std::nullopt, std::nullopt,
                     active_trail(engine.bar(), a, psi, cond)};
  }
  for (NodeId psi : r.relevant.members()) {
    for (std::size_t j = k + 1; j < s.decisions.size(); ++j) {
      const DecisionRules& rj = engine.at(s, j);
      if (!rj.relevant.contains(psi)) continue;
      if (rj.required.contains(a))
        return Witness{a, decision, s, psi, Witness::Clause::RequiredLater, s.decisions[j], std::nullopt, {}};
      for (NodeId x : rj.required.members()) {
        if (d.is_chance(x) && reach.contains(x))
          return Witness{a, decision, s, psi, Witness::Clause::ConnectedToRequired, s.decisions[j], x,
                         active_trail(engine.bar(), a, x, cond)};
      }
    }
  }
  return std::nullopt;
}

using PairSet = std::set<std::pair<NodeId, NodeId>>;

namespace detail {

inline std::string set_key(const NodeSet& s) {
  std::string k;
  for (NodeId v : s.members()) k += std::to_string(v) + ",";
  return k;
}

// Incompatible (chance, decision) pairs with both ends in `among`.
inline bool pairs_settled(const PartialOrder& po, const NodeSet& among, const PairSet& insignificant) {
  for (NodeId a : po.chances()) {
    if (!among.contains(a)) continue;
    for (NodeId dj : po.decisions())
      if (among.contains(dj) && po.incompatible(a, dj) && !insignificant.count({a, dj})) return false;
  }
  return true;
}

}  // namespace detail

// Searches schemas placing A directly before D. Exact mode tries every such
// schema. Pruned mode evaluates each distinct (pred(D), suffix) once, and
// when every incompatible pair among the nodes after D is already known to
// be insignificant it keeps only the first suffix for each pred(D). Both
// modes report the witness of the first significant schema in enumeration
// order.
inline std::optional<Witness> is_significant(RuleEngine& engine, NodeId a, NodeId decision,
                                             SearchMode mode = SearchMode::Pruned,
                                             const PairSet& insignificant = {}) {
  const Diagram& d = engine.diagram();
  const PartialOrder& po = engine.order();
  if (!d.is_chance(a) || !d.is_decision(decision) || !po.incompatible(a, decision))
    throw PairNotIncompatible(d.name(a), d.name(decision));

  auto exact_first = [&]() {
    std::optional<Witness> found;
    std::set<std::string> seen;
    for_each_schema(po, [&](const OrderSchema& s) {
      const std::size_t k = s.position(decision);
      if (s.slot[a] != static_cast<int>(k)) return true;
      // pred(D) and the suffix determine the outcome completely
      std::string key = detail::set_key(pred_set(s, decision)) + "#" + engine.suffix_key(s, k);
      if (!seen.insert(key).second) return true;
      found = significant_rel(engine, s, a, decision);
      return !found;
    });
    return found;
  };

  if (mode == SearchMode::Exact) {
    std::optional<Witness> found;
    for_each_schema(po, [&](const OrderSchema& s) {
      if (s.slot[a] != static_cast<int>(s.position(decision))) return true;
      found = significant_rel(engine, s, a, decision);
      return !found;
    });
    return found;
  }

  bool any = false;
  std::set<std::string> seen;
  for_each_schema(po, [&](const OrderSchema& s) {
    const std::size_t k = s.position(decision);
    if (s.slot[a] != static_cast<int>(k)) return true;
    NodeSet pred = pred_set(s, decision);
    NodeSet after(d.size());
    for (NodeId v : po.carriers())
      if (v != decision && !pred.contains(v)) after.insert(v);
    std::string key = detail::set_key(pred) + "#";
    if (!detail::pairs_settled(po, after, insignificant)) key += engine.suffix_key(s, k);
    if (!seen.insert(key).second) return true;
    any = significant_rel(engine, s, a, decision).has_value();
    return !any;
  });
  if (!any) return std::nullopt;
  return exact_first();
}

inline std::optional<Witness> is_significant(const Diagram& d, NodeId a, NodeId decision,
                                             SearchMode mode = SearchMode::Pruned) {
  PartialOrder po = induce_partial_order(d);
  RuleEngine engine(d, po);
  return is_significant(engine, a, decision, mode);
}

struct DecisionSummary {
  NodeId decision = 0;
  NodeSet pred;
  NodeSet relevant;
  NodeSet required;
  friend bool operator==(const DecisionSummary&, const DecisionSummary&) = default;
};

struct Report {
  bool welldefined = true;
  OrderSchema canonical;
  std::vector<DecisionSummary> decisions;               // w.r.t. the canonical schema
  std::vector<std::pair<NodeId, NodeId>> checked_pairs;  // incompatible (chance, decision)
  std::vector<Witness> witnesses;                        // sorted by (chance, decision)
  friend bool operator==(const Report&, const Report&) = default;
};

// Incompatible (chance, decision) pairs, latest decisions first: ordered by
// how many nodes the decision precedes, then by declaration order.
inline std::vector<std::pair<NodeId, NodeId>> significance_pairs(const PartialOrder& po) {
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (NodeId dj : po.decisions())
    for (NodeId a : po.chances())
      if (po.incompatible(a, dj)) pairs.emplace_back(a, dj);
  auto successors = [&](NodeId v) {
    std::size_t n = 0;
    for (NodeId u : po.carriers()) n += po.precedes(v, u) ? 1 : 0;
    return n;
  };
  std::stable_sort(pairs.begin(), pairs.end(), [&](const auto& x, const auto& y) {
    auto sx = successors(x.second), sy = successors(y.second);
    if (sx != sy) return sx < sy;
    return x < y;
  });
  return pairs;
}

inline Report check_welldefined(const Diagram& d, SearchMode mode = SearchMode::Pruned,
                                const std::vector<OrderConstraint>& extra = {}) {
  PartialOrder po = induce_partial_order(d, extra);
  RuleEngine engine(d, po);
  Report report;
  report.canonical = canonical_schema(po);
  for (NodeId dj : report.canonical.decisions) {
    const auto& r = engine.for_decision(report.canonical, dj);
    report.decisions.push_back({dj, r.pred, r.relevant, r.required});
  }
  PairSet insignificant;
  for (auto [a, dj] : significance_pairs(po)) {
    report.checked_pairs.emplace_back(a, dj);
    auto w = is_significant(engine, a, dj, mode, insignificant);
    if (w) {
      report.witnesses.push_back(std::move(*w));
    } else {
      insignificant.insert({a, dj});
    }
  }
  std::sort(report.checked_pairs.begin(), report.checked_pairs.end());
  std::sort(report.witnesses.begin(), report.witnesses.end(), [](const Witness& x, const Witness& y) {
    return std::make_pair(x.chance, x.decision) < std::make_pair(y.chance, y.decision);
  });
  report.welldefined = report.witnesses.empty();
  return report;
}

struct Resolution {
  std::vector<OrderConstraint> constraints;  // first entry resolves the originating witness
  bool welldefined = false;
  std::size_t remaining_witnesses = 0;
};

// For every witness (A, D) proposes A ≺ D (observe A before D) and D ≺ A,
// each greedily extended with further constraints until the diagram is
// welldefined or no consistent constraint remains. Sorted by success, then
// number of constraints.
inline std::vector<Resolution> suggest_resolutions(const Diagram& d, const Report& report,
                                                   SearchMode mode = SearchMode::Pruned) {
  std::vector<Resolution> out;
  if (report.welldefined) return out;

  auto try_check = [&](const std::vector<OrderConstraint>& cs) -> std::optional<Report> {
    try {
      return check_welldefined(d, mode, cs);
    } catch (const InconsistentOrder&) {
      return std::nullopt;
    }
  };

  const std::size_t budget = report.checked_pairs.size() + 1;
  for (const Witness& w : report.witnesses) {
    for (OrderConstraint first : {OrderConstraint{w.chance, w.decision}, OrderConstraint{w.decision, w.chance}}) {
      std::vector<OrderConstraint> cs{first};
      auto current = try_check(cs);
      if (!current) continue;
      while (!current->welldefined && cs.size() < budget) {
        const Witness& next = current->witnesses.front();
        std::optional<Report> best;
        OrderConstraint chosen{};
        for (OrderConstraint c : {OrderConstraint{next.chance, next.decision},
                                  OrderConstraint{next.decision, next.chance}}) {
          auto trial = cs;
          trial.push_back(c);
          auto r = try_check(trial);
          if (r && (!best || r->witnesses.size() < best->witnesses.size())) {
            best = std::move(r);
            chosen = c;
          }
        }
        if (!best) break;
        cs.push_back(chosen);
        current = std::move(best);
      }
      Resolution res{cs, current->welldefined, current->witnesses.size()};
      bool dup = std::any_of(out.begin(), out.end(), [&](const Resolution& o) { return o.constraints == cs; });
      if (!dup) out.push_back(std::move(res));
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Resolution& x, const Resolution& y) {
    if (x.welldefined != y.welldefined) return x.welldefined;
    return x.constraints.size() < y.constraints.size();
  });
  return out;
}

}  // namespace pid
