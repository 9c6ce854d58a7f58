#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "pid/model.hpp"
#include "pid/ordering.hpp"

namespace pid {

// Tables attached to a diagram. CPT rows are indexed by the parents in
// declared order (first parent slowest) with the node's own state fastest;
// utility tables are indexed the same way without an own-state axis.
struct Realization {
  std::vector<std::vector<double>> tables;  // per node id; empty for decisions

  friend bool operator==(const Realization&, const Realization&) = default;
};

class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::size_t parent_configurations(const Diagram& d, NodeId v) {
  std::size_t n = 1;
  for (NodeId p : d.parents(v)) n *= d.cardinality(p);
  return n;
}

inline std::size_t expected_table_size(const Diagram& d, NodeId v) {
  if (d.is_decision(v)) return 0;
  std::size_t n = parent_configurations(d, v);
  return d.is_chance(v) ? n * d.cardinality(v) : n;
}

// Throws std::invalid_argument describing the first mismatch.
inline void check_realization(const Diagram& d, const Realization& r, double row_tol = 1e-12) {
  if (r.tables.size() != d.size()) throw std::invalid_argument("realization does not cover the diagram");
  for (NodeId v = 0; v < d.size(); ++v) {
    const auto& t = r.tables[v];
    if (t.size() != expected_table_size(d, v))
      throw std::invalid_argument("table for '" + d.name(v) + "' has " + std::to_string(t.size()) +
                                  " entries, expected " + std::to_string(expected_table_size(d, v)));
    for (double x : t)
      if (!std::isfinite(x)) throw std::invalid_argument("table for '" + d.name(v) + "' has a non-finite entry");
    if (!d.is_chance(v)) continue;
    const std::size_t k = d.cardinality(v);
    for (std::size_t row = 0; row * k < t.size(); ++row) {
      double sum = 0;
      for (std::size_t s = 0; s < k; ++s) {
        double p = t[row * k + s];
        if (p < 0 || p > 1) throw std::invalid_argument("CPT of '" + d.name(v) + "' has an entry outside [0,1]");
        sum += p;
      }
      if (std::abs(sum - 1.0) > row_tol)
        throw std::invalid_argument("CPT row " + std::to_string(row) + " of '" + d.name(v) + "' sums to " +
                                    std::to_string(sum));
    }
  }
}

// Deterministic in (diagram, seed): CPT rows are normalized uniform
// positives, utilities are integers in 0..100.
inline Realization random_realization(const Diagram& d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> utility(0, 100);
  Realization r;
  r.tables.resize(d.size());
  for (NodeId v = 0; v < d.size(); ++v) {
    auto& t = r.tables[v];
    t.resize(expected_table_size(d, v));
    if (d.is_value(v)) {
      for (double& x : t) x = utility(rng);
    } else if (d.is_chance(v)) {
      const std::size_t k = d.cardinality(v);
      for (std::size_t row = 0; row * k < t.size(); ++row) {
        double sum = 0;
        for (std::size_t s = 0; s < k; ++s) {
          double x = 0;
          while (x <= 0) x = unit(rng);
          t[row * k + s] = x;
          sum += x;
        }
        for (std::size_t s = 0; s < k; ++s) t[row * k + s] /= sum;
      }
    }
  }
  return r;
}

inline bool near_max(double value, double max, double tol) {
  return max - value <= tol * std::max(1.0, std::abs(max));
}

// Decision function of one decision: for every configuration of pred(D)
// (mixed radix, first variable slowest) the conditional expected utility of
// each alternative, the maximizer set and the configuration's probability
// weight P(chance part of pred | decision part).
struct DecisionFunction {
  NodeId decision = 0;
  std::vector<NodeId> pred;
  std::vector<std::size_t> pred_card;
  std::vector<double> weight;
  std::vector<std::vector<double>> eu;
  std::vector<std::vector<int>> maximizers;
  std::vector<double> value;

  std::size_t configurations() const { return weight.size(); }

  // Configuration index for an assignment given per node id.
  std::size_t index(const std::vector<int>& assignment) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) idx = idx * pred_card[i] + assignment.at(pred[i]);
    return idx;
  }

  std::vector<int> maximizers_at(std::size_t config, double tol) const {
    std::vector<int> out;
    const auto& e = eu[config];
    double mx = *std::max_element(e.begin(), e.end());
    for (std::size_t s = 0; s < e.size(); ++s)
      if (weight[config] <= 0 || near_max(e[s], mx, tol)) out.push_back(static_cast<int>(s));
    return out;
  }
};

struct Strategy {
  OrderSchema schema;
  std::vector<DecisionFunction> functions;  // in schema decision order
  double meu = 0;

  const DecisionFunction& function(NodeId decision) const {
    for (const auto& f : functions)
      if (f.decision == decision) return f;
    throw std::out_of_range("strategy has no function for the decision");
  }
};

constexpr double kTieTolerance = 1e-9;
constexpr std::size_t kMaxJointSize = std::size_t{1} << 24;

// Exact evaluation by elimination in reverse schema order over a joint
// table laid out with the last variable of the schema sequence fastest.
// Chance variables are summed out, decisions maximized; joint weights and
// weighted utilities are carried side by side so no division happens
// until a decision function is read off.
inline Strategy solve(const Diagram& d, const Realization& r, const OrderSchema& schema) {
  const std::vector<NodeId> seq = schema.sequence();
  const std::size_t m = seq.size();
  std::vector<std::size_t> card(m);
  std::size_t total = 1;
  for (std::size_t i = 0; i < m; ++i) {
    card[i] = d.cardinality(seq[i]);
    if (total > kMaxJointSize / card[i]) throw EvaluationError("joint table too large for exact evaluation");
    total *= card[i];
  }

  std::vector<double> weight(total), value(total);
  std::vector<int> assign(d.size(), 0);
  std::vector<std::size_t> digits(m, 0);
  const auto chances = d.chance_nodes();
  const auto utilities = d.value_nodes();
  auto row_index = [&](NodeId v) {
    std::size_t idx = 0;
    for (NodeId p : d.parents(v)) idx = idx * d.cardinality(p) + static_cast<std::size_t>(assign[p]);
    return idx;
  };
  for (std::size_t x = 0; x < total; ++x) {
    for (std::size_t i = 0; i < m; ++i) assign[seq[i]] = static_cast<int>(digits[i]);
    double w = 1;
    for (NodeId c : chances) w *= r.tables[c][row_index(c) * d.cardinality(c) + assign[c]];
    double u = 0;
    for (NodeId psi : utilities) u += r.tables[psi][row_index(psi)];
    weight[x] = w;
    value[x] = w * u;
    for (std::size_t i = m; i-- > 0;) {
      if (++digits[i] < card[i]) break;
      digits[i] = 0;
    }
  }

  Strategy out;
  out.schema = schema;
  for (std::size_t i = m; i-- > 0;) {
    const NodeId v = seq[i];
    const std::size_t c = card[i];
    const std::size_t n = weight.size() / c;
    std::vector<double> w2(n), v2(n);
    if (d.is_chance(v)) {
      for (std::size_t p = 0; p < n; ++p) {
        double sw = 0, sv = 0;
        for (std::size_t s = 0; s < c; ++s) {
          sw += weight[p * c + s];
          sv += value[p * c + s];
        }
        w2[p] = sw;
        v2[p] = sv;
      }
    } else {
      DecisionFunction f;
      f.decision = v;
      f.pred.assign(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(i));
      f.pred_card.assign(card.begin(), card.begin() + static_cast<std::ptrdiff_t>(i));
      f.weight.resize(n);
      f.eu.assign(n, std::vector<double>(c, 0.0));
      f.maximizers.resize(n);
      f.value.resize(n);
      for (std::size_t p = 0; p < n; ++p) {
        const double w = weight[p * c];
        double best = -INFINITY;
        for (std::size_t s = 0; s < c; ++s) {
          double eu = w > 0 ? value[p * c + s] / w : 0.0;
          if (!std::isfinite(eu)) throw EvaluationError("non-finite expected utility for '" + d.name(v) + "'");
          f.eu[p][s] = eu;
          best = std::max(best, eu);
          v2[p] = s == 0 ? value[p * c] : std::max(v2[p], value[p * c + s]);
        }
        f.weight[p] = w;
        f.value[p] = best;
        f.maximizers[p] = f.maximizers_at(p, kTieTolerance);
        w2[p] = w;
      }
      out.functions.insert(out.functions.begin(), std::move(f));
    }
    weight = std::move(w2);
    value = std::move(v2);
  }
  out.meu = value.at(0);
  if (!std::isfinite(out.meu)) throw EvaluationError("non-finite maximum expected utility");
  return out;
}

enum class Comparison { Equal, Different, Incomparable };

inline std::string_view to_string(Comparison c) {
  switch (c) {
    case Comparison::Equal: return "equal";
    case Comparison::Different: return "different";
    case Comparison::Incomparable: return "incomparable";
  }
  return "?";
}

namespace detail {

inline std::vector<NodeId> merged_vars(const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
  std::set<NodeId> s(a.begin(), a.end());
  s.insert(b.begin(), b.end());
  return {s.begin(), s.end()};
}

// Compares two decision functions of the same decision on every
// configuration of the union of their pred sets where both have positive
// weight.
inline bool functions_agree(const DecisionFunction& f1, const DecisionFunction& f2,
                            const std::vector<std::size_t>& cards, double tol) {
  auto vars = merged_vars(f1.pred, f2.pred);
  std::vector<int> assign(cards.size(), 0);
  std::vector<std::size_t> digits(vars.size(), 0);
  for (;;) {
    for (std::size_t i = 0; i < vars.size(); ++i) assign[vars[i]] = static_cast<int>(digits[i]);
    std::size_t i1 = f1.index(assign), i2 = f2.index(assign);
    if (f1.weight[i1] > 0 && f2.weight[i2] > 0 && f1.maximizers_at(i1, tol) != f2.maximizers_at(i2, tol))
      return false;
    std::size_t i = vars.size();
    while (i > 0) {
      --i;
      if (++digits[i] < cards[vars[i]]) break;
      digits[i] = 0;
      if (i == 0) return true;
    }
    if (vars.empty()) return true;
  }
}

// Optimal play: for every configuration of all chance variables, the set
// of decision tuples reachable by following maximizer sets in schema order.
inline std::set<std::vector<int>> optimal_tuples(const Strategy& s, std::vector<int> assign, double tol) {
  std::set<std::vector<int>> out;
  std::vector<int> tuple(assign.size(), -1);
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == s.functions.size()) {
      out.insert(tuple);
      return;
    }
    const auto& f = s.functions[k];
    std::size_t idx = f.index(assign);
    if (f.weight[idx] <= 0) return;
    for (int alt : f.maximizers_at(idx, tol)) {
      assign[f.decision] = alt;
      tuple[f.decision] = alt;
      rec(k + 1);
    }
    tuple[f.decision] = -1;
  };
  rec(0);
  return out;
}

}  // namespace detail

// Strategies of the same diagram under two schemas. When every decision
// sees the same earlier decisions in both, decision functions are compared
// on the union of their pred sets; otherwise the decision orders differ and
// the sets of optimally played decision tuples are compared per
// configuration of the chance variables. Incomparable means the strategies
// do not belong to the same diagram.
inline Comparison strategies_equal(const Diagram& d, const Strategy& s1, const Strategy& s2,
                                   double tol = kTieTolerance) {
  if (s1.functions.size() != s2.functions.size()) return Comparison::Incomparable;
  std::vector<std::size_t> cards(d.size());
  for (NodeId v = 0; v < d.size(); ++v) cards[v] = d.cardinality(v);

  bool same_decision_pasts = true;
  for (const auto& f1 : s1.functions) {
    const DecisionFunction* f2 = nullptr;
    for (const auto& g : s2.functions)
      if (g.decision == f1.decision) f2 = &g;
    if (!f2 || f1.eu.empty() != f2->eu.empty()) return Comparison::Incomparable;
    auto decisions_in = [&](const DecisionFunction& f) {
      std::set<NodeId> out;
      for (NodeId v : f.pred)
        if (d.is_decision(v)) out.insert(v);
      return out;
    };
    if (decisions_in(f1) != decisions_in(*f2)) same_decision_pasts = false;
  }

  if (same_decision_pasts) {
    for (const auto& f1 : s1.functions)
      if (!detail::functions_agree(f1, s2.function(f1.decision), cards, tol)) return Comparison::Different;
    return Comparison::Equal;
  }

  const auto chances = d.chance_nodes();
  std::vector<int> assign(d.size(), 0);
  std::vector<std::size_t> digits(chances.size(), 0);
  for (;;) {
    for (std::size_t i = 0; i < chances.size(); ++i) assign[chances[i]] = static_cast<int>(digits[i]);
    if (detail::optimal_tuples(s1, assign, tol) != detail::optimal_tuples(s2, assign, tol))
      return Comparison::Different;
    std::size_t i = chances.size();
    bool done = true;
    while (i > 0) {
      --i;
      if (++digits[i] < cards[chances[i]]) {
        done = false;
        break;
      }
      digits[i] = 0;
    }
    if (done) return Comparison::Equal;
  }
}

// Variables of pred(D) whose state changes the maximizer set of D's
// decision function with every other coordinate held fixed, for this one
// realization.
inline NodeSet oracle_required(const Diagram& d, const Strategy& s, NodeId decision, double tol = kTieTolerance) {
  const DecisionFunction& f = s.function(decision);
  NodeSet out(d.size());
  std::size_t stride = 1;
  for (std::size_t i = f.pred.size(); i-- > 0;) {
    const std::size_t k = f.pred_card[i];
    bool varies = false;
    for (std::size_t idx = 0; idx < f.configurations() && !varies; ++idx) {
      const std::size_t own = (idx / stride) % k;
      if (own != 0 || f.weight[idx] <= 0) continue;
      auto base = f.maximizers_at(idx, tol);
      for (std::size_t x = 1; x < k && !varies; ++x) {
        std::size_t other = idx + x * stride;
        if (f.weight[other] > 0 && f.maximizers_at(other, tol) != base) varies = true;
      }
    }
    if (varies) out.insert(f.pred[i]);
    stride *= k;
  }
  return out;
}

inline NodeSet oracle_required(const Diagram& d, const Realization& r, const OrderSchema& schema, NodeId decision) {
  return oracle_required(d, solve(d, r, schema), decision);
}

struct Counterexample {
  std::size_t trial = 0;
  Realization realization;
  OrderSchema before;  // A directly before D
  OrderSchema after;   // A moved directly after D
};

struct SearchOutcome {
  std::optional<Counterexample> counterexample;
  std::size_t trials_run = 0;
  // Random search cannot prove insignificance: an empty result is
  // inconclusive.
  bool conclusive() const { return counterexample.has_value(); }
};

struct SearchOptions {
  std::size_t trials = 200;
  std::uint64_t seed = 1;
  std::optional<Realization> fixture;  // tried as trial 0 when present
  bool minimize = true;
};

namespace detail {

inline bool permutation_changes_strategy(const Diagram& d, const Realization& r, const OrderSchema& before,
                                         const OrderSchema& after, NodeId decision) {
  std::vector<std::size_t> cards(d.size());
  for (NodeId v = 0; v < d.size(); ++v) cards[v] = d.cardinality(v);
  const auto s1 = solve(d, r, before);
  const auto s2 = solve(d, r, after);
  return !functions_agree(s1.function(decision), s2.function(decision), cards, kTieTolerance);
}

inline std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) {
  return seed * 0x9E3779B97F4A7C15ULL + trial;
}

}  // namespace detail

inline void minimize_counterexample(const Diagram& d, Counterexample& cx, NodeId decision) {
  for (NodeId v : d.chance_nodes()) {
    const std::size_t k = d.cardinality(v);
    auto& t = cx.realization.tables[v];
    for (std::size_t row = 0; row * k < t.size(); ++row) {
      std::vector<double> rounded(k);
      double sum = 0;
      for (std::size_t s = 0; s < k; ++s) {
        rounded[s] = std::round(t[row * k + s] * 2.0) / 2.0;
        sum += rounded[s];
      }
      if (sum <= 0) continue;
      std::vector<double> saved(t.begin() + static_cast<std::ptrdiff_t>(row * k),
                                t.begin() + static_cast<std::ptrdiff_t>(row * k + k));
      for (std::size_t s = 0; s < k; ++s) t[row * k + s] = rounded[s] / sum;
      if (!detail::permutation_changes_strategy(d, cx.realization, cx.before, cx.after, decision))
        std::copy(saved.begin(), saved.end(), t.begin() + static_cast<std::ptrdiff_t>(row * k));
    }
  }
}

// Looks for a realization under which moving A from directly before D to
// directly after D changes D's decision function.
inline SearchOutcome significance_search(const Diagram& d, const PartialOrder& po, NodeId a, NodeId decision,
                                         const SearchOptions& opt = {}) {
  if (!d.is_chance(a) || !d.is_decision(decision) || !po.incompatible(a, decision))
    throw std::invalid_argument("pair not incompatible: " + d.name(a) + ", " + d.name(decision));
  std::vector<OrderSchema> placements;
  for_each_schema(po, [&](const OrderSchema& s) {
    if (s.slot[a] == static_cast<int>(s.position(decision))) placements.push_back(s);
    return true;
  });

  SearchOutcome out;
  for (std::size_t t = 0; t < opt.trials; ++t) {
    ++out.trials_run;
    Realization r = (t == 0 && opt.fixture) ? *opt.fixture : random_realization(d, detail::trial_seed(opt.seed, t));
    for (const auto& before : placements) {
      OrderSchema after = before;
      after.slot[a] += 1;
      if (detail::permutation_changes_strategy(d, r, before, after, decision)) {
        Counterexample cx{t, std::move(r), before, after};
        if (opt.minimize) minimize_counterexample(d, cx, decision);
        out.counterexample = std::move(cx);
        return out;
      }
    }
  }
  return out;
}

inline bool reproduces(const Diagram& d, const Counterexample& cx, NodeId decision) {
  return detail::permutation_changes_strategy(d, cx.realization, cx.before, cx.after, decision);
}

}  // namespace pid
