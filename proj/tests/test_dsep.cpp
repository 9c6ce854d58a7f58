#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace pid;
using namespace pid::testing;

namespace {

GraphView random_dag(std::uint64_t seed, std::size_t n, double p) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution arc(p);
  GraphView g(n, true);
  for (NodeId j = 0; j < n; ++j)
    for (NodeId i = 0; i < j; ++i)
      if (arc(rng)) g.add_arc(i, j);
  return g;
}

bool in_or_above(const GraphView& g, NodeId v, const NodeSet& z) {
  if (z.contains(v)) return true;
  for (NodeId w = 0; w < g.size(); ++w)
    if (z.contains(w) && directed_path_exists(g, v, w)) return true;
  return false;
}

// Trail activity straight from the definition: every collider is in Z or
// has a descendant in Z, every other interior node is outside Z.
bool trail_active(const GraphView& g, const std::vector<NodeId>& t, const NodeSet& z) {
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    bool collider = g.has_arc(t[i - 1], t[i]) && g.has_arc(t[i + 1], t[i]);
    if (collider ? !in_or_above(g, t[i], z) : z.contains(t[i])) return false;
  }
  return !z.contains(t.front()) && !z.contains(t.back());
}

bool brute_connected(const GraphView& g, NodeId x, NodeId y, const NodeSet& z) {
  if (x == y) return !z.contains(x);
  std::vector<NodeId> path{x};
  std::vector<bool> on(g.size(), false);
  on[x] = true;
  std::function<bool(NodeId)> dfs = [&](NodeId u) {
    std::vector<NodeId> nb = g.children(u);
    nb.insert(nb.end(), g.parents(u).begin(), g.parents(u).end());
    for (NodeId w : nb) {
      if (on[w]) continue;
      path.push_back(w);
      on[w] = true;
      if ((w == y && trail_active(g, path, z)) || (w != y && dfs(w))) return true;
      on[w] = false;
      path.pop_back();
    }
    return false;
  };
  return dfs(x);
}

}  // namespace

TEST(DSeparation, AgreesWithTrailEnumerationOnSmallDags) {
  std::mt19937_64 rng(7);
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    const std::size_t n = 3 + seed % 4;
    GraphView g = random_dag(seed, n, 0.45);
    for (int q = 0; q < 6; ++q) {
      NodeId x = rng() % n, y = rng() % n;
      NodeSet z(n);
      for (NodeId v = 0; v < n; ++v)
        if (v != x && rng() % 3 == 0) z.insert(v);
      if (z.contains(y)) continue;
      EXPECT_EQ(d_connected(g, x, y, z), brute_connected(g, x, y, z))
          << "seed " << seed << " x " << x << " y " << y;
    }
  }
}

TEST(DSeparation, ReturnedTrailIsActive) {
  std::mt19937_64 rng(11);
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const std::size_t n = 3 + seed % 4;
    GraphView g = random_dag(seed + 1000, n, 0.45);
    NodeId x = rng() % n, y = rng() % n;
    NodeSet z(n);
    for (NodeId v = 0; v < n; ++v)
      if (v != x && v != y && rng() % 3 == 0) z.insert(v);
    auto trail = active_trail(g, x, y, z);
    EXPECT_EQ(!trail.empty(), d_connected(g, x, y, z));
    if (trail.size() > 1) {
      EXPECT_EQ(trail.front(), x);
      EXPECT_EQ(trail.back(), y);
      for (std::size_t i = 0; i + 1 < trail.size(); ++i)
        EXPECT_TRUE(g.has_arc(trail[i], trail[i + 1]) || g.has_arc(trail[i + 1], trail[i]));
      // walks may revisit nodes; only check simple trails against the definition
      std::vector<NodeId> sorted = trail;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end()) EXPECT_TRUE(trail_active(g, trail, z));
    }
  }
}

TEST(DSeparation, Basics) {
  // A -> B -> C, A -> D <- C
  GraphView g(4, true);
  g.add_arc(0, 1);
  g.add_arc(1, 2);
  g.add_arc(0, 3);
  g.add_arc(2, 3);
  NodeSet none(4), b(4), bd(4);
  b.insert(1);
  bd.insert(1);
  bd.insert(3);
  EXPECT_TRUE(d_connected(g, 0, 2, none));
  EXPECT_FALSE(d_connected(g, 0, 2, b));
  EXPECT_TRUE(d_connected(g, 0, 2, bd));
  EXPECT_THROW(d_connected(SeparationQuery{&g, 1, none, b}), std::invalid_argument);
  EXPECT_FALSE(d_connected(g, 0, 1, b));  // conditioned target
}

TEST(DirectedPath, ReflexiveAndDirectional) {
  GraphView g(3, true);
  g.add_arc(0, 1);
  EXPECT_TRUE(directed_path_exists(g, 2, 2));
  EXPECT_TRUE(directed_path_exists(g, 0, 1));
  EXPECT_FALSE(directed_path_exists(g, 1, 0));
  EXPECT_EQ(descendants(g, 0).members(), std::vector<NodeId>{1});
}

TEST(DecisionBayesBall, Fig2MarksBWhileRulesDoNot) {
  Document doc = fixture("fig2.pid");
  const Diagram& d = doc.diagram;
  PartialOrder po = induce_partial_order(d);
  NodeId d1 = d.at("D1"), b = d.at("B");
  EXPECT_TRUE(bayes_ball_requisite(d, po, d1).contains(b));
  EXPECT_TRUE(elimination_neighbors(d, canonical_schema(po), d1).contains(b));
  EXPECT_FALSE(required_variables(d, canonical_schema(po), d1).contains(b));
  // no directed path from D1 to psi2 once informational arcs are gone
  EXPECT_FALSE(directed_path_exists(strip_informational(d), d1, d.at("psi2")));
}

TEST(DecisionBayesBall, RequiresTotalOrder) {
  Document doc = fixture("fig1.pid");
  PartialOrder po = induce_partial_order(doc.diagram);
  EXPECT_THROW(bayes_ball_requisite(doc.diagram, po, doc.diagram.at("D1")), NotTotalOrder);
}

TEST(DecisionBayesBall, ResultWithinPred) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RandomShape shape;
    shape.classic = true;
    shape.decisions = 1 + seed % 3;
    Diagram d = random_diagram(seed, shape);
    PartialOrder po = induce_partial_order(d);
    OrderSchema s = canonical_schema(po);
    for (NodeId dj : d.decision_nodes()) {
      EXPECT_TRUE(bayes_ball_requisite(d, po, dj).subset_of(pred_set(s, dj)));
      EXPECT_TRUE(elimination_neighbors(d, s, dj).subset_of(pred_set(s, dj)));
    }
  }
}

TEST(EliminationNeighbors, ModifiedFig8ContainsA) {
  Document doc = fixture("fig8_modified.pid");
  const Diagram& d = doc.diagram;
  OrderSchema s = canonical_schema(induce_partial_order(d));
  EXPECT_TRUE(elimination_neighbors(d, s, d.at("D")).contains(d.at("A")));
  EXPECT_THROW(elimination_neighbors(d, s, d.at("A")), std::invalid_argument);
}
