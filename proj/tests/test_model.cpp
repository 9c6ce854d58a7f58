#include <gtest/gtest.h>

#include "support.hpp"

using namespace pid;
using namespace pid::testing;

namespace {

NodeSpec chance(std::string id, std::vector<std::string> parents = {}) {
  return {std::move(id), NodeKind::Chance, {"t", "f"}, std::move(parents)};
}
NodeSpec decision(std::string id, std::vector<std::string> parents = {}) {
  return {std::move(id), NodeKind::Decision, {"yes", "no"}, std::move(parents)};
}
NodeSpec value(std::string id, std::vector<std::string> parents) {
  return {std::move(id), NodeKind::Value, {}, std::move(parents)};
}

std::vector<Violation::Kind> kinds_of(const DiagramSpec& spec) {
  try {
    validate(spec);
  } catch (const ValidationError& e) {
    std::vector<Violation::Kind> out;
    for (const auto& v : e.violations()) out.push_back(v.kind);
    return out;
  }
  return {};
}

}  // namespace

TEST(Validate, AcceptsFixtureCorpus) {
  for (const auto& name : corpus()) EXPECT_NO_THROW(fixture(name)) << name;
}

TEST(Validate, BuildsParentAndChildLists) {
  Diagram d = validate({{chance("A"), decision("D", {"A"}), value("U", {"A", "D"})}});
  EXPECT_EQ(d.size(), 3u);
  EXPECT_EQ(d.parents(d.at("U")), (std::vector<NodeId>{0, 1}));
  EXPECT_EQ(d.children(d.at("A")), (std::vector<NodeId>{1, 2}));
  EXPECT_EQ(d.cardinality(d.at("D")), 2u);
  EXPECT_FALSE(d.find("missing"));
  EXPECT_THROW(d.at("missing"), std::out_of_range);
}

TEST(Validate, ReportsEveryViolation) {
  DiagramSpec spec{{chance("A", {"ghost"}), chance("A"), {"E", NodeKind::Chance, {}, {}},
                    {"U", NodeKind::Value, {"x"}, {}}, chance("B", {"U"})}};
  auto ks = kinds_of(spec);
  using K = Violation::Kind;
  for (K k : {K::DanglingParent, K::DuplicateId, K::EmptyStates, K::ValueWithStates, K::ValueHasChild})
    EXPECT_NE(std::find(ks.begin(), ks.end(), k), ks.end()) << static_cast<int>(k);
}

TEST(Validate, DetectsCycles) {
  auto ks = kinds_of({{chance("A", {"C"}), chance("B", {"A"}), chance("C", {"B"})}});
  ASSERT_EQ(ks.size(), 1u);
  EXPECT_EQ(ks[0], Violation::Kind::Cycle);
  EXPECT_EQ(kinds_of({{chance("A", {"A"})}}), std::vector<Violation::Kind>{Violation::Kind::Cycle});
}

TEST(Validate, EmptyDiagramIsValid) {
  Diagram d = validate({});
  EXPECT_EQ(d.size(), 0u);
}

TEST(Barren, ChildlessCarriersAndTheirExclusiveAncestors) {
  // B feeds only the barren C; A feeds the utility.
  Diagram d = validate({{chance("A"), chance("B"), chance("C", {"B"}), value("U", {"A"})}});
  NodeSet b = barren_nodes(d);
  EXPECT_FALSE(b.contains(d.at("A")));
  EXPECT_TRUE(b.contains(d.at("B")));
  EXPECT_TRUE(b.contains(d.at("C")));
  EXPECT_FALSE(b.contains(d.at("U")));
  Diagram s = strip_barren(d);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_TRUE(barren_nodes(s).empty());
}

TEST(Barren, InformationalArcsCountAsChildren) {
  Diagram d = validate({{chance("A"), decision("D", {"A"}), value("U", {"D"})}});
  EXPECT_TRUE(barren_nodes(d).empty());
}

TEST(Views, StripInformationalDropsArcsIntoDecisions) {
  Document doc = fixture("fig2.pid");
  const Diagram& d = doc.diagram;
  GraphView g = strip_informational(d);
  EXPECT_TRUE(g.parents(d.at("D1")).empty());
  EXPECT_TRUE(g.parents(d.at("D2")).empty());
  EXPECT_TRUE(g.has_arc(d.at("D1"), d.at("psi1")));
  EXPECT_EQ(g.arc_count(), 5u);
}

TEST(Views, MoralGraphMarriesCoParentsAndDropsValues) {
  Document doc = fixture("fig2.pid");
  const Diagram& d = doc.diagram;
  GraphView m = moral_view(d);
  EXPECT_FALSE(m.directed());
  EXPECT_TRUE(m.has_arc(d.at("A"), d.at("D1")));
  EXPECT_TRUE(m.has_arc(d.at("D1"), d.at("A")));
  EXPECT_TRUE(m.has_arc(d.at("A"), d.at("B")));
  EXPECT_TRUE(m.has_arc(d.at("D2"), d.at("B")));
  EXPECT_FALSE(m.has_arc(d.at("B"), d.at("D1")));  // informational
  EXPECT_TRUE(m.neighbours(d.at("psi1")).empty());
}

TEST(Document, RoundTripIsIdentityOnCorpus) {
  for (const auto& name : corpus()) {
    Document a = fixture(name);
    std::string text = serialize_document(a.diagram, a.realization);
    Document b = parse_document(text);
    EXPECT_EQ(serialize_document(b.diagram, b.realization), text) << name;
    EXPECT_EQ(a.realization, b.realization) << name;
    EXPECT_EQ(a.diagram.size(), b.diagram.size());
  }
}

TEST(Document, RoundTripPreservesRandomRealizationsBitForBit) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Diagram d = random_diagram(seed);
    Realization r = random_realization(d, seed);
    Document b = parse_document(serialize_document(d, r));
    ASSERT_TRUE(b.realization);
    EXPECT_EQ(*b.realization, r);
  }
}

TEST(Document, ParseErrorCarriesLineAndColumn) {
  try {
    parse_document("{\n  \"nodes\": [\n    {\"id\": \"A\",, }\n  ]\n}", "bad.pid");
    FAIL();
  } catch (const DocumentError& e) {
    EXPECT_EQ(e.file(), "bad.pid");
    EXPECT_EQ(e.line(), 3u);
    EXPECT_GT(e.column(), 0u);
    EXPECT_NE(std::string(e.what()).find("bad.pid:3:"), std::string::npos);
  }
}

TEST(Document, EmptyInputIsParseError) { EXPECT_THROW(parse_document("", "empty"), DocumentError); }

TEST(Document, ValidationErrorNamesLineOfOffendingNode) {
  std::string text = R"({"nodes": [
  {"id": "A", "kind": "chance", "states": ["x", "y"], "parents": []},
  {"id": "B", "kind": "chance", "states": ["x", "y"], "parents": ["nope"]}
]})";
  try {
    parse_document(text, "v.pid");
    FAIL();
  } catch (const DocumentError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("nope"), std::string::npos);
  }
}

TEST(Document, RejectsBadRealizations) {
  std::string base = R"({"nodes": [
  {"id": "A", "kind": "chance", "states": ["x", "y"], "parents": []},
  {"id": "U", "kind": "value", "parents": ["A"]}
], "realization": )";
  EXPECT_THROW(parse_document(base + R"({"cpts": {"A": [0.5, 0.6]}, "utilities": {"U": [1, 2]}}})"),
               DocumentError);
  EXPECT_THROW(parse_document(base + R"({"cpts": {"A": [0.5, 0.5]}, "utilities": {"U": [1]}}})"), DocumentError);
  EXPECT_THROW(parse_document(base + R"({"cpts": {"A": [0.5, 0.5]}}})"), DocumentError);
  EXPECT_THROW(parse_document(base + R"({"cpts": {"U": [1, 2]}, "utilities": {"U": [1, 2]}}})"), DocumentError);
  EXPECT_NO_THROW(parse_document(base + R"({"cpts": {"A": [0.25, 0.75]}, "utilities": {"U": [1, 2]}}})"));
}

TEST(Document, UnknownKindIsRejected) {
  EXPECT_THROW(parse_document(R"({"nodes": [{"id": "A", "kind": "oracle", "states": ["x"]}]})"), DocumentError);
}

TEST(Dot, ShapesFollowNodeKinds) {
  Document doc = fixture("fig1.pid");
  std::string dot = export_dot(doc.diagram);
  auto count = [&](const std::string& s) {
    std::size_t n = 0;
    for (auto p = dot.find(s); p != std::string::npos; p = dot.find(s, p + 1)) ++n;
    return n;
  };
  EXPECT_EQ(count("shape=box"), 4u);
  EXPECT_EQ(count("shape=diamond"), 2u);
  EXPECT_EQ(count("shape=circle"), 5u);
  EXPECT_EQ(count("style=dashed"), 0u);
}

TEST(Dot, EmptyDiagramIsValidDigraph) { EXPECT_EQ(export_dot(validate({})), "digraph pid {\n}\n"); }

TEST(Dot, AnnotationMarksSignificantPairs) {
  Document doc = fixture("fig6.pid");
  Report r = check_welldefined(doc.diagram);
  std::string dot = export_dot(doc.diagram, &r);
  EXPECT_NE(dot.find("\"A\" [shape=circle, style=filled"), std::string::npos);
  EXPECT_NE(dot.find("\"D\" [shape=box, style=filled"), std::string::npos);
  EXPECT_NE(dot.find("\"A\" -> \"D\" [dir=none"), std::string::npos);
  EXPECT_NE(dot.find("\"A\" -> \"Dp\" [style=dashed]"), std::string::npos);
}
