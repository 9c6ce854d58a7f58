// pid: command-line front end for partial influence diagram analysis.
//
// Exit status: 0 success (and "welldefined" for check), 2 "not
// welldefined", 1 any error.

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pid/pid.hpp"

using nlohmann::json;
using namespace pid;

namespace {

constexpr int kSchemaVersion = 1;

struct Options {
  std::string file;
  bool json = false;
  bool exact = false;
  bool annotate = false;
  std::size_t limit = 0;
  std::size_t schema = 0;
  std::string decision;
  std::string chance;
  std::size_t trials = 200;
  std::uint64_t seed = 1;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json names_json(const Diagram& d, const NodeSet& s) {
  json out = json::array();
  for (NodeId v : s.members()) out.push_back(d.name(v));
  return out;
}

json names_json(const Diagram& d, const std::vector<NodeId>& vs) {
  json out = json::array();
  for (NodeId v : vs) out.push_back(d.name(v));
  return out;
}

// "{A} D Dp {B} Dpp {C}": decisions in order with the chance slots between.
std::string schema_text(const Diagram& d, const OrderSchema& s) {
  std::string out;
  for (std::size_t k = 0; k <= s.decisions.size(); ++k) {
    NodeSet slot(d.size());
    for (NodeId v = 0; v < s.slot.size(); ++v)
      if (s.slot[v] == static_cast<int>(k)) slot.insert(v);
    if (!slot.empty()) out += (out.empty() ? "" : " ") + d.names(slot);
    if (k < s.decisions.size()) out += (out.empty() ? "" : " ") + d.name(s.decisions[k]);
  }
  return out;
}

json schema_json(const Diagram& d, const OrderSchema& s) {
  json slots = json::object();
  for (NodeId v = 0; v < s.slot.size(); ++v)
    if (s.slot[v] >= 0) slots[d.name(v)] = s.slot[v];
  return {{"decisions", names_json(d, s.decisions)}, {"slots", slots}, {"sequence", names_json(d, s.sequence())}};
}

json witness_json(const Diagram& d, const Witness& w) {
  json out{{"chance", d.name(w.chance)},
           {"decision", d.name(w.decision)},
           {"clause", std::string(to_string(w.clause))},
           {"utility", d.name(w.utility)},
           {"schema", schema_json(d, w.schema)},
           {"trail", names_json(d, w.trail)}};
  out["later_decision"] = w.later_decision ? json(d.name(*w.later_decision)) : json(nullptr);
  out["via"] = w.via ? json(d.name(*w.via)) : json(nullptr);
  return out;
}

std::string witness_text(const Diagram& d, const Witness& w) {
  std::string out = d.name(w.chance) + " is significant for " + d.name(w.decision) + " (" +
                    std::string(to_string(w.clause)) + ", utility " + d.name(w.utility);
  if (w.later_decision) out += ", later decision " + d.name(*w.later_decision);
  if (w.via) out += ", via " + d.name(*w.via);
  out += ") in schema " + schema_text(d, w.schema);
  if (!w.trail.empty()) {
    out += "; trail";
    for (NodeId v : w.trail) out += " " + d.name(v);
  }
  return out;
}

json report_json(const Diagram& d, const Report& r) {
  json decisions = json::array();
  for (const auto& s : r.decisions)
    decisions.push_back({{"decision", d.name(s.decision)},
                         {"pred", names_json(d, s.pred)},
                         {"relevant", names_json(d, s.relevant)},
                         {"required", names_json(d, s.required)}});
  json pairs = json::array();
  for (auto [a, dj] : r.checked_pairs) pairs.push_back({d.name(a), d.name(dj)});
  json witnesses = json::array();
  for (const auto& w : r.witnesses) witnesses.push_back(witness_json(d, w));
  return {{"welldefined", r.welldefined},
          {"canonical_schema", schema_json(d, r.canonical)},
          {"decisions", decisions},
          {"checked_pairs", pairs},
          {"witnesses", witnesses}};
}

NodeId lookup(const Diagram& d, const std::string& name, NodeKind kind) {
  auto v = d.find(name);
  if (!v) throw UsageError("unknown node '" + name + "'");
  if (d.kind(*v) != kind) throw UsageError("'" + name + "' is not a " + std::string(to_string(kind)) + " node");
  return *v;
}

OrderSchema pick_schema(const PartialOrder& po, std::size_t index) {
  auto schemas = enumerate_schemas(po, index + 1);
  if (index >= schemas.size())
    throw UsageError("schema index " + std::to_string(index) + " out of range (" + std::to_string(schemas.size()) +
                     " schemas)");
  return schemas[index];
}

struct Output {
  json body = json::object();
  std::ostringstream text;
  int status = 0;
};

void cmd_validate(const Document& doc, Output& out) {
  const Diagram& d = doc.diagram;
  out.body["valid"] = true;
  out.body["nodes"] = d.size();
  out.body["has_realization"] = doc.realization.has_value();
  out.text << "valid: " << d.size() << " nodes (" << d.chance_nodes().size() << " chance, "
           << d.decision_nodes().size() << " decision, " << d.value_nodes().size() << " value)"
           << (doc.realization ? ", with realization" : "") << "\n";
}

void cmd_order(const Diagram& d, Output& out) {
  PartialOrder po = induce_partial_order(d);
  json prec = json::array(), inc = json::array();
  out.text << "precedes:\n";
  for (NodeId x : po.carriers())
    for (NodeId y : po.carriers())
      if (x != y && po.precedes(x, y)) {
        prec.push_back({d.name(x), d.name(y)});
        out.text << "  " << d.name(x) << " < " << d.name(y) << "\n";
      }
  out.text << "incompatible:\n";
  for (auto [x, y] : po.incompatible_pairs()) {
    inc.push_back({d.name(x), d.name(y)});
    out.text << "  " << d.name(x) << " ~ " << d.name(y) << "\n";
  }
  out.body["precedes"] = prec;
  out.body["incompatible"] = inc;
  out.body["decisions_totally_ordered"] = po.decisions_totally_ordered();
}

void cmd_schemas(const Diagram& d, const Options& o, Output& out) {
  PartialOrder po = induce_partial_order(d);
  json list = json::array();
  std::size_t i = 0;
  for_each_schema(po, [&](const OrderSchema& s) {
    json j = schema_json(d, s);
    j["index"] = i;
    list.push_back(j);
    out.text << i << ": " << schema_text(d, s) << "\n";
    ++i;
    return o.limit == 0 || i < o.limit;
  });
  out.body["schemas"] = list;
}

void cmd_check(const Diagram& d, const Options& o, Output& out) {
  Report r = check_welldefined(d, o.exact ? SearchMode::Exact : SearchMode::Pruned);
  out.body["report"] = report_json(d, r);
  out.body["mode"] = o.exact ? "exact" : "pruned";
  PartialOrder po = induce_partial_order(d);
  out.text << "incompatible pairs:";
  for (auto [x, y] : po.incompatible_pairs()) out.text << " (" << d.name(x) << ", " << d.name(y) << ")";
  out.text << "\ncanonical schema: " << schema_text(d, r.canonical) << "\n";
  for (const auto& s : r.decisions)
    out.text << d.name(s.decision) << ": pred " << d.names(s.pred) << ", relevant " << d.names(s.relevant)
             << ", required " << d.names(s.required) << "\n";
  for (const auto& w : r.witnesses) out.text << witness_text(d, w) << "\n";
  out.text << (r.welldefined ? "welldefined" : "not welldefined") << "\n";
  out.status = r.welldefined ? 0 : 2;
}

void cmd_rules(const Diagram& d, const Options& o, bool relevant, Output& out) {
  PartialOrder po = induce_partial_order(d);
  NodeId dj = lookup(d, o.decision, NodeKind::Decision);
  OrderSchema s = pick_schema(po, o.schema);
  NodeSet result = relevant ? relevant_utilities(d, s, dj) : required_variables(d, s, dj);
  out.body["decision"] = d.name(dj);
  out.body["schema"] = schema_json(d, s);
  out.body[relevant ? "relevant" : "required"] = names_json(d, result);
  out.text << (relevant ? "relevant for " : "required for ") << d.name(dj) << ": " << d.names(result) << "\n";
}

void cmd_significant(const Diagram& d, const Options& o, Output& out) {
  NodeId a = lookup(d, o.chance, NodeKind::Chance);
  NodeId dj = lookup(d, o.decision, NodeKind::Decision);
  auto w = is_significant(d, a, dj, o.exact ? SearchMode::Exact : SearchMode::Pruned);
  out.body["significant"] = w.has_value();
  out.body["witness"] = w ? witness_json(d, *w) : json(nullptr);
  out.text << (w ? witness_text(d, *w) : d.name(a) + " is not significant for " + d.name(dj)) << "\n";
}

std::string config_text(const Diagram& d, const DecisionFunction& f, std::size_t idx) {
  std::vector<std::string> parts(f.pred.size());
  for (std::size_t i = f.pred.size(); i-- > 0;) {
    parts[i] = d.node(f.pred[i]).states[idx % f.pred_card[i]];
    idx /= f.pred_card[i];
  }
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? " " : "") + d.name(f.pred[i]) + "=" + parts[i];
  return out.empty() ? "(no observations)" : out;
}

void cmd_solve(const Document& doc, const Options& o, Output& out) {
  const Diagram& d = doc.diagram;
  if (!doc.realization) throw UsageError("solve needs a document with a realization");
  PartialOrder po = induce_partial_order(d);
  OrderSchema s = pick_schema(po, o.schema);
  Strategy st = solve(d, *doc.realization, s);
  json fns = json::array();
  out.text << std::setprecision(10);
  for (const auto& f : st.functions) {
    const auto& states = d.node(f.decision).states;
    json rows = json::array();
    out.text << d.name(f.decision) << ":\n";
    for (std::size_t i = 0; i < f.configurations(); ++i) {
      json best = json::array();
      std::string best_text;
      for (int m : f.maximizers[i]) {
        best.push_back(states[m]);
        best_text += (best_text.empty() ? "" : ",") + states[m];
      }
      rows.push_back({{"config", config_text(d, f, i)}, {"weight", f.weight[i]}, {"eu", f.eu[i]},
                      {"maximizers", best}, {"value", f.value[i]}});
      out.text << "  " << config_text(d, f, i) << " -> " << best_text << "  (eu";
      for (double e : f.eu[i]) out.text << " " << e;
      out.text << ", weight " << f.weight[i] << ")\n";
    }
    fns.push_back({{"decision", d.name(f.decision)}, {"pred", names_json(d, f.pred)}, {"rows", rows}});
  }
  out.text << "MEU: " << st.meu << "\n";
  out.body["schema"] = schema_json(d, s);
  out.body["functions"] = fns;
  out.body["meu"] = st.meu;
}

// Differential run of the structural analysis against the exact oracle on
// random realizations (plus the document's own realization, if any).
void cmd_fuzz(const Document& doc, const Options& o, Output& out) {
  const Diagram& d = doc.diagram;
  PartialOrder po = induce_partial_order(d);
  Report report = check_welldefined(d);
  auto schemas = enumerate_schemas(po, 64);
  RuleEngine engine(d, po);
  std::vector<std::string> failures;
  std::size_t comparisons = 0;

  for (std::size_t t = 0; t < o.trials; ++t) {
    Realization r = (t == 0 && doc.realization) ? *doc.realization : random_realization(d, o.seed + t);
    Strategy base = solve(d, r, schemas.front());
    for (const auto& s : schemas) {
      Strategy st = solve(d, r, s);
      for (NodeId dj : s.decisions) {
        NodeSet oracle = oracle_required(d, st, dj);
        NodeSet structural = required_variables(engine, s, dj);
        ++comparisons;
        if (!oracle.subset_of(structural))
          failures.push_back("trial " + std::to_string(t) + ": oracle requires " + d.names(oracle) + " for " +
                             d.name(dj) + " but rules give " + d.names(structural));
      }
      if (report.welldefined) {
        ++comparisons;
        if (strategies_equal(d, base, st) == Comparison::Different)
          failures.push_back("trial " + std::to_string(t) + ": strategies differ under schema " + schema_text(d, s));
      }
    }
  }

  std::size_t found = 0;
  for (auto [a, dj] : report.checked_pairs) {
    SearchOptions so;
    so.trials = o.trials;
    so.seed = o.seed;
    so.fixture = doc.realization;
    so.minimize = false;
    auto res = significance_search(d, po, a, dj, so);
    if (!res.counterexample) continue;
    ++found;
    bool flagged = std::any_of(report.witnesses.begin(), report.witnesses.end(),
                               [&](const Witness& w) { return w.chance == a && w.decision == dj; });
    if (!flagged)
      failures.push_back("oracle finds " + d.name(a) + " significant for " + d.name(dj) +
                         " but the rules do not");
  }

  out.body["trials"] = o.trials;
  out.body["seed"] = o.seed;
  out.body["comparisons"] = comparisons;
  out.body["counterexamples"] = found;
  out.body["failures"] = failures;
  out.text << o.trials << " trials, " << comparisons << " comparisons, " << found
           << " pair(s) with a counterexample, " << failures.size() << " failure(s)\n";
  for (const auto& f : failures) out.text << "  " << f << "\n";
  out.status = failures.empty() ? 0 : 2;
}

void cmd_suggest(const Diagram& d, Output& out) {
  Report report = check_welldefined(d);
  auto res = suggest_resolutions(d, report);
  json list = json::array();
  if (report.welldefined) out.text << "already welldefined\n";
  for (const auto& r : res) {
    json cs = json::array();
    std::string text;
    for (const auto& c : r.constraints) {
      cs.push_back({d.name(c.before), d.name(c.after)});
      text += (text.empty() ? "" : ", ") + d.name(c.before) + " < " + d.name(c.after);
    }
    list.push_back({{"constraints", cs}, {"welldefined", r.welldefined}, {"remaining", r.remaining_witnesses}});
    out.text << text << (r.welldefined ? "  -> welldefined" : "  -> " + std::to_string(r.remaining_witnesses) +
                                                                      " significant pair(s) remain")
             << "\n";
  }
  out.body["welldefined"] = report.welldefined;
  out.body["resolutions"] = list;
}

void cmd_dot(const Diagram& d, const Options& o, Output& out) {
  std::string dot;
  if (o.annotate) {
    Report r = check_welldefined(d);
    dot = export_dot(d, &r);
  } else {
    dot = export_dot(d);
  }
  out.body["dot"] = dot;
  out.text << dot;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  if (const char* env = std::getenv("PID_FUZZ_TRIALS")) {
    try {
      o.trials = std::stoul(env);
    } catch (const std::exception&) {
      std::cerr << "pid: ignoring invalid PID_FUZZ_TRIALS='" << env << "'\n";
    }
  }

  CLI::App app{"Partial influence diagram analysis"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  auto add = [&](const std::string& name, const std::string& desc) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("file", o.file, "Diagram document")->required();
    sub->add_flag("--json", o.json, "Machine-readable output");
    return sub;
  };
  auto* validate_cmd = add("validate", "Parse and validate a document");
  auto* order_cmd = add("order", "Print the induced partial order and incompatible pairs");
  auto* schemas_cmd = add("schemas", "Enumerate order schemas");
  schemas_cmd->add_option("--limit", o.limit, "Stop after N schemas (0 = all)");
  auto* check_cmd = add("check", "Decide welldefinedness");
  check_cmd->add_flag("--exact", o.exact, "Search every schema instead of the pruned set");
  auto* relevant_cmd = add("relevant", "Relevant utility nodes for a decision");
  auto* required_cmd = add("required", "Required variables for a decision");
  for (auto* sub : {relevant_cmd, required_cmd}) {
    sub->add_option("-d,--decision", o.decision, "Decision node")->required();
    sub->add_option("--schema", o.schema, "Schema index from `schemas`");
  }
  auto* significant_cmd = add("significant", "Is chance node A significant for decision D");
  significant_cmd->add_option("-a,--chance", o.chance, "Chance node")->required();
  significant_cmd->add_option("-d,--decision", o.decision, "Decision node")->required();
  significant_cmd->add_flag("--exact", o.exact, "Search every schema");
  auto* solve_cmd = add("solve", "Optimal strategy and MEU for the document's realization");
  solve_cmd->add_option("--schema", o.schema, "Schema index from `schemas`");
  auto* fuzz_cmd = add("fuzz", "Compare the rules with the exact oracle on random realizations");
  fuzz_cmd->add_option("--trials", o.trials, "Realizations to try (default from PID_FUZZ_TRIALS or 200)");
  fuzz_cmd->add_option("--seed", o.seed, "Base seed");
  auto* suggest_cmd = add("suggest", "Propose order constraints that make the diagram welldefined");
  auto* dot_cmd = add("export-dot", "Graphviz export");
  dot_cmd->add_flag("--annotate", o.annotate, "Dash informational arcs and mark significant pairs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  Output out;
  out.body["schema_version"] = kSchemaVersion;
  out.body["command"] = sub->get_name();
  try {
    Document doc = load_document(o.file);
    const Diagram& d = doc.diagram;
    if (sub == validate_cmd) cmd_validate(doc, out);
    else if (sub == order_cmd) cmd_order(d, out);
    else if (sub == schemas_cmd) cmd_schemas(d, o, out);
    else if (sub == check_cmd) cmd_check(d, o, out);
    else if (sub == relevant_cmd) cmd_rules(d, o, true, out);
    else if (sub == required_cmd) cmd_rules(d, o, false, out);
    else if (sub == significant_cmd) cmd_significant(d, o, out);
    else if (sub == solve_cmd) cmd_solve(doc, o, out);
    else if (sub == fuzz_cmd) cmd_fuzz(doc, o, out);
    else if (sub == suggest_cmd) cmd_suggest(d, out);
    else if (sub == dot_cmd) cmd_dot(d, o, out);
  } catch (const std::exception& e) {
    json err{{"message", e.what()}};
    if (auto* de = dynamic_cast<const DocumentError*>(&e)) {
      err["file"] = de->file();
      err["line"] = de->line();
      err["column"] = de->column();
    }
    std::cerr << "pid: " << e.what() << "\n";
    if (o.json) {
      out.body["error"] = err;
      std::cout << out.body.dump(2) << "\n";
    }
    return 1;
  }

  if (o.json) {
    out.body["exit_status"] = out.status;
    std::cout << out.body.dump(2) << "\n";
  } else {
    std::cout << out.text.str();
  }
  return out.status;
}
