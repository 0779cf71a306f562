// Command-line front end: workspace loading, command dispatch, verdict
// reporting, DOT export, deterministic file output.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "theoria/align.hpp"
#include "theoria/diagram.hpp"
#include "theoria/error.hpp"
#include "theoria/lattice.hpp"
#include "theoria/solver.hpp"
#include "theoria/version.hpp"
#include "theoria/workspace.hpp"

namespace {

using namespace theoria;

struct Options {
  std::vector<std::string> workspace_paths;
  std::string diagram, theory, expr, out, pairs;
  std::string left, right;
  std::vector<std::string> theories;  // for sum
  std::string name;
  std::string indices;
  Bounds bounds;
  bool verify = false;
  bool witness = false;
  bool fail_on_unknown = false;
  bool fail_on_no = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file '" + path + "'");
  out << content;
}

Workspace load(const Options& opt) {
  Workspace ws;
  for (const auto& p : opt.workspace_paths) parse_workspace_into(ws, read_file(p));
  return ws;
}

std::string file_header(const std::string& command_line, const Bounds& b) {
  std::ostringstream os;
  os << "; theoria " << kVersion << "\n";
  os << "; command: " << command_line << "\n";
  os << "; bounds: size=" << b.max_size << " depth=" << b.term_depth << "\n";
  return os.str();
}

// Verdict handling shared by the decision verbs. Returns the process exit
// status.
int report_verdict(const Verdict& v, const Options& opt) {
  std::cout << to_string(v.value) << "\n";
  if (opt.witness) {
    if (v.model) std::cout << print_structure(*v.model) << "\n";
    if (v.refutation) std::cout << print_refutation(*v.refutation) << "\n";
    if (!v.note.empty()) std::cout << "; " << v.note << "\n";
  }
  if (opt.fail_on_unknown && v.value == Truth::Unknown) return 3;
  if (opt.fail_on_no && v.value == Truth::No) return 3;
  return 0;
}

std::string fusion_output(const Workspace& ws, const std::string& base_name,
                          const Workspace::DiagramEntry& entry,
                          const TheoryFusion& fusion,
                          const std::string& command_line, const Bounds& b) {
  std::ostringstream os;
  os << file_header(command_line, b);
  // Node languages first so that the leg morphisms resolve.
  std::vector<std::string> emitted;
  for (const auto& n : entry.diagram.shape.nodes) {
    const std::string& lname = ws.theory(entry.node_theory.at(n)).language;
    if (std::find(emitted.begin(), emitted.end(), lname) == emitted.end()) {
      os << print_language(lname, ws.language(lname));
      emitted.push_back(lname);
    }
  }
  os << print_language(base_name + "-lang", fusion.lang.fused);
  os << print_theory(base_name, base_name + "-lang", fusion.fused);
  for (const auto& n : entry.diagram.shape.nodes) {
    const std::string& lname = ws.theory(entry.node_theory.at(n)).language;
    os << print_morphism(base_name + "-leg-" + n, lname, base_name + "-lang",
                         fusion.lang.cocone.legs.at(n));
  }
  return os.str();
}

std::vector<size_t> parse_indices(const std::string& text) {
  std::vector<size_t> out;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    out.push_back(static_cast<size_t>(std::stoul(cur)));
    cur.clear();
  };
  for (char c : text) {
    if (c == ',' || c == ' ') {
      flush();
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    } else {
      throw Error("bad axiom index list '" + text + "'");
    }
  }
  flush();
  return out;
}

AlignmentSpec parse_pairs_file(const Workspace& ws, const Options& opt) {
  AlignmentSpec spec;
  spec.left = ws.theory(opt.left).theory;
  spec.right = ws.theory(opt.right).theory;
  auto forms = parse_sexps(read_file(opt.pairs));
  if (forms.size() != 1 || forms[0].atom || forms[0].items.empty() ||
      !forms[0].items[0].atom || forms[0].items[0].text != "pairs")
    throw Error("pairs file must contain a single (pairs ...) form");
  for (size_t i = 1; i < forms[0].items.size(); ++i) {
    const Sexp& clause = forms[0].items[i];
    if (clause.atom || clause.items.empty() || !clause.items[0].atom)
      throw ParseError("expected (sorts ...), (relations ...) or (axioms ...)",
                       clause.line, clause.col);
    const std::string& head = clause.items[0].text;
    if (head == "sorts" || head == "relations") {
      for (size_t j = 1; j < clause.items.size(); ++j) {
        const Sexp& p = clause.items[j];
        if (p.atom || p.items.size() != 2 || !p.items[0].atom ||
            !p.items[1].atom)
          throw ParseError("expected (left right) pair", p.line, p.col);
        auto& dst = head == "sorts" ? spec.sort_pairs : spec.rel_pairs;
        dst.emplace_back(p.items[0].text, p.items[1].text);
      }
    } else if (head == "axioms") {
      for (size_t j = 1; j < clause.items.size(); ++j)
        spec.mediating_axioms.push_back(parse_expression(clause.items[j]));
    } else {
      throw ParseError("unknown pairs clause '" + head + "'", clause.line,
                       clause.col);
    }
  }
  return spec;
}

std::string alignment_output(const Workspace& ws, const Options& opt,
                             const TheoryDiagram& span,
                             const std::string& command_line) {
  const std::string& name = opt.name;
  std::ostringstream os;
  os << file_header(command_line, opt.bounds);
  const auto& lte = ws.theory(opt.left);
  const auto& rte = ws.theory(opt.right);
  os << print_language(lte.language, ws.language(lte.language));
  if (rte.language != lte.language)
    os << print_language(rte.language, ws.language(rte.language));
  os << print_theory(opt.left, lte.language, lte.theory);
  os << print_theory(opt.right, rte.language, rte.theory);
  os << print_language(name + "-mid-lang",
                       span.node_theories.at(kAlignApex).base);
  os << print_theory(name + "-mid", name + "-mid-lang",
                     span.node_theories.at(kAlignApex));
  os << print_morphism(name + "-to-left", name + "-mid-lang", lte.language,
                       span.edge_maps.at("to-left"));
  os << print_morphism(name + "-to-right", name + "-mid-lang", rte.language,
                       span.edge_maps.at("to-right"));
  Workspace::DiagramEntry entry;
  entry.diagram = span;
  entry.node_theory = {{kAlignApex, name + "-mid"},
                       {kAlignLeft, opt.left},
                       {kAlignRight, opt.right}};
  entry.edges = {{"to-left", {kAlignApex, kAlignLeft, name + "-to-left"}},
                 {"to-right", {kAlignApex, kAlignRight, name + "-to-right"}}};
  os << print_diagram(name, entry);
  return os.str();
}

int run(const std::string& verb, const Options& opt,
        const std::string& command_line) {
  Workspace ws = load(opt);

  if (verb == "check") {
    // Parsing already enforced all invariants.
    if (opt.verify) {
      for (const auto& [dname, entry] : ws.diagrams) {
        for (const auto& [ename, ref] : entry.edges) {
          Verdict v = validate_theory_morphism(
              entry.diagram.edge_maps.at(ename),
              entry.diagram.node_theories.at(ref.src),
              entry.diagram.node_theories.at(ref.dst), opt.bounds);
          std::cout << dname << "." << ename << ": " << to_string(v.value)
                    << "\n";
          if (opt.fail_on_no && v.value == Truth::No) return 3;
          if (opt.fail_on_unknown && v.value == Truth::Unknown) return 3;
        }
      }
    }
    std::cout << "ok\n";
    return 0;
  }

  if (verb == "entails") {
    const auto& te = ws.theory(opt.theory);
    ExprPtr e = parse_expression(opt.expr);
    return report_verdict(entails(te.theory, e, opt.bounds), opt);
  }

  if (verb == "consistent") {
    const auto& te = ws.theory(opt.theory);
    return report_verdict(consistent(te.theory, opt.bounds), opt);
  }

  if (verb == "classify") {
    const auto& entry = ws.diagram(opt.diagram);
    Classification c = classify(entry.diagram, opt.bounds);
    std::cout << to_string(c.kind) << "\n";
    if (opt.witness) {
      std::cout << "; fusion: " << to_string(c.fusion_verdict.value) << "\n";
      for (const auto& [n, v] : c.node_verdicts)
        std::cout << "; node " << n << ": " << to_string(v.value) << "\n";
    }
    if (opt.fail_on_unknown && c.kind == Cosmicity::Unknown) return 3;
    return 0;
  }

  if (verb == "fuse") {
    const auto& entry = ws.diagram(opt.diagram);
    if (opt.verify) {
      for (const auto& [ename, ref] : entry.edges) {
        Verdict v = validate_theory_morphism(
            entry.diagram.edge_maps.at(ename),
            entry.diagram.node_theories.at(ref.src),
            entry.diagram.node_theories.at(ref.dst), opt.bounds);
        if (v.value != Truth::Yes)
          throw Error("edge '" + ename + "' failed verification (" +
                      to_string(v.value) + ")");
      }
    }
    TheoryFusion fusion = theory_fusion(entry.diagram);
    write_file(opt.out, fusion_output(ws, opt.diagram, entry, fusion,
                                      command_line, opt.bounds));
    return 0;
  }

  if (verb == "sum") {
    std::vector<std::pair<std::string, Theory>> parts;
    for (const auto& tname : opt.theories)
      parts.emplace_back(tname, ws.theory(tname).theory);
    auto [sum, injections] = theory_sum(parts);
    std::ostringstream os;
    os << file_header(command_line, opt.bounds);
    std::vector<std::string> emitted;
    for (const auto& tname : opt.theories) {
      const std::string& lname = ws.theory(tname).language;
      if (std::find(emitted.begin(), emitted.end(), lname) == emitted.end()) {
        os << print_language(lname, ws.language(lname));
        emitted.push_back(lname);
      }
    }
    os << print_language(opt.name + "-lang", sum.base);
    os << print_theory(opt.name, opt.name + "-lang", sum);
    for (size_t i = 0; i < parts.size(); ++i)
      os << print_morphism(opt.name + "-inj-" + parts[i].first,
                           ws.theory(parts[i].first).language,
                           opt.name + "-lang", injections[i].map);
    write_file(opt.out, os.str());
    return 0;
  }

  if (verb == "subtheory") {
    const auto& te = ws.theory(opt.theory);
    auto [sub, inclusion] = subtheory(te.theory, parse_indices(opt.indices));
    std::ostringstream os;
    os << file_header(command_line, opt.bounds);
    os << print_language(te.language, ws.language(te.language));
    std::string name = opt.name.empty() ? opt.theory + "-sub" : opt.name;
    os << print_theory(name, te.language, sub);
    os << print_morphism(name + "-inj", te.language, te.language,
                         inclusion.map);
    write_file(opt.out, os.str());
    return 0;
  }

  if (verb == "align" || verb == "merge") {
    AlignmentSpec spec = parse_pairs_file(ws, opt);
    if (verb == "align") {
      TheoryDiagram span = build_span(spec);
      write_file(opt.out, alignment_output(ws, opt, span, command_line));
      return 0;
    }
    MergeResult result = merge(spec, opt.bounds);
    std::cout << to_string(result.classification.kind) << "\n";
    for (const auto& [fused, members] : result.sort_provenance) {
      std::cout << "sort " << fused << " <=";
      for (const auto& m : members) std::cout << " " << m;
      std::cout << "\n";
    }
    for (const auto& [fused, members] : result.rel_provenance) {
      std::cout << "relation " << fused << " <=";
      for (const auto& m : members) std::cout << " " << m;
      std::cout << "\n";
    }
    if (!opt.out.empty()) {
      // Same layout as fuse, over the generated span.
      std::ostringstream os;
      os << file_header(command_line, opt.bounds);
      const auto& span = result.fusion;
      const auto& lte = ws.theory(opt.left);
      const auto& rte = ws.theory(opt.right);
      os << print_language(lte.language, ws.language(lte.language));
      if (rte.language != lte.language)
        os << print_language(rte.language, ws.language(rte.language));
      os << print_language(opt.name + "-mid-lang",
                           span.cocone.legs.at(kAlignApex).map.source);
      os << print_language(opt.name + "-lang", span.lang.fused);
      os << print_theory(opt.name, opt.name + "-lang", span.fused);
      os << print_morphism(opt.name + "-leg-" + kAlignApex,
                           opt.name + "-mid-lang", opt.name + "-lang",
                           span.lang.cocone.legs.at(kAlignApex));
      os << print_morphism(opt.name + "-leg-" + kAlignLeft, lte.language,
                           opt.name + "-lang",
                           span.lang.cocone.legs.at(kAlignLeft));
      os << print_morphism(opt.name + "-leg-" + kAlignRight, rte.language,
                           opt.name + "-lang",
                           span.lang.cocone.legs.at(kAlignRight));
      write_file(opt.out, os.str());
    }
    if (opt.fail_on_unknown &&
        result.classification.kind == Cosmicity::Unknown)
      return 3;
    return 0;
  }

  if (verb == "dot") {
    const auto& entry = ws.diagram(opt.diagram);
    std::string dot = export_dot(opt.diagram, entry);
    if (opt.out.empty())
      std::cout << dot;
    else
      write_file(opt.out, dot);
    return 0;
  }

  throw Error("unknown verb '" + verb + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"theoria: diagrams of first-order theories and their fusion"};
  app.set_version_flag("--version", std::string("theoria ") + theoria::kVersion);
  app.require_subcommand(1);

  Options opt;
  std::string endorelation_name;

  auto add_common = [&](CLI::App* sub, bool needs_workspace = true) {
    auto* w = sub->add_option("--workspace", opt.workspace_paths,
                              "workspace file(s), parsed in order");
    if (needs_workspace) w->required();
    sub->add_option("--bound-size", opt.bounds.max_size,
                    "max universe size per sort for model search");
    sub->add_option("--bound-depth", opt.bounds.term_depth,
                    "max Herbrand term depth for refutation");
    sub->add_flag("--witness", opt.witness, "print witnesses for verdicts");
    sub->add_flag("--fail-on-unknown", opt.fail_on_unknown,
                  "exit 3 on unknown verdicts");
    sub->add_flag("--fail-on-no", opt.fail_on_no, "exit 3 on no verdicts");
  };

  auto* check = app.add_subcommand("check", "parse and validate a workspace");
  add_common(check);
  check->add_flag("--verify", opt.verify,
                  "also verify diagram edge morphism obligations");

  auto* entails_cmd =
      app.add_subcommand("entails", "does a theory entail an expression");
  add_common(entails_cmd);
  entails_cmd->add_option("--theory", opt.theory, "theory name")->required();
  entails_cmd->add_option("--expr", opt.expr, "expression text")->required();

  auto* consistent_cmd =
      app.add_subcommand("consistent", "is a theory consistent");
  add_common(consistent_cmd);
  consistent_cmd->add_option("--theory", opt.theory, "theory name")->required();

  auto* classify_cmd = app.add_subcommand(
      "classify", "monocosmic / polycosmic / pointwise-inconsistent");
  add_common(classify_cmd);
  classify_cmd->add_option("--diagram", opt.diagram, "diagram name")
      ->required();

  auto* fuse = app.add_subcommand("fuse", "fuse a diagram of theories");
  add_common(fuse);
  fuse->add_option("--diagram", opt.diagram, "diagram name")->required();
  fuse->add_option("--out", opt.out, "output workspace file")->required();
  fuse->add_flag("--verify", opt.verify,
                 "verify edge morphism obligations before fusing");

  auto* sum = app.add_subcommand("sum", "sum of named theories");
  add_common(sum);
  sum->add_option("--theory", opt.theories, "theory name (repeatable)")
      ->required();
  sum->add_option("--name", opt.name, "name of the sum (default: sum)");
  sum->add_option("--out", opt.out, "output workspace file")->required();

  auto* quotient =
      app.add_subcommand("quotient", "quotient a theory by an endorelation");
  add_common(quotient);
  quotient->add_option("--theory", opt.theory, "theory name")->required();
  quotient->add_option("--endorelation", endorelation_name,
                       "endorelation name")
      ->required();
  quotient->add_option("--name", opt.name, "name of the quotient");
  quotient->add_option("--out", opt.out, "output workspace file")->required();

  auto* subtheory_cmd =
      app.add_subcommand("subtheory", "select axioms into a subtheory");
  add_common(subtheory_cmd);
  subtheory_cmd->add_option("--theory", opt.theory, "theory name")->required();
  subtheory_cmd
      ->add_option("--indices", opt.indices,
                   "comma-separated axiom indices (canonical order)")
      ->required();
  subtheory_cmd->add_option("--name", opt.name, "name of the subtheory");
  subtheory_cmd->add_option("--out", opt.out, "output workspace file")
      ->required();

  auto* align = app.add_subcommand(
      "align", "build an alignment span from type correspondences");
  add_common(align);
  align->add_option("--left", opt.left, "left theory")->required();
  align->add_option("--right", opt.right, "right theory")->required();
  align->add_option("--pairs", opt.pairs, "pairs file")->required();
  align->add_option("--name", opt.name, "alignment name (default: alignment)");
  align->add_option("--out", opt.out, "output workspace file")->required();

  auto* merge_cmd =
      app.add_subcommand("merge", "align and unify two theories");
  add_common(merge_cmd);
  merge_cmd->add_option("--left", opt.left, "left theory")->required();
  merge_cmd->add_option("--right", opt.right, "right theory")->required();
  merge_cmd->add_option("--pairs", opt.pairs, "pairs file")->required();
  merge_cmd->add_option("--name", opt.name, "merge name (default: merged)");
  merge_cmd->add_option("--out", opt.out, "output workspace file");

  auto* dot = app.add_subcommand("dot", "export a diagram as DOT");
  add_common(dot);
  dot->add_option("--diagram", opt.diagram, "diagram name")->required();
  dot->add_option("--out", opt.out, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  std::string command_line;
  for (int i = 1; i < argc; ++i) {
    if (i > 1) command_line += " ";
    command_line += argv[i];
  }

  try {
    std::string verb = app.get_subcommands().front()->get_name();
    if (opt.name.empty()) {
      if (verb == "sum") opt.name = "sum";
      if (verb == "align") opt.name = "alignment";
      if (verb == "merge") opt.name = "merged";
    }
    if (verb == "quotient") {
      // Handled here so the endorelation option scope stays local.
      theoria::Workspace ws = load(opt);
      const auto& te = ws.theory(opt.theory);
      const auto& re = ws.endorelation(endorelation_name);
      if (re.language != te.language)
        throw theoria::Error(
            "endorelation and theory are based on different languages");
      auto [q, epi] = theoria::quotient_theory(te.theory, re.relation);
      std::string name =
          opt.name.empty() ? opt.theory + "-quotient" : opt.name;
      std::ostringstream os;
      os << file_header(command_line, opt.bounds);
      os << theoria::print_language(te.language, ws.language(te.language));
      os << theoria::print_language(name + "-lang", q.base);
      os << theoria::print_theory(name, name + "-lang", q);
      os << theoria::print_morphism(name + "-epi", te.language, name + "-lang",
                                    epi.map);
      write_file(opt.out, os.str());
      return 0;
    }
    return run(verb, opt, command_line);
  } catch (const theoria::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const theoria::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
