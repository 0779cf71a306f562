#include "theoria/workspace.hpp"

#include <sstream>

#include "theoria/error.hpp"

namespace theoria {

// ---------------------------------------------------------------------------
// S-expression reader
// ---------------------------------------------------------------------------

namespace {

struct Reader {
  const std::string& text;
  size_t pos = 0;
  int line = 1, col = 1;

  int peek() const { return pos < text.size() ? text[pos] : -1; }

  int next() {
    int c = peek();
    ++pos;
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    return c;
  }

  void skip_space() {
    while (true) {
      int c = peek();
      if (c == ';') {
        while (peek() != '\n' && peek() != -1) next();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        next();
      } else {
        return;
      }
    }
  }

  static bool atom_char(int c) {
    return c != -1 && c != '(' && c != ')' && c != ';' && c != ' ' &&
           c != '\t' && c != '\r' && c != '\n';
  }

  Sexp read() {
    skip_space();
    Sexp s;
    s.line = line;
    s.col = col;
    int c = peek();
    if (c == -1) throw ParseError("unexpected end of input", line, col);
    if (c == ')') throw ParseError("unexpected ')'", line, col);
    if (c == '(') {
      next();
      while (true) {
        skip_space();
        if (peek() == -1)
          throw ParseError("unclosed '(' opened", s.line, s.col);
        if (peek() == ')') {
          next();
          return s;
        }
        s.items.push_back(read());
      }
    }
    s.atom = true;
    while (atom_char(peek())) s.text.push_back(static_cast<char>(next()));
    return s;
  }
};

const std::string& atom_at(const Sexp& s, size_t i, const std::string& what) {
  if (i >= s.items.size() || !s.items[i].atom)
    throw ParseError("expected " + what, s.line, s.col);
  return s.items[i].text;
}

const Sexp& list_at(const Sexp& s, size_t i, const std::string& what) {
  if (i >= s.items.size() || s.items[i].atom)
    throw ParseError("expected " + what, s.line, s.col);
  return s.items[i];
}

bool is_form(const Sexp& s, const std::string& head) {
  return !s.atom && !s.items.empty() && s.items[0].atom &&
         s.items[0].text == head;
}

// Finds the unique sub-form with the given head.
const Sexp* find_form(const Sexp& s, const std::string& head) {
  const Sexp* found = nullptr;
  for (const auto& item : s.items)
    if (is_form(item, head)) {
      if (found)
        throw ParseError("duplicate (" + head + " ...) clause", item.line,
                         item.col);
      found = &item;
    }
  return found;
}

const Sexp& require_form(const Sexp& s, const std::string& head) {
  const Sexp* f = find_form(s, head);
  if (!f)
    throw ParseError("missing (" + head + " ...) clause", s.line, s.col);
  return *f;
}

}  // namespace

std::vector<Sexp> parse_sexps(const std::string& text) {
  Reader r{text};
  std::vector<Sexp> out;
  while (true) {
    r.skip_space();
    if (r.peek() == -1) return out;
    out.push_back(r.read());
  }
}

// ---------------------------------------------------------------------------
// Expression parsing
// ---------------------------------------------------------------------------

ExprPtr parse_expression(const Sexp& s) {
  if (s.atom) {
    if (s.text == "true") return mk_true();
    if (s.text == "false") return mk_false();
    throw ParseError("expected expression, got '" + s.text + "'", s.line,
                     s.col);
  }
  if (s.items.empty() || !s.items[0].atom)
    throw ParseError("expected expression", s.line, s.col);
  const std::string& head = s.items[0].text;
  auto arity_check = [&](size_t n) {
    if (s.items.size() != n + 1)
      throw ParseError("'" + head + "' takes " + std::to_string(n) +
                           " arguments",
                       s.line, s.col);
  };
  if (head == "not") {
    arity_check(1);
    return mk_not(parse_expression(s.items[1]));
  }
  for (auto [name, conn] :
       {std::pair{"and", Conn::And}, {"or", Conn::Or},
        {"implies", Conn::Implies}, {"iff", Conn::Iff}}) {
    if (head == name) {
      arity_check(2);
      return mk_binary(conn, parse_expression(s.items[1]),
                       parse_expression(s.items[2]));
    }
  }
  if (head == "forall" || head == "exists") {
    arity_check(2);
    const Sexp& blist = list_at(s, 1, "binder list");
    std::vector<std::pair<std::string, std::string>> binders;
    for (const auto& b : blist.items) {
      if (b.atom || b.items.size() != 2 || !b.items[0].atom || !b.items[1].atom)
        throw ParseError("expected (variable sort) binder", b.line, b.col);
      binders.emplace_back(b.items[0].text, b.items[1].text);
    }
    if (binders.empty())
      throw ParseError("quantifier needs at least one binder", s.line, s.col);
    return mk_quant(head == "forall" ? Conn::Forall : Conn::Exists,
                    std::move(binders), parse_expression(s.items[2]));
  }
  // Atom: (R v ...)
  std::vector<std::string> vars;
  for (size_t i = 1; i < s.items.size(); ++i)
    vars.push_back(atom_at(s, i, "variable"));
  return mk_atom(head, std::move(vars));
}

ExprPtr parse_expression(const std::string& text) {
  auto forms = parse_sexps(text);
  if (forms.size() != 1)
    throw ParseError("expected exactly one expression", 1, 1);
  return parse_expression(forms[0]);
}

// ---------------------------------------------------------------------------
// Workspace parsing
// ---------------------------------------------------------------------------

namespace {

template <typename Map>
const typename Map::mapped_type& lookup(const Map& m, const std::string& name,
                                        const std::string& kind) {
  auto it = m.find(name);
  if (it == m.end()) throw Error("unresolved " + kind + " '" + name + "'");
  return it->second;
}

std::vector<std::pair<std::string, std::string>> parse_pair_list(
    const Sexp& form) {
  std::vector<std::pair<std::string, std::string>> out;
  for (size_t i = 1; i < form.items.size(); ++i) {
    const Sexp& p = form.items[i];
    if (p.atom || p.items.size() != 2 || !p.items[0].atom || !p.items[1].atom)
      throw ParseError("expected (a b) pair", p.line, p.col);
    out.emplace_back(p.items[0].text, p.items[1].text);
  }
  return out;
}

void parse_language_form(Workspace& ws, const Sexp& s) {
  const std::string& name = atom_at(s, 1, "language name");
  check_name(name, "language");
  if (ws.languages.count(name))
    throw ParseError("duplicate language name '" + name + "'", s.line, s.col);
  std::vector<std::string> sorts;
  const Sexp& sform = require_form(s, "sorts");
  for (size_t i = 1; i < sform.items.size(); ++i)
    sorts.push_back(atom_at(sform, i, "sort name"));
  std::map<std::string, std::vector<std::string>> rels;
  if (const Sexp* rform = find_form(s, "relations")) {
    for (size_t i = 1; i < rform->items.size(); ++i) {
      const Sexp& r = list_at(*rform, i, "relation declaration");
      const std::string& rname = atom_at(r, 0, "relation name");
      std::vector<std::string> arity;
      for (size_t j = 1; j < r.items.size(); ++j)
        arity.push_back(atom_at(r, j, "sort name"));
      if (!rels.emplace(rname, std::move(arity)).second)
        throw ParseError("duplicate relation name '" + rname + "'", r.line,
                         r.col);
    }
  }
  ws.languages.emplace(name, make_language(std::move(sorts), std::move(rels)));
}

void parse_theory_form(Workspace& ws, const Sexp& s) {
  const std::string& name = atom_at(s, 1, "theory name");
  check_name(name, "theory");
  if (ws.theories.count(name))
    throw ParseError("duplicate theory name '" + name + "'", s.line, s.col);
  const std::string& lname =
      atom_at(require_form(s, "language"), 1, "language name");
  const Language& lang = lookup(ws.languages, lname, "language");
  std::vector<ExprPtr> axioms;
  if (const Sexp* aform = find_form(s, "axioms"))
    for (size_t i = 1; i < aform->items.size(); ++i)
      axioms.push_back(parse_expression(aform->items[i]));
  ws.theories.emplace(
      name, Workspace::TheoryEntry{lname, make_theory(lang, std::move(axioms))});
}

void parse_morphism_form(Workspace& ws, const Sexp& s) {
  const std::string& name = atom_at(s, 1, "morphism name");
  check_name(name, "morphism");
  if (ws.morphisms.count(name))
    throw ParseError("duplicate morphism name '" + name + "'", s.line, s.col);
  const std::string& sname =
      atom_at(require_form(s, "source"), 1, "language name");
  const std::string& tname =
      atom_at(require_form(s, "target"), 1, "language name");
  LanguageMorphism f{lookup(ws.languages, sname, "language"),
                     lookup(ws.languages, tname, "language"),
                     {},
                     {}};
  if (const Sexp* sform = find_form(s, "sorts"))
    for (auto& [a, b] : parse_pair_list(*sform)) {
      if (!f.sort_map.emplace(a, b).second)
        throw ParseError("sort '" + a + "' mapped twice", sform->line,
                         sform->col);
    }
  if (const Sexp* rform = find_form(s, "relations"))
    for (auto& [a, b] : parse_pair_list(*rform)) {
      if (!f.rel_map.emplace(a, b).second)
        throw ParseError("relation '" + a + "' mapped twice", rform->line,
                         rform->col);
    }
  f.validate();
  ws.morphisms.emplace(name, Workspace::MorphismEntry{sname, tname, std::move(f)});
}

void parse_endorelation_form(Workspace& ws, const Sexp& s) {
  const std::string& name = atom_at(s, 1, "endorelation name");
  check_name(name, "endorelation");
  if (ws.endorelations.count(name))
    throw ParseError("duplicate endorelation name '" + name + "'", s.line,
                     s.col);
  const std::string& lname =
      atom_at(require_form(s, "language"), 1, "language name");
  const Language& lang = lookup(ws.languages, lname, "language");
  std::vector<std::pair<std::string, std::string>> sp, rp;
  if (const Sexp* sform = find_form(s, "sorts")) sp = parse_pair_list(*sform);
  if (const Sexp* rform = find_form(s, "relations"))
    rp = parse_pair_list(*rform);
  ws.endorelations.emplace(
      name, Workspace::EndorelationEntry{
                lname, make_endorelation(lang, std::move(sp), std::move(rp))});
}

void parse_diagram_form(Workspace& ws, const Sexp& s) {
  const std::string& name = atom_at(s, 1, "diagram name");
  check_name(name, "diagram");
  if (ws.diagrams.count(name))
    throw ParseError("duplicate diagram name '" + name + "'", s.line, s.col);
  Workspace::DiagramEntry entry;
  const Sexp& nform = require_form(s, "nodes");
  for (size_t i = 1; i < nform.items.size(); ++i) {
    const Sexp& n = list_at(nform, i, "node declaration");
    const std::string& nname = atom_at(n, 0, "node name");
    const std::string& tname = atom_at(n, 1, "theory name");
    const auto& te = lookup(ws.theories, tname, "theory");
    entry.diagram.shape.nodes.push_back(nname);
    entry.diagram.node_theories[nname] = te.theory;
    entry.node_theory[nname] = tname;
  }
  if (const Sexp* eform = find_form(s, "edges")) {
    for (size_t i = 1; i < eform->items.size(); ++i) {
      const Sexp& e = list_at(*eform, i, "edge declaration");
      if (e.items.size() != 4)
        throw ParseError("expected (edge src dst morphism)", e.line, e.col);
      const std::string& ename = atom_at(e, 0, "edge name");
      const std::string& src = atom_at(e, 1, "node name");
      const std::string& dst = atom_at(e, 2, "node name");
      const std::string& mname = atom_at(e, 3, "morphism name");
      const auto& me = lookup(ws.morphisms, mname, "morphism");
      entry.diagram.shape.edges.push_back({ename, src, dst});
      entry.diagram.edge_maps[ename] = me.morphism;
      entry.edges.emplace_back(ename, Workspace::EdgeRef{src, dst, mname});
    }
  }
  entry.diagram.validate();
  ws.diagrams.emplace(name, std::move(entry));
}

}  // namespace

const Language& Workspace::language(const std::string& name) const {
  return lookup(languages, name, "language");
}
const Workspace::TheoryEntry& Workspace::theory(const std::string& name) const {
  return lookup(theories, name, "theory");
}
const Workspace::MorphismEntry& Workspace::morphism(
    const std::string& name) const {
  return lookup(morphisms, name, "morphism");
}
const Workspace::EndorelationEntry& Workspace::endorelation(
    const std::string& name) const {
  return lookup(endorelations, name, "endorelation");
}
const Workspace::DiagramEntry& Workspace::diagram(
    const std::string& name) const {
  return lookup(diagrams, name, "diagram");
}

void parse_workspace_into(Workspace& ws, const std::string& text) {
  for (const Sexp& s : parse_sexps(text)) {
    if (s.atom || s.items.empty() || !s.items[0].atom)
      throw ParseError("expected a top-level (kind name ...) form", s.line,
                       s.col);
    const std::string& kind = s.items[0].text;
    try {
      if (kind == "language")
        parse_language_form(ws, s);
      else if (kind == "theory")
        parse_theory_form(ws, s);
      else if (kind == "morphism")
        parse_morphism_form(ws, s);
      else if (kind == "endorelation")
        parse_endorelation_form(ws, s);
      else if (kind == "diagram")
        parse_diagram_form(ws, s);
      else
        throw ParseError("unknown top-level form '" + kind + "'", s.line,
                         s.col);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      // Attach the form's position to semantic errors found while resolving
      // the entity (unresolved references, duplicate symbols, bad arities).
      throw ParseError(e.what(), s.line, s.col);
    }
  }
}

Workspace parse_workspace(const std::string& text) {
  Workspace ws;
  parse_workspace_into(ws, text);
  return ws;
}

// ---------------------------------------------------------------------------
// Canonical printing
// ---------------------------------------------------------------------------

std::string print_language(const std::string& name, const Language& lang) {
  std::ostringstream os;
  os << "(language " << name << "\n  (sorts";
  for (const auto& s : lang.sorts) os << " " << s;
  os << ")\n  (relations";
  for (const auto& [r, ar] : lang.relations) {
    os << " (" << r;
    for (const auto& s : ar) os << " " << s;
    os << ")";
  }
  os << "))\n";
  return os.str();
}

std::string print_theory(const std::string& name, const std::string& lang_name,
                         const Theory& t) {
  std::ostringstream os;
  os << "(theory " << name << "\n  (language " << lang_name << ")\n  (axioms";
  for (const auto& a : t.axioms) os << "\n    " << print_expr(a);
  os << "))\n";
  return os.str();
}

std::string print_morphism(const std::string& name,
                           const std::string& source_name,
                           const std::string& target_name,
                           const LanguageMorphism& f) {
  std::ostringstream os;
  os << "(morphism " << name << "\n  (source " << source_name << ")\n  (target "
     << target_name << ")\n  (sorts";
  for (const auto& [a, b] : f.sort_map) os << " (" << a << " " << b << ")";
  os << ")\n  (relations";
  for (const auto& [a, b] : f.rel_map) os << " (" << a << " " << b << ")";
  os << "))\n";
  return os.str();
}

std::string print_endorelation(const std::string& name,
                               const std::string& lang_name,
                               const Endorelation& r) {
  std::ostringstream os;
  os << "(endorelation " << name << "\n  (language " << lang_name
     << ")\n  (sorts";
  for (const auto& [a, b] : r.sort_pairs) os << " (" << a << " " << b << ")";
  os << ")\n  (relations";
  for (const auto& [a, b] : r.rel_pairs) os << " (" << a << " " << b << ")";
  os << "))\n";
  return os.str();
}

std::string print_diagram(const std::string& name,
                          const Workspace::DiagramEntry& d) {
  std::ostringstream os;
  os << "(diagram " << name << "\n  (nodes";
  for (const auto& n : d.diagram.shape.nodes)
    os << " (" << n << " " << d.node_theory.at(n) << ")";
  os << ")\n  (edges";
  for (const auto& [ename, ref] : d.edges)
    os << " (" << ename << " " << ref.src << " " << ref.dst << " "
       << ref.morphism << ")";
  os << "))\n";
  return os.str();
}

std::string export_dot(const std::string& name,
                       const Workspace::DiagramEntry& d) {
  std::ostringstream os;
  os << "digraph \"" << name << "\" {\n";
  for (const auto& n : d.diagram.shape.nodes)
    os << "  \"" << n << "\" [label=\"" << n << "\\n("
       << d.node_theory.at(n) << ", "
       << d.diagram.node_theories.at(n).axioms.size() << ")\"];\n";
  for (const auto& [ename, ref] : d.edges)
    os << "  \"" << ref.src << "\" -> \"" << ref.dst << "\" [label=\""
       << ref.morphism << "\"];\n";
  os << "}\n";
  return os.str();
}

}  // namespace theoria
