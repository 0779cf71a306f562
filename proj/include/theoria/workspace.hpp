#pragma once

#include <map>
#include <string>
#include <vector>

#include "theoria/diagram.hpp"
#include "theoria/morphism.hpp"
#include "theoria/theory.hpp"

namespace theoria {

// S-expression node with source position.
struct Sexp {
  bool atom = false;
  std::string text;          // atom payload
  std::vector<Sexp> items;   // list payload
  int line = 0, col = 0;
};

// Parses a whole document (`;` starts a line comment) into top-level forms.
std::vector<Sexp> parse_sexps(const std::string& text);

ExprPtr parse_expression(const Sexp& s);
ExprPtr parse_expression(const std::string& text);

// Named entities of one or more workspace documents. References resolve to
// earlier definitions; names are unique per kind.
struct Workspace {
  struct TheoryEntry {
    std::string language;
    Theory theory;
  };
  struct MorphismEntry {
    std::string source, target;
    LanguageMorphism morphism;
  };
  struct EndorelationEntry {
    std::string language;
    Endorelation relation;
  };
  struct EdgeRef {
    std::string src, dst, morphism;
  };
  struct DiagramEntry {
    TheoryDiagram diagram;
    std::map<std::string, std::string> node_theory;  // node -> theory name
    std::vector<std::pair<std::string, EdgeRef>> edges;
  };

  std::map<std::string, Language> languages;
  std::map<std::string, TheoryEntry> theories;
  std::map<std::string, MorphismEntry> morphisms;
  std::map<std::string, EndorelationEntry> endorelations;
  std::map<std::string, DiagramEntry> diagrams;

  const Language& language(const std::string& name) const;
  const TheoryEntry& theory(const std::string& name) const;
  const MorphismEntry& morphism(const std::string& name) const;
  const EndorelationEntry& endorelation(const std::string& name) const;
  const DiagramEntry& diagram(const std::string& name) const;
};

Workspace parse_workspace(const std::string& text);
void parse_workspace_into(Workspace& ws, const std::string& text);

// Canonical printing: deterministic ordering, parse(print(x)) == x.
std::string print_language(const std::string& name, const Language& lang);
std::string print_theory(const std::string& name, const std::string& lang_name,
                         const Theory& t);
std::string print_morphism(const std::string& name,
                           const std::string& source_name,
                           const std::string& target_name,
                           const LanguageMorphism& f);
std::string print_endorelation(const std::string& name,
                               const std::string& lang_name,
                               const Endorelation& r);
std::string print_diagram(const std::string& name,
                          const Workspace::DiagramEntry& d);

// One DOT digraph; nodes labeled name\n(theory, #axioms), edges labeled with
// the morphism name; deterministic ordering.
std::string export_dot(const std::string& name,
                       const Workspace::DiagramEntry& d);

}  // namespace theoria
