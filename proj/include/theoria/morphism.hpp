#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "theoria/expr.hpp"
#include "theoria/language.hpp"

namespace theoria {

// Total, arity-preserving symbol map between languages.
struct LanguageMorphism {
  Language source;
  Language target;
  std::map<std::string, std::string> sort_map;
  std::map<std::string, std::string> rel_map;

  // Totality on source symbols, images declared in target, arity preservation.
  void validate() const;

  bool operator==(const LanguageMorphism&) const = default;
};

LanguageMorphism identity_morphism(const Language& lang);
LanguageMorphism compose(const LanguageMorphism& f, const LanguageMorphism& g);

// Translates an expression along a morphism: relations and binder sorts are
// substituted, the shape is unchanged, the result is canonicalized.
ExprPtr expr_map(const LanguageMorphism& f, const ExprPtr& e);

// All source expressions (up to alpha) whose translation alpha-equals e2.
// Finite because translation preserves the AST shape.
std::vector<ExprPtr> expr_preimage(const LanguageMorphism& f,
                                   const ExprPtr& e2);

// Symbol synonymy on one language. Pairs are stored symmetrically reduced
// (lexicographically ordered, no diagonal); queries go through the generated
// equivalence closure.
struct Endorelation {
  Language language;
  std::set<std::pair<std::string, std::string>> sort_pairs;
  std::set<std::pair<std::string, std::string>> rel_pairs;

  // Symbols declared; equivalence closure arity-consistent.
  void validate() const;
};

Endorelation make_endorelation(
    Language lang, std::vector<std::pair<std::string, std::string>> sorts,
    std::vector<std::pair<std::string, std::string>> rels);

// Equivalence classes of the closure, each sorted, keyed by least member.
struct SymbolPartition {
  std::map<std::string, std::vector<std::string>> sort_classes;
  std::map<std::string, std::vector<std::string>> rel_classes;
  std::map<std::string, std::string> sort_rep;  // symbol -> class name
  std::map<std::string, std::string> rel_rep;
};

SymbolPartition closure(const Endorelation& r);

// Two source symbols related iff mapped to the same target symbol.
Endorelation kernel(const LanguageMorphism& f);

// Collapses a language along the closure of an endorelation; classes are
// named by their lexicographically least member. Returns the quotient and
// the epimorphic projection.
std::pair<Language, LanguageMorphism> quotient_language(const Language& lang,
                                                        const Endorelation& r);

}  // namespace theoria
