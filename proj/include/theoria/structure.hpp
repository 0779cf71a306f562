#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "theoria/expr.hpp"
#include "theoria/language.hpp"

namespace theoria {

// A finite Tarskian structure: per-sort universe {0..n-1}, per-relation
// extension as a set of index tuples.
struct FiniteStructure {
  Language lang;
  std::map<std::string, int> universe;  // sort -> size, all >= 1
  std::map<std::string, std::set<std::vector<int>>> extensions;

  void validate() const;
};

// Truth value of a closed expression; quantifiers range over universes.
bool evaluate(const FiniteStructure& m, const ExprPtr& e);

std::string print_structure(const FiniteStructure& m);

}  // namespace theoria
