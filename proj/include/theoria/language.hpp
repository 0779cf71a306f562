#pragma once

#include <map>
#include <string>
#include <vector>

namespace theoria {

// Qualified identifiers: segment($segment)*, segment = [A-Za-z][A-Za-z0-9-=]*.
// The `=` is admitted because mediating symbols generated by alignment are
// named `left=right`.
bool valid_name(const std::string& name);
void check_name(const std::string& name, const std::string& what);

// A many-sorted relational signature: sorts plus relation symbols with
// sorted arities. Sorts and relations are kept sorted by name so that
// serialization and set comparisons are deterministic.
struct Language {
  std::vector<std::string> sorts;
  std::map<std::string, std::vector<std::string>> relations;

  bool has_sort(const std::string& s) const;
  bool has_relation(const std::string& r) const;
  // nullptr when the relation is not declared.
  const std::vector<std::string>* arity(const std::string& r) const;

  // Throws Error on undeclared arity sorts, duplicate names, bad identifiers.
  void validate() const;

  bool operator==(const Language&) const = default;
};

Language make_language(std::vector<std::string> sorts,
                       std::map<std::string, std::vector<std::string>> rels);

}  // namespace theoria
