#include "theoria/language.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "theoria/error.hpp"

namespace theoria {

bool valid_name(const std::string& name) {
  if (name.empty()) return false;
  bool at_segment_start = true;
  for (char c : name) {
    if (c == '$') {
      if (at_segment_start) return false;  // empty segment
      at_segment_start = true;
      continue;
    }
    if (at_segment_start) {
      if (!std::isalpha(static_cast<unsigned char>(c))) return false;
      at_segment_start = false;
    } else {
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '=')
        return false;
    }
  }
  return !at_segment_start;
}

void check_name(const std::string& name, const std::string& what) {
  if (!valid_name(name))
    throw Error("invalid " + what + " identifier '" + name + "'");
}

bool Language::has_sort(const std::string& s) const {
  return std::binary_search(sorts.begin(), sorts.end(), s);
}

bool Language::has_relation(const std::string& r) const {
  return relations.count(r) != 0;
}

const std::vector<std::string>* Language::arity(const std::string& r) const {
  auto it = relations.find(r);
  return it == relations.end() ? nullptr : &it->second;
}

void Language::validate() const {
  std::set<std::string> seen;
  for (const auto& s : sorts) {
    check_name(s, "sort");
    if (!seen.insert(s).second) throw Error("duplicate sort '" + s + "'");
  }
  if (!std::is_sorted(sorts.begin(), sorts.end()))
    throw Error("internal: sorts not in canonical order");
  for (const auto& [r, ar] : relations) {
    check_name(r, "relation");
    for (const auto& s : ar)
      if (!has_sort(s))
        throw Error("unresolved sort '" + s + "' in arity of relation '" + r +
                    "'");
  }
}

Language make_language(std::vector<std::string> sorts,
                       std::map<std::string, std::vector<std::string>> rels) {
  std::sort(sorts.begin(), sorts.end());
  auto dup = std::adjacent_find(sorts.begin(), sorts.end());
  if (dup != sorts.end()) throw Error("duplicate sort '" + *dup + "'");
  Language lang{std::move(sorts), std::move(rels)};
  lang.validate();
  return lang;
}

}  // namespace theoria
