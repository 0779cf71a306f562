#include "theoria/theory.hpp"

#include <algorithm>
#include <map>

#include "theoria/error.hpp"

namespace theoria {

bool Theory::operator==(const Theory& o) const {
  return base == o.base && axiom_texts(*this) == axiom_texts(o);
}

Theory make_theory(Language base, std::vector<ExprPtr> axioms) {
  std::map<std::string, ExprPtr> canon;
  for (const auto& a : axioms) {
    check_well_formed(base, a);
    ExprPtr c = canonical_form(a);
    canon.emplace(print_expr(c), c);
  }
  Theory t{std::move(base), {}};
  t.axioms.reserve(canon.size());
  for (auto& [text, e] : canon) t.axioms.push_back(e);
  return t;
}

Theory empty_theory(Language base) { return Theory{std::move(base), {}}; }

std::vector<std::string> axiom_texts(const Theory& t) {
  std::vector<std::string> out;
  out.reserve(t.axioms.size());
  for (const auto& a : t.axioms) out.push_back(print_expr(a));
  return out;
}

}  // namespace theoria
