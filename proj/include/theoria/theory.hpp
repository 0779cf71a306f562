#pragma once

#include <vector>

#include "theoria/expr.hpp"
#include "theoria/language.hpp"

namespace theoria {

// A finite presentation: base language plus a canonical, deduplicated,
// lexicographically ordered set of closed axioms.
struct Theory {
  Language base;
  std::vector<ExprPtr> axioms;  // canonical form, sorted by printed text

  bool operator==(const Theory& o) const;
};

// Canonicalizes, checks well-formedness of every axiom, sorts and dedups.
Theory make_theory(Language base, std::vector<ExprPtr> axioms);

Theory empty_theory(Language base);

std::vector<std::string> axiom_texts(const Theory& t);

}  // namespace theoria
