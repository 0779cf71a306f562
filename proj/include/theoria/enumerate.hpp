#pragma once

#include <cstddef>
#include <vector>

#include "theoria/expr.hpp"
#include "theoria/language.hpp"

namespace theoria {

// All closed well-formed expressions over `lang` with connective nesting
// depth <= max_depth and at most max_vars bound variables, deduplicated up
// to alpha-equivalence and ordered by canonical text. Quantifiers are
// enumerated with single-binder lists. Throws ResourceLimit past `cap`.
std::vector<ExprPtr> enumerate_expressions(const Language& lang, int max_depth,
                                           int max_vars,
                                           std::size_t cap = 2'000'000);

}  // namespace theoria
