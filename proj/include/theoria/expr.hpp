#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "theoria/language.hpp"

namespace theoria {

enum class Conn {
  True,
  False,
  Atom,
  Not,
  And,
  Or,
  Implies,
  Iff,
  Forall,
  Exists,
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Immutable formula AST. Atoms apply a relation symbol to variables only;
// there are no constants, functions or equality.
struct Expr {
  Conn kind;
  // Atom payload.
  std::string rel;
  std::vector<std::string> vars;
  // Not: 1 child; And/Or/Implies/Iff: 2; Forall/Exists: body in kids[0].
  std::vector<ExprPtr> kids;
  // Quantifier binders: (variable, sort) pairs.
  std::vector<std::pair<std::string, std::string>> binders;
};

ExprPtr mk_true();
ExprPtr mk_false();
ExprPtr mk_atom(std::string rel, std::vector<std::string> vars);
ExprPtr mk_not(ExprPtr e);
ExprPtr mk_binary(Conn kind, ExprPtr lhs, ExprPtr rhs);
ExprPtr mk_quant(Conn kind,
                 std::vector<std::pair<std::string, std::string>> binders,
                 ExprPtr body);

bool is_quantifier(Conn k);
bool is_binary(Conn k);

std::string print_expr(const ExprPtr& e);

// Renames bound variables to v1, v2, ... in depth-first binder order.
// Idempotent; free variables are left untouched.
ExprPtr canonical_form(const ExprPtr& e);

bool alpha_equal(const ExprPtr& a, const ExprPtr& b);

// Throws Error naming the first violation: unknown relation, arity mismatch,
// sort mismatch, or free variable.
void check_well_formed(const Language& lang, const ExprPtr& e);
bool well_formed(const Language& lang, const ExprPtr& e);

// Free variables in order of first occurrence.
std::vector<std::string> free_vars(const ExprPtr& e);

}  // namespace theoria
