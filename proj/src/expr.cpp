#include "theoria/expr.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "theoria/error.hpp"

namespace theoria {

bool is_quantifier(Conn k) { return k == Conn::Forall || k == Conn::Exists; }

bool is_binary(Conn k) {
  return k == Conn::And || k == Conn::Or || k == Conn::Implies ||
         k == Conn::Iff;
}

ExprPtr mk_true() {
  static const ExprPtr t = std::make_shared<Expr>(Expr{Conn::True, {}, {}, {}, {}});
  return t;
}

ExprPtr mk_false() {
  static const ExprPtr f =
      std::make_shared<Expr>(Expr{Conn::False, {}, {}, {}, {}});
  return f;
}

ExprPtr mk_atom(std::string rel, std::vector<std::string> vars) {
  return std::make_shared<Expr>(
      Expr{Conn::Atom, std::move(rel), std::move(vars), {}, {}});
}

ExprPtr mk_not(ExprPtr e) {
  return std::make_shared<Expr>(
      Expr{Conn::Not, {}, {}, {std::move(e)}, {}});
}

ExprPtr mk_binary(Conn kind, ExprPtr lhs, ExprPtr rhs) {
  if (!is_binary(kind)) throw Error("mk_binary: not a binary connective");
  return std::make_shared<Expr>(
      Expr{kind, {}, {}, {std::move(lhs), std::move(rhs)}, {}});
}

ExprPtr mk_quant(Conn kind,
                 std::vector<std::pair<std::string, std::string>> binders,
                 ExprPtr body) {
  if (!is_quantifier(kind)) throw Error("mk_quant: not a quantifier");
  if (binders.empty()) throw Error("quantifier needs at least one binder");
  return std::make_shared<Expr>(
      Expr{kind, {}, {}, {std::move(body)}, std::move(binders)});
}

static const char* conn_name(Conn k) {
  switch (k) {
    case Conn::Not: return "not";
    case Conn::And: return "and";
    case Conn::Or: return "or";
    case Conn::Implies: return "implies";
    case Conn::Iff: return "iff";
    case Conn::Forall: return "forall";
    case Conn::Exists: return "exists";
    default: return "?";
  }
}

static void print_rec(std::ostream& os, const ExprPtr& e) {
  switch (e->kind) {
    case Conn::True: os << "true"; return;
    case Conn::False: os << "false"; return;
    case Conn::Atom:
      os << '(' << e->rel;
      for (const auto& v : e->vars) os << ' ' << v;
      os << ')';
      return;
    case Conn::Not:
      os << "(not ";
      print_rec(os, e->kids[0]);
      os << ')';
      return;
    case Conn::Forall:
    case Conn::Exists: {
      os << '(' << conn_name(e->kind) << " (";
      bool first = true;
      for (const auto& [v, s] : e->binders) {
        if (!first) os << ' ';
        first = false;
        os << '(' << v << ' ' << s << ')';
      }
      os << ") ";
      print_rec(os, e->kids[0]);
      os << ')';
      return;
    }
    default:
      os << '(' << conn_name(e->kind) << ' ';
      print_rec(os, e->kids[0]);
      os << ' ';
      print_rec(os, e->kids[1]);
      os << ')';
      return;
  }
}

std::string print_expr(const ExprPtr& e) {
  std::ostringstream os;
  print_rec(os, e);
  return os.str();
}

namespace {

// Scoped variable renaming environment: a stack of (old, new) pairs so that
// shadowing resolves to the innermost binder.
struct RenameEnv {
  std::vector<std::pair<std::string, std::string>> stack;
  const std::string* lookup(const std::string& v) const {
    for (auto it = stack.rbegin(); it != stack.rend(); ++it)
      if (it->first == v) return &it->second;
    return nullptr;
  }
};

ExprPtr canon_rec(const ExprPtr& e, RenameEnv& env, int& counter) {
  switch (e->kind) {
    case Conn::True:
    case Conn::False:
      return e;
    case Conn::Atom: {
      std::vector<std::string> vars;
      vars.reserve(e->vars.size());
      for (const auto& v : e->vars) {
        const std::string* nv = env.lookup(v);
        vars.push_back(nv ? *nv : v);
      }
      return mk_atom(e->rel, std::move(vars));
    }
    case Conn::Not:
      return mk_not(canon_rec(e->kids[0], env, counter));
    case Conn::Forall:
    case Conn::Exists: {
      std::vector<std::pair<std::string, std::string>> binders;
      size_t pushed = 0;
      for (const auto& [v, s] : e->binders) {
        std::string nv = "v" + std::to_string(++counter);
        binders.emplace_back(nv, s);
        env.stack.emplace_back(v, nv);
        ++pushed;
      }
      ExprPtr body = canon_rec(e->kids[0], env, counter);
      env.stack.resize(env.stack.size() - pushed);
      return mk_quant(e->kind, std::move(binders), std::move(body));
    }
    default:
      return mk_binary(e->kind, canon_rec(e->kids[0], env, counter),
                       canon_rec(e->kids[1], env, counter));
  }
}

}  // namespace

ExprPtr canonical_form(const ExprPtr& e) {
  RenameEnv env;
  int counter = 0;
  return canon_rec(e, env, counter);
}

bool alpha_equal(const ExprPtr& a, const ExprPtr& b) {
  return print_expr(canonical_form(a)) == print_expr(canonical_form(b));
}

namespace {

void wf_rec(const Language& lang, const ExprPtr& e,
            std::vector<std::pair<std::string, std::string>>& scope) {
  switch (e->kind) {
    case Conn::True:
    case Conn::False:
      return;
    case Conn::Atom: {
      const auto* ar = lang.arity(e->rel);
      if (!ar) throw Error("unknown relation '" + e->rel + "'");
      if (ar->size() != e->vars.size())
        throw Error("arity mismatch: relation '" + e->rel + "' expects " +
                    std::to_string(ar->size()) + " arguments, got " +
                    std::to_string(e->vars.size()));
      for (size_t i = 0; i < e->vars.size(); ++i) {
        const std::string* sort = nullptr;
        for (auto it = scope.rbegin(); it != scope.rend(); ++it)
          if (it->first == e->vars[i]) {
            sort = &it->second;
            break;
          }
        if (!sort) throw Error("free variable '" + e->vars[i] + "'");
        if (*sort != (*ar)[i])
          throw Error("sort mismatch: variable '" + e->vars[i] + "' has sort '" +
                      *sort + "' but position " + std::to_string(i + 1) +
                      " of '" + e->rel + "' requires '" + (*ar)[i] + "'");
      }
      return;
    }
    case Conn::Not:
      wf_rec(lang, e->kids[0], scope);
      return;
    case Conn::Forall:
    case Conn::Exists: {
      size_t pushed = 0;
      for (const auto& [v, s] : e->binders) {
        if (!lang.has_sort(s))
          throw Error("unresolved sort '" + s + "' in binder");
        scope.emplace_back(v, s);
        ++pushed;
      }
      wf_rec(lang, e->kids[0], scope);
      scope.resize(scope.size() - pushed);
      return;
    }
    default:
      wf_rec(lang, e->kids[0], scope);
      wf_rec(lang, e->kids[1], scope);
      return;
  }
}

void free_rec(const ExprPtr& e, std::vector<std::string>& bound,
              std::vector<std::string>& out) {
  switch (e->kind) {
    case Conn::True:
    case Conn::False:
      return;
    case Conn::Atom:
      for (const auto& v : e->vars)
        if (std::find(bound.begin(), bound.end(), v) == bound.end() &&
            std::find(out.begin(), out.end(), v) == out.end())
          out.push_back(v);
      return;
    case Conn::Not:
      free_rec(e->kids[0], bound, out);
      return;
    case Conn::Forall:
    case Conn::Exists: {
      size_t pushed = 0;
      for (const auto& [v, s] : e->binders) {
        bound.push_back(v);
        ++pushed;
      }
      free_rec(e->kids[0], bound, out);
      bound.resize(bound.size() - pushed);
      return;
    }
    default:
      free_rec(e->kids[0], bound, out);
      free_rec(e->kids[1], bound, out);
      return;
  }
}

}  // namespace

void check_well_formed(const Language& lang, const ExprPtr& e) {
  std::vector<std::pair<std::string, std::string>> scope;
  wf_rec(lang, e, scope);
}

bool well_formed(const Language& lang, const ExprPtr& e) {
  try {
    check_well_formed(lang, e);
    return true;
  } catch (const Error&) {
    return false;
  }
}

std::vector<std::string> free_vars(const ExprPtr& e) {
  std::vector<std::string> bound, out;
  free_rec(e, bound, out);
  return out;
}

}  // namespace theoria
