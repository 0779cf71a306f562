#include "theoria/structure.hpp"

#include <sstream>

#include "theoria/error.hpp"

namespace theoria {

void FiniteStructure::validate() const {
  lang.validate();
  for (const auto& s : lang.sorts) {
    auto it = universe.find(s);
    if (it == universe.end() || it->second < 1)
      throw Error("structure: empty or missing universe for sort '" + s + "'");
  }
  for (const auto& [r, ext] : extensions) {
    const auto* ar = lang.arity(r);
    if (!ar) throw Error("structure: extension for undeclared relation '" + r + "'");
    for (const auto& tup : ext) {
      if (tup.size() != ar->size())
        throw Error("structure: tuple rank mismatch for relation '" + r + "'");
      for (size_t i = 0; i < tup.size(); ++i)
        if (tup[i] < 0 || tup[i] >= universe.at((*ar)[i]))
          throw Error("structure: tuple element out of range for '" + r + "'");
    }
  }
}

namespace {

bool eval_rec(const FiniteStructure& m, const ExprPtr& e,
              std::vector<std::pair<std::string, int>>& env) {
  switch (e->kind) {
    case Conn::True:
      return true;
    case Conn::False:
      return false;
    case Conn::Atom: {
      std::vector<int> tup;
      tup.reserve(e->vars.size());
      for (const auto& v : e->vars) {
        int val = -1;
        for (auto it = env.rbegin(); it != env.rend(); ++it)
          if (it->first == v) {
            val = it->second;
            break;
          }
        if (val < 0) throw Error("evaluate: free variable '" + v + "'");
        tup.push_back(val);
      }
      auto it = m.extensions.find(e->rel);
      return it != m.extensions.end() && it->second.count(tup) != 0;
    }
    case Conn::Not:
      return !eval_rec(m, e->kids[0], env);
    case Conn::And:
      return eval_rec(m, e->kids[0], env) && eval_rec(m, e->kids[1], env);
    case Conn::Or:
      return eval_rec(m, e->kids[0], env) || eval_rec(m, e->kids[1], env);
    case Conn::Implies:
      return !eval_rec(m, e->kids[0], env) || eval_rec(m, e->kids[1], env);
    case Conn::Iff:
      return eval_rec(m, e->kids[0], env) == eval_rec(m, e->kids[1], env);
    case Conn::Forall:
    case Conn::Exists: {
      bool is_all = e->kind == Conn::Forall;
      // Iterate the product of binder universes.
      std::vector<int> sizes;
      for (const auto& [v, s] : e->binders) {
        auto it = m.universe.find(s);
        if (it == m.universe.end())
          throw Error("evaluate: sort '" + s + "' not in structure");
        sizes.push_back(it->second);
      }
      std::vector<int> idx(sizes.size(), 0);
      while (true) {
        size_t base = env.size();
        for (size_t i = 0; i < idx.size(); ++i)
          env.emplace_back(e->binders[i].first, idx[i]);
        bool v = eval_rec(m, e->kids[0], env);
        env.resize(base);
        if (is_all && !v) return false;
        if (!is_all && v) return true;
        size_t i = 0;
        for (; i < idx.size(); ++i) {
          if (++idx[i] < sizes[i]) break;
          idx[i] = 0;
        }
        if (i == idx.size()) break;
      }
      return is_all;
    }
  }
  throw Error("evaluate: unreachable");
}

}  // namespace

bool evaluate(const FiniteStructure& m, const ExprPtr& e) {
  check_well_formed(m.lang, e);
  std::vector<std::pair<std::string, int>> env;
  return eval_rec(m, e, env);
}

std::string print_structure(const FiniteStructure& m) {
  std::ostringstream os;
  os << "(structure";
  for (const auto& s : m.lang.sorts)
    os << " (universe " << s << " " << m.universe.at(s) << ")";
  for (const auto& [r, ar] : m.lang.relations) {
    os << " (extension " << r;
    auto it = m.extensions.find(r);
    if (it != m.extensions.end())
      for (const auto& tup : it->second) {
        os << " (";
        for (size_t i = 0; i < tup.size(); ++i)
          os << (i ? " " : "") << tup[i];
        os << ")";
      }
    os << ")";
  }
  os << ")";
  return os.str();
}

}  // namespace theoria
