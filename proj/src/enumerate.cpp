#include "theoria/enumerate.hpp"

#include <map>
#include <string>

#include "theoria/error.hpp"

namespace theoria {

namespace {

struct Enumerator {
  const Language& lang;
  int max_vars;
  std::size_t cap;
  std::size_t produced = 0;
  // Context = sorts of variables x1..xk currently in scope.
  std::map<std::string, std::vector<ExprPtr>> memo;  // key: depth|sorts

  std::string key(int depth, const std::vector<std::string>& ctx) const {
    std::string k = std::to_string(depth);
    for (const auto& s : ctx) k += "|" + s;
    return k;
  }

  void bump() {
    if (++produced > cap)
      throw ResourceLimit("expression enumeration exceeded cap of " +
                          std::to_string(cap));
  }

  // Expressions of nesting depth <= depth whose free variables are drawn
  // from ctx (variable xi has sort ctx[i-1]).
  const std::vector<ExprPtr>& gen(int depth,
                                  const std::vector<std::string>& ctx) {
    std::string k = key(depth, ctx);
    auto it = memo.find(k);
    if (it != memo.end()) return it->second;

    std::map<std::string, ExprPtr> out;
    auto add = [&](const ExprPtr& e) {
      if (out.emplace(print_expr(e), e).second) bump();
    };

    add(mk_true());
    add(mk_false());
    for (const auto& [r, ar] : lang.relations) {
      // All argument tuples over context variables of matching sorts.
      std::vector<std::vector<std::string>> cands(ar.size());
      bool ok = true;
      for (size_t i = 0; i < ar.size() && ok; ++i) {
        for (size_t j = 0; j < ctx.size(); ++j)
          if (ctx[j] == ar[i]) cands[i].push_back("x" + std::to_string(j + 1));
        if (cands[i].empty()) ok = false;
      }
      if (!ok) continue;
      std::vector<size_t> idx(ar.size(), 0);
      while (true) {
        std::vector<std::string> args;
        for (size_t i = 0; i < idx.size(); ++i) args.push_back(cands[i][idx[i]]);
        add(mk_atom(r, std::move(args)));
        size_t i = 0;
        for (; i < idx.size(); ++i) {
          if (++idx[i] < cands[i].size()) break;
          idx[i] = 0;
        }
        if (i == idx.size()) break;
      }
    }

    if (depth > 0) {
      const auto& sub = gen(depth - 1, ctx);
      for (const auto& e : sub) add(mk_not(e));
      for (Conn c : {Conn::And, Conn::Or, Conn::Implies, Conn::Iff})
        for (const auto& l : sub)
          for (const auto& r : sub) add(mk_binary(c, l, r));
      if (static_cast<int>(ctx.size()) < max_vars) {
        for (const auto& s : lang.sorts) {
          std::vector<std::string> ctx2 = ctx;
          ctx2.push_back(s);
          std::string var = "x" + std::to_string(ctx2.size());
          const auto& bodies = gen(depth - 1, ctx2);
          for (const auto& b : bodies) {
            add(mk_quant(Conn::Forall, {{var, s}}, b));
            add(mk_quant(Conn::Exists, {{var, s}}, b));
          }
        }
      }
    }

    std::vector<ExprPtr> res;
    res.reserve(out.size());
    for (auto& [text, e] : out) res.push_back(e);
    return memo.emplace(std::move(k), std::move(res)).first->second;
  }
};

}  // namespace

std::vector<ExprPtr> enumerate_expressions(const Language& lang, int max_depth,
                                           int max_vars, std::size_t cap) {
  if (max_depth < 0) throw Error("enumerate_expressions: max_depth < 0");
  Enumerator en{lang, max_vars, cap};
  std::vector<std::string> ctx;
  const auto& open = en.gen(max_depth, ctx);
  // Closed context: everything is closed already; canonicalize for the
  // v1,v2,... naming and dedup up to alpha.
  std::map<std::string, ExprPtr> out;
  for (const auto& e : open) {
    ExprPtr c = canonical_form(e);
    out.emplace(print_expr(c), c);
  }
  std::vector<ExprPtr> res;
  res.reserve(out.size());
  for (auto& [text, e] : out) res.push_back(e);
  return res;
}

}  // namespace theoria
