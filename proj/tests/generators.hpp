#pragma once

// Seeded random construction of languages, expressions, theories, morphisms
// and diagrams for the property suites. All draws go through std::mt19937 so
// every run of a test sees the same inputs.

#include <random>
#include <string>
#include <vector>

#include "theoria/diagram.hpp"
#include "theoria/lattice.hpp"
#include "theoria/theory.hpp"

namespace theoria::testing {

struct Gen {
  std::mt19937 eng;

  explicit Gen(unsigned seed) : eng(seed) {}

  int below(int n) { return std::uniform_int_distribution<int>(0, n - 1)(eng); }
  bool coin(double p = 0.5) {
    return std::uniform_real_distribution<double>(0, 1)(eng) < p;
  }
  template <typename T>
  const T& pick(const std::vector<T>& xs) {
    return xs[static_cast<size_t>(below(static_cast<int>(xs.size())))];
  }
};

inline Language random_language(Gen& g, int max_sorts = 3, int max_rels = 3,
                                int max_arity = 2) {
  int nsorts = 1 + g.below(max_sorts);
  std::vector<std::string> sorts;
  for (int i = 0; i < nsorts; ++i) sorts.push_back("s" + std::to_string(i));
  std::map<std::string, std::vector<std::string>> rels;
  int nrels = g.below(max_rels + 1);
  for (int i = 0; i < nrels; ++i) {
    std::vector<std::string> arity;
    int k = 1 + g.below(max_arity);
    for (int j = 0; j < k; ++j) arity.push_back(g.pick(sorts));
    rels["r" + std::to_string(i)] = std::move(arity);
  }
  return make_language(std::move(sorts), std::move(rels));
}

// Closed expression of connective depth <= depth. `ctx` carries the bound
// variables in scope as (name, sort) pairs.
inline ExprPtr random_expr_rec(
    Gen& g, const Language& lang, int depth,
    std::vector<std::pair<std::string, std::string>>& ctx) {
  // Atoms need a relation whose arity sorts all appear in the context.
  std::vector<std::string> usable;
  for (const auto& [r, ar] : lang.relations) {
    bool ok = true;
    for (const auto& s : ar) {
      bool found = false;
      for (const auto& [v, vs] : ctx) found = found || vs == s;
      ok = ok && found;
    }
    if (ok) usable.push_back(r);
  }
  int kind = g.below(depth == 0 ? (usable.empty() ? 2 : 3) : 10);
  if (kind == 0) return mk_true();
  if (kind == 1) return mk_false();
  if (kind == 2 && !usable.empty()) {
    const std::string& r = usable[g.below(static_cast<int>(usable.size()))];
    std::vector<std::string> args;
    for (const auto& s : *lang.arity(r)) {
      std::vector<std::string> cands;
      for (const auto& [v, vs] : ctx)
        if (vs == s) cands.push_back(v);
      args.push_back(g.pick(cands));
    }
    return mk_atom(r, std::move(args));
  }
  if (depth == 0) return g.coin() ? mk_true() : mk_false();
  if (kind <= 3) return mk_not(random_expr_rec(g, lang, depth - 1, ctx));
  if (kind <= 7) {
    Conn c = kind == 4   ? Conn::And
             : kind == 5 ? Conn::Or
             : kind == 6 ? Conn::Implies
                         : Conn::Iff;
    ExprPtr a = random_expr_rec(g, lang, depth - 1, ctx);
    ExprPtr b = random_expr_rec(g, lang, depth - 1, ctx);
    return mk_binary(c, std::move(a), std::move(b));
  }
  std::string var = "x" + std::to_string(ctx.size() + 1);
  std::string sort = g.pick(lang.sorts);
  ctx.emplace_back(var, sort);
  ExprPtr body = random_expr_rec(g, lang, depth - 1, ctx);
  ctx.pop_back();
  return mk_quant(kind == 8 ? Conn::Forall : Conn::Exists, {{var, sort}},
                  std::move(body));
}

inline ExprPtr random_closed_expr(Gen& g, const Language& lang, int depth = 2) {
  std::vector<std::pair<std::string, std::string>> ctx;
  return random_expr_rec(g, lang, depth, ctx);
}

inline Theory random_theory(Gen& g, const Language& lang, int max_axioms = 3,
                            int depth = 2) {
  std::vector<ExprPtr> axioms;
  int n = g.below(max_axioms + 1);
  for (int i = 0; i < n; ++i)
    axioms.push_back(random_closed_expr(g, lang, depth));
  return make_theory(lang, std::move(axioms));
}

// Morphism out of `src` into a freshly built target: target symbols are
// created (or reused when arities fit) as needed, so the map is always total
// and arity-preserving.
inline LanguageMorphism random_morphism_from(Gen& g, const Language& src) {
  std::vector<std::string> tsorts;
  std::map<std::string, std::vector<std::string>> trels;
  LanguageMorphism f{src, Language{}, {}, {}};
  for (const auto& s : src.sorts) {
    if (!tsorts.empty() && g.coin(0.4)) {
      f.sort_map[s] = g.pick(tsorts);
    } else {
      std::string t = "t" + std::to_string(tsorts.size());
      tsorts.push_back(t);
      f.sort_map[s] = t;
    }
  }
  for (const auto& [r, ar] : src.relations) {
    std::vector<std::string> mapped;
    for (const auto& s : ar) mapped.push_back(f.sort_map.at(s));
    std::vector<std::string> reusable;
    for (const auto& [q, qa] : trels)
      if (qa == mapped) reusable.push_back(q);
    if (!reusable.empty() && g.coin(0.4)) {
      f.rel_map[r] = g.pick(reusable);
    } else {
      std::string q = "q" + std::to_string(trels.size());
      trels[q] = mapped;
      f.rel_map[r] = q;
    }
  }
  f.target = make_language(std::move(tsorts), std::move(trels));
  f.validate();
  return f;
}

// Morphism between two given endpoints. The destination language is grown
// in place when no relation with the required mapped arity exists, so calls
// must happen before `dst` is read anywhere else.
inline LanguageMorphism random_morphism_into(Gen& g, const Language& src,
                                             Language& dst) {
  LanguageMorphism f{src, dst, {}, {}};
  for (const auto& s : src.sorts) f.sort_map[s] = g.pick(dst.sorts);
  int fresh = 0;
  for (const auto& [r, ar] : src.relations) {
    std::vector<std::string> mapped;
    for (const auto& s : ar) mapped.push_back(f.sort_map.at(s));
    std::vector<std::string> cands;
    for (const auto& [q, qa] : dst.relations)
      if (qa == mapped) cands.push_back(q);
    if (cands.empty()) {
      std::string q;
      do {
        q = "p" + std::to_string(fresh++);
      } while (dst.has_relation(q));
      dst.relations[q] = mapped;
      cands.push_back(q);
    }
    f.rel_map[r] = g.pick(cands);
  }
  f.target = dst;
  f.validate();
  return f;
}

// Diagram with <= max_nodes nodes and <= max_edges edges; edges run from a
// lower-numbered node to a higher-numbered one so that growing a target
// language never invalidates an already-built edge morphism.
inline TheoryDiagram random_diagram(Gen& g, int max_nodes = 4,
                                    int max_edges = 4) {
  int nnodes = 1 + g.below(max_nodes);
  TheoryDiagram d;
  std::vector<Language> langs;
  for (int i = 0; i < nnodes; ++i) {
    d.shape.nodes.push_back("n" + std::to_string(i));
    langs.push_back(random_language(g));
  }
  int nedges = nnodes < 2 ? 0 : g.below(max_edges + 1);
  struct Pending {
    std::string name;
    int src, dst;
  };
  std::vector<Pending> pend;
  for (int i = 0; i < nedges; ++i) {
    int a = g.below(nnodes), b = g.below(nnodes);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    pend.push_back({"e" + std::to_string(i), a, b});
  }
  // Group by destination so each language is final before it is used as a
  // source.
  std::sort(pend.begin(), pend.end(),
            [](const Pending& x, const Pending& y) { return x.dst < y.dst; });
  std::vector<LanguageMorphism> maps;
  for (const auto& p : pend)
    maps.push_back(random_morphism_into(g, langs[p.src], langs[p.dst]));
  for (size_t i = 0; i < pend.size(); ++i) {
    // Re-read the endpoints: langs[dst] may have grown after the morphism
    // was built, but only by fresh relations, so totality still holds.
    maps[i].source = langs[pend[i].src];
    maps[i].target = langs[pend[i].dst];
    d.shape.edges.push_back(
        {pend[i].name, "n" + std::to_string(pend[i].src),
         "n" + std::to_string(pend[i].dst)});
    d.edge_maps[pend[i].name] = maps[i];
  }
  for (int i = 0; i < nnodes; ++i)
    d.node_theories["n" + std::to_string(i)] = random_theory(g, langs[i]);
  d.validate();
  return d;
}

// Span whose feet contain the translated apex axioms, i.e. whose edges are
// honest theory morphisms by construction.
inline TheoryDiagram random_span(Gen& g) {
  Language apex_lang = random_language(g, 2, 2);
  Theory apex = random_theory(g, apex_lang, 2);
  TheoryDiagram d;
  d.shape.nodes = {"c", "a", "b"};
  for (const auto* foot : {"a", "b"}) {
    LanguageMorphism f = random_morphism_from(g, apex_lang);
    std::vector<ExprPtr> axioms = dir_exists(f, apex).axioms;
    int extra = g.below(3);
    for (int i = 0; i < extra; ++i)
      axioms.push_back(random_closed_expr(g, f.target));
    d.node_theories[foot] = make_theory(f.target, std::move(axioms));
    d.shape.edges.push_back({std::string("to-") + foot, "c", foot});
    d.edge_maps[std::string("to-") + foot] = std::move(f);
  }
  d.node_theories["c"] = apex;
  d.validate();
  return d;
}

}  // namespace theoria::testing
