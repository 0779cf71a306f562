#include "theoria/morphism.hpp"

#include <algorithm>
#include <functional>

#include "theoria/error.hpp"

namespace theoria {

void LanguageMorphism::validate() const {
  source.validate();
  target.validate();
  for (const auto& s : source.sorts) {
    auto it = sort_map.find(s);
    if (it == sort_map.end())
      throw Error("morphism not total: sort '" + s + "' unmapped");
    if (!target.has_sort(it->second))
      throw Error("morphism maps sort '" + s + "' to undeclared '" +
                  it->second + "'");
  }
  for (const auto& [s, img] : sort_map)
    if (!source.has_sort(s))
      throw Error("morphism maps undeclared sort '" + s + "'");
  for (const auto& [r, ar] : source.relations) {
    auto it = rel_map.find(r);
    if (it == rel_map.end())
      throw Error("morphism not total: relation '" + r + "' unmapped");
    const auto* tar = target.arity(it->second);
    if (!tar)
      throw Error("morphism maps relation '" + r + "' to undeclared '" +
                  it->second + "'");
    if (tar->size() != ar.size())
      throw Error("arity mismatch mapping relation '" + r + "' to '" +
                  it->second + "'");
    for (size_t i = 0; i < ar.size(); ++i)
      if (sort_map.at(ar[i]) != (*tar)[i])
        throw Error("arity not preserved mapping relation '" + r + "' to '" +
                    it->second + "' at position " + std::to_string(i + 1));
  }
  for (const auto& [r, img] : rel_map)
    if (!source.has_relation(r))
      throw Error("morphism maps undeclared relation '" + r + "'");
}

LanguageMorphism identity_morphism(const Language& lang) {
  LanguageMorphism m{lang, lang, {}, {}};
  for (const auto& s : lang.sorts) m.sort_map[s] = s;
  for (const auto& [r, ar] : lang.relations) m.rel_map[r] = r;
  return m;
}

LanguageMorphism compose(const LanguageMorphism& f, const LanguageMorphism& g) {
  if (!(f.target == g.source))
    throw Error("compose: endpoint mismatch, target(f) != source(g)");
  LanguageMorphism m{f.source, g.target, {}, {}};
  for (const auto& [s, img] : f.sort_map) m.sort_map[s] = g.sort_map.at(img);
  for (const auto& [r, img] : f.rel_map) m.rel_map[r] = g.rel_map.at(img);
  return m;
}

namespace {

ExprPtr map_rec(const LanguageMorphism& f, const ExprPtr& e) {
  switch (e->kind) {
    case Conn::True:
    case Conn::False:
      return e;
    case Conn::Atom:
      return mk_atom(f.rel_map.at(e->rel), e->vars);
    case Conn::Not:
      return mk_not(map_rec(f, e->kids[0]));
    case Conn::Forall:
    case Conn::Exists: {
      std::vector<std::pair<std::string, std::string>> binders;
      binders.reserve(e->binders.size());
      for (const auto& [v, s] : e->binders)
        binders.emplace_back(v, f.sort_map.at(s));
      return mk_quant(e->kind, std::move(binders), map_rec(f, e->kids[0]));
    }
    default:
      return mk_binary(e->kind, map_rec(f, e->kids[0]),
                       map_rec(f, e->kids[1]));
  }
}

// Enumerates all substitutions of source symbols into the fixed AST shape.
void preimage_rec(const LanguageMorphism& f,
                  const std::map<std::string, std::vector<std::string>>& sort_pre,
                  const std::map<std::string, std::vector<std::string>>& rel_pre,
                  const ExprPtr& e,
                  std::function<void(const ExprPtr&)> emit) {
  switch (e->kind) {
    case Conn::True:
    case Conn::False:
      emit(e);
      return;
    case Conn::Atom: {
      auto it = rel_pre.find(e->rel);
      if (it == rel_pre.end()) return;
      for (const auto& r : it->second) emit(mk_atom(r, e->vars));
      return;
    }
    case Conn::Not:
      preimage_rec(f, sort_pre, rel_pre, e->kids[0],
                   [&](const ExprPtr& k) { emit(mk_not(k)); });
      return;
    case Conn::Forall:
    case Conn::Exists: {
      // Product of sort choices per binder.
      std::vector<std::vector<std::string>> choices;
      for (const auto& [v, s] : e->binders) {
        auto it = sort_pre.find(s);
        if (it == sort_pre.end()) return;
        choices.push_back(it->second);
      }
      std::vector<size_t> idx(choices.size(), 0);
      while (true) {
        std::vector<std::pair<std::string, std::string>> binders;
        for (size_t i = 0; i < choices.size(); ++i)
          binders.emplace_back(e->binders[i].first, choices[i][idx[i]]);
        preimage_rec(f, sort_pre, rel_pre, e->kids[0],
                     [&](const ExprPtr& body) {
                       emit(mk_quant(e->kind, binders, body));
                     });
        size_t i = 0;
        for (; i < idx.size(); ++i) {
          if (++idx[i] < choices[i].size()) break;
          idx[i] = 0;
        }
        if (i == idx.size()) break;
      }
      return;
    }
    default:
      preimage_rec(f, sort_pre, rel_pre, e->kids[0], [&](const ExprPtr& l) {
        preimage_rec(f, sort_pre, rel_pre, e->kids[1],
                     [&](const ExprPtr& r) { emit(mk_binary(e->kind, l, r)); });
      });
      return;
  }
}

}  // namespace

ExprPtr expr_map(const LanguageMorphism& f, const ExprPtr& e) {
  return canonical_form(map_rec(f, e));
}

std::vector<ExprPtr> expr_preimage(const LanguageMorphism& f,
                                   const ExprPtr& e2) {
  std::map<std::string, std::vector<std::string>> sort_pre, rel_pre;
  for (const auto& [s, img] : f.sort_map) sort_pre[img].push_back(s);
  for (const auto& [r, img] : f.rel_map) rel_pre[img].push_back(r);

  std::map<std::string, ExprPtr> out;
  preimage_rec(f, sort_pre, rel_pre, e2, [&](const ExprPtr& cand) {
    if (!well_formed(f.source, cand)) return;
    ExprPtr c = canonical_form(cand);
    out.emplace(print_expr(c), c);
  });
  std::vector<ExprPtr> res;
  res.reserve(out.size());
  for (auto& [text, e] : out) res.push_back(e);
  return res;
}

namespace {

struct UnionFind {
  std::map<std::string, std::string> parent;
  void add(const std::string& x) { parent.emplace(x, x); }
  std::string find(const std::string& x) {
    std::string r = x;
    while (parent.at(r) != r) r = parent.at(r);
    return r;
  }
  // Keeps the lexicographically least element as representative.
  void unite(const std::string& a, const std::string& b) {
    std::string ra = find(a), rb = find(b);
    if (ra == rb) return;
    if (rb < ra) std::swap(ra, rb);
    parent[rb] = ra;
  }
};

SymbolPartition partition_of(const Language& lang,
                             const std::set<std::pair<std::string, std::string>>& sp,
                             const std::set<std::pair<std::string, std::string>>& rp) {
  UnionFind sorts, rels;
  for (const auto& s : lang.sorts) sorts.add(s);
  for (const auto& [r, ar] : lang.relations) rels.add(r);
  for (const auto& [a, b] : sp) sorts.unite(a, b);
  for (const auto& [a, b] : rp) rels.unite(a, b);

  SymbolPartition part;
  for (const auto& s : lang.sorts) {
    std::string rep = sorts.find(s);
    part.sort_rep[s] = rep;
    part.sort_classes[rep].push_back(s);
  }
  for (const auto& [r, ar] : lang.relations) {
    std::string rep = rels.find(r);
    part.rel_rep[r] = rep;
    part.rel_classes[rep].push_back(r);
  }
  return part;
}

void check_partition_arities(const Language& lang, const SymbolPartition& p) {
  for (const auto& [rep, members] : p.rel_classes) {
    const auto& first = *lang.arity(members.front());
    for (const auto& m : members) {
      const auto& ar = *lang.arity(m);
      if (ar.size() != first.size())
        throw Error("arity inconsistency: relations '" + members.front() +
                    "' and '" + m + "' related but have different ranks");
      for (size_t i = 0; i < ar.size(); ++i)
        if (p.sort_rep.at(ar[i]) != p.sort_rep.at(first[i]))
          throw Error("arity inconsistency: relations '" + members.front() +
                      "' and '" + m +
                      "' related but argument sorts are not related at "
                      "position " +
                      std::to_string(i + 1));
    }
  }
}

}  // namespace

void Endorelation::validate() const {
  language.validate();
  for (const auto& [a, b] : sort_pairs) {
    if (!language.has_sort(a) || !language.has_sort(b))
      throw Error("endorelation names undeclared sort '" +
                  (language.has_sort(a) ? b : a) + "'");
  }
  for (const auto& [a, b] : rel_pairs) {
    if (!language.has_relation(a) || !language.has_relation(b))
      throw Error("endorelation names undeclared relation '" +
                  (language.has_relation(a) ? b : a) + "'");
  }
  check_partition_arities(language,
                          partition_of(language, sort_pairs, rel_pairs));
}

Endorelation make_endorelation(
    Language lang, std::vector<std::pair<std::string, std::string>> sorts,
    std::vector<std::pair<std::string, std::string>> rels) {
  Endorelation r{std::move(lang), {}, {}};
  for (auto& [a, b] : sorts) {
    if (a == b) continue;
    r.sort_pairs.insert(a < b ? std::make_pair(a, b) : std::make_pair(b, a));
  }
  for (auto& [a, b] : rels) {
    if (a == b) continue;
    r.rel_pairs.insert(a < b ? std::make_pair(a, b) : std::make_pair(b, a));
  }
  r.validate();
  return r;
}

SymbolPartition closure(const Endorelation& r) {
  return partition_of(r.language, r.sort_pairs, r.rel_pairs);
}

Endorelation kernel(const LanguageMorphism& f) {
  std::vector<std::pair<std::string, std::string>> sp, rp;
  for (auto a = f.sort_map.begin(); a != f.sort_map.end(); ++a)
    for (auto b = std::next(a); b != f.sort_map.end(); ++b)
      if (a->second == b->second) sp.emplace_back(a->first, b->first);
  for (auto a = f.rel_map.begin(); a != f.rel_map.end(); ++a)
    for (auto b = std::next(a); b != f.rel_map.end(); ++b)
      if (a->second == b->second) rp.emplace_back(a->first, b->first);
  return make_endorelation(f.source, std::move(sp), std::move(rp));
}

std::pair<Language, LanguageMorphism> quotient_language(
    const Language& lang, const Endorelation& r) {
  if (!(r.language == lang))
    throw Error("quotient_language: endorelation based on a different language");
  SymbolPartition part = closure(r);
  check_partition_arities(lang, part);

  std::vector<std::string> qsorts;
  for (const auto& [rep, members] : part.sort_classes) qsorts.push_back(rep);
  std::map<std::string, std::vector<std::string>> qrels;
  for (const auto& [rep, members] : part.rel_classes) {
    const auto& ar = *lang.arity(members.front());
    std::vector<std::string> qar;
    qar.reserve(ar.size());
    for (const auto& s : ar) qar.push_back(part.sort_rep.at(s));
    qrels[rep] = std::move(qar);
  }
  Language q = make_language(std::move(qsorts), std::move(qrels));
  LanguageMorphism epi{lang, q, part.sort_rep, part.rel_rep};
  epi.validate();
  return {std::move(q), std::move(epi)};
}

}  // namespace theoria
