#include "theoria/lattice.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include "theoria/enumerate.hpp"
#include "theoria/error.hpp"

namespace theoria {

namespace {

std::string language_text(const Language& lang) {
  std::ostringstream os;
  for (const auto& s : lang.sorts) os << s << ";";
  os << "/";
  for (const auto& [r, ar] : lang.relations) {
    os << r << "(";
    for (const auto& s : ar) os << s << ",";
    os << ");";
  }
  return os.str();
}

std::string theory_text(const Theory& t) {
  std::string s = language_text(t.base) + "|";
  for (const auto& a : t.axioms) s += print_expr(a) + ";";
  return s;
}

// Conservative aggregation: No dominates, then Unknown, else Yes.
Truth aggregate(const std::vector<Truth>& vs) {
  bool unknown = false;
  for (Truth v : vs) {
    if (v == Truth::No) return Truth::No;
    if (v == Truth::Unknown) unknown = true;
  }
  return unknown ? Truth::Unknown : Truth::Yes;
}

void require_same_base(const Theory& a, const Theory& b,
                       const std::string& op) {
  if (!(a.base == b.base)) throw Error(op + ": base language mismatch");
}

}  // namespace

Verdict entails_cached(const Theory& t, const ExprPtr& e, const Bounds& b) {
  // Theory texts are interned to small ids so cache keys stay short even for
  // theories with thousands of axioms; both caches are size-capped and the
  // verdict cache skips entries whose certificates would dominate memory (a
  // repeat query just reuses the session, which is cheap).
  static std::map<std::string, int> theory_ids;
  static std::map<std::string, Verdict> cache;
  static std::map<int, std::shared_ptr<EntailmentSession>> sessions;
  static std::mutex mu;
  std::string tkey = theory_text(t) + "#" + std::to_string(b.max_size) + "," +
                     std::to_string(b.term_depth);
  std::shared_ptr<EntailmentSession> session;
  std::string key;
  {
    std::lock_guard<std::mutex> lock(mu);
    int id = theory_ids
                 .try_emplace(std::move(tkey),
                              static_cast<int>(theory_ids.size()))
                 .first->second;
    key = std::to_string(id) + "#" + print_expr(canonical_form(e));
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    // Queries against one theory share an incremental session, so the
    // theory is Skolemized and ground only once per sweep.
    if (sessions.size() > 8) sessions.clear();
    auto& slot = sessions[id];
    if (!slot) slot = std::make_shared<EntailmentSession>(t, b);
    session = slot;
  }
  Verdict v = session->entails(e);
  std::lock_guard<std::mutex> lock(mu);
  if (cache.size() > 100000) cache.clear();
  if (!v.refutation || v.refutation->formulas.size() <= 256)
    cache.emplace(std::move(key), v);
  return v;
}

Verdict validate_theory_morphism(const LanguageMorphism& f, const Theory& t1,
                                 const Theory& t2, const Bounds& b) {
  if (!(t1.base == f.source) || !(t2.base == f.target))
    throw Error("validate_theory_morphism: endpoint mismatch");
  std::vector<Truth> parts;
  Verdict out;
  for (const auto& a : t1.axioms) {
    Verdict v = entails_cached(t2, expr_map(f, a), b);
    parts.push_back(v.value);
    if (v.value == Truth::No && !out.model) out.model = v.model;
  }
  out.value = aggregate(parts);
  if (out.value != Truth::No) out.model.reset();
  return out;
}

Theory dir_exists(const LanguageMorphism& f, const Theory& t1) {
  if (!(t1.base == f.source))
    throw Error("dir_exists: theory base does not match morphism source");
  std::vector<ExprPtr> axioms;
  axioms.reserve(t1.axioms.size());
  for (const auto& a : t1.axioms) axioms.push_back(expr_map(f, a));
  return make_theory(f.target, std::move(axioms));
}

Verdict inv_member(const LanguageMorphism& f, const Theory& t2,
                   const ExprPtr& e1, const Bounds& b) {
  if (!(t2.base == f.target))
    throw Error("inv_member: theory base does not match morphism target");
  check_well_formed(f.source, e1);
  return entails_cached(t2, expr_map(f, e1), b);
}

Theory inv_reify(const LanguageMorphism& f, const Theory& t2, int max_depth,
                 int max_vars, const Bounds& b) {
  std::vector<ExprPtr> axioms;
  for (const auto& e1 : enumerate_expressions(f.source, max_depth, max_vars))
    if (inv_member(f, t2, e1, b).value == Truth::Yes) axioms.push_back(e1);
  return make_theory(f.source, std::move(axioms));
}

Verdict dir_forall_member(const LanguageMorphism& f, const Theory& t1,
                          const ExprPtr& e2, const Bounds& b) {
  if (!(t1.base == f.source))
    throw Error("dir_forall_member: theory base does not match morphism source");
  check_well_formed(f.target, e2);
  std::vector<Truth> parts;
  Verdict out;
  for (const auto& e1 : expr_preimage(f, e2)) {
    Verdict v = entails_cached(t1, e1, b);
    parts.push_back(v.value);
    if (v.value == Truth::No && !out.model) out.model = v.model;
  }
  out.value = aggregate(parts);  // empty preimage -> vacuous Yes
  if (out.value != Truth::No) out.model.reset();
  return out;
}

Verdict clo_member(const LanguageMorphism& f, const Theory& t1,
                   const ExprPtr& e1, const Bounds& b) {
  check_well_formed(f.source, e1);
  return entails_cached(dir_exists(f, t1), expr_map(f, e1), b);
}

Verdict leq(const Theory& ta, const Theory& tb, const Bounds& b) {
  require_same_base(ta, tb, "leq");
  std::vector<Truth> parts;
  Verdict out;
  for (const auto& ax : tb.axioms) {
    Verdict v = entails_cached(ta, ax, b);
    parts.push_back(v.value);
    if (v.value == Truth::No && !out.model) out.model = v.model;
  }
  out.value = aggregate(parts);
  if (out.value != Truth::No) out.model.reset();
  return out;
}

Theory meet(const std::vector<Theory>& theories) {
  if (theories.empty()) throw Error("meet: empty theory list");
  std::vector<ExprPtr> axioms;
  for (const auto& t : theories) {
    require_same_base(theories.front(), t, "meet");
    axioms.insert(axioms.end(), t.axioms.begin(), t.axioms.end());
  }
  return make_theory(theories.front().base, std::move(axioms));
}

std::pair<Theory, std::vector<TheoryMorphism>> theory_sum(
    const std::vector<std::pair<std::string, Theory>>& parts) {
  if (parts.empty()) throw Error("theory_sum: empty list");
  {
    std::set<std::string> names;
    for (const auto& [n, t] : parts) {
      check_name(n, "summand");
      if (!names.insert(n).second)
        throw Error("theory_sum: duplicate name '" + n + "'");
    }
  }
  std::vector<std::string> sorts;
  std::map<std::string, std::vector<std::string>> rels;
  for (const auto& [n, t] : parts) {
    for (const auto& s : t.base.sorts) sorts.push_back(n + "$" + s);
    for (const auto& [r, ar] : t.base.relations) {
      std::vector<std::string> qar;
      for (const auto& s : ar) qar.push_back(n + "$" + s);
      rels[n + "$" + r] = std::move(qar);
    }
  }
  Language sum_lang = make_language(std::move(sorts), std::move(rels));

  std::vector<ExprPtr> axioms;
  std::vector<TheoryMorphism> injections;
  std::vector<LanguageMorphism> legs;
  for (const auto& [n, t] : parts) {
    LanguageMorphism inj{t.base, sum_lang, {}, {}};
    for (const auto& s : t.base.sorts) inj.sort_map[s] = n + "$" + s;
    for (const auto& [r, ar] : t.base.relations) inj.rel_map[r] = n + "$" + r;
    inj.validate();
    for (const auto& a : t.axioms) axioms.push_back(expr_map(inj, a));
    legs.push_back(std::move(inj));
  }
  Theory sum = make_theory(sum_lang, std::move(axioms));
  for (size_t i = 0; i < parts.size(); ++i)
    injections.push_back(
        TheoryMorphism{legs[i], parts[i].second, sum, Truth::Yes});
  return {std::move(sum), std::move(injections)};
}

std::pair<Theory, TheoryMorphism> quotient_theory(const Theory& t,
                                                  const Endorelation& r) {
  auto [qlang, epi] = quotient_language(t.base, r);
  Theory q = dir_exists(epi, t);
  TheoryMorphism m{epi, t, q, Truth::Yes};
  return {std::move(q), std::move(m)};
}

std::pair<Theory, TheoryMorphism> subtheory(
    const Theory& t, const std::vector<size_t>& indices) {
  std::vector<ExprPtr> axioms;
  for (size_t i : indices) {
    if (i >= t.axioms.size())
      throw Error("subtheory: axiom index " + std::to_string(i) +
                  " out of range (theory has " +
                  std::to_string(t.axioms.size()) + " axioms)");
    axioms.push_back(t.axioms[i]);
  }
  Theory sub = make_theory(t.base, std::move(axioms));
  TheoryMorphism inclusion{identity_morphism(t.base), sub, t, Truth::Yes};
  return {std::move(sub), std::move(inclusion)};
}

FiniteStructure reduct_structure(const LanguageMorphism& f,
                                 const FiniteStructure& target_model) {
  if (!(target_model.lang == f.target))
    throw Error("reduct_structure: structure language mismatch");
  FiniteStructure m{f.source, {}, {}};
  for (const auto& s : f.source.sorts)
    m.universe[s] = target_model.universe.at(f.sort_map.at(s));
  for (const auto& [r, ar] : f.source.relations) {
    auto it = target_model.extensions.find(f.rel_map.at(r));
    m.extensions[r] =
        it != target_model.extensions.end() ? it->second : std::set<std::vector<int>>{};
  }
  return m;
}

}  // namespace theoria
