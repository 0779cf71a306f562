#include "theoria/solver.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "theoria/error.hpp"

namespace theoria {

std::string to_string(Truth t) {
  switch (t) {
    case Truth::Yes: return "yes";
    case Truth::No: return "no";
    default: return "unknown";
  }
}

// ---------------------------------------------------------------------------
// Propositional layer
// ---------------------------------------------------------------------------

namespace {

constexpr std::size_t kGroundNodeCap = 50'000'000;
constexpr int kModelVarCap = 4096;

// Three-valued evaluation under a partial assignment (-1 unknown).
int eval3(const Prop& p, const std::vector<signed char>& a) {
  switch (p.k) {
    case Prop::K::True: return 1;
    case Prop::K::False: return 0;
    case Prop::K::Var: return a[p.var];
    case Prop::K::Not: {
      int v = eval3(p.kids[0], a);
      return v < 0 ? v : 1 - v;
    }
    case Prop::K::And: {
      bool unknown = false;
      for (const auto& k : p.kids) {
        int v = eval3(k, a);
        if (v == 0) return 0;
        if (v < 0) unknown = true;
      }
      return unknown ? -1 : 1;
    }
    case Prop::K::Or: {
      bool unknown = false;
      for (const auto& k : p.kids) {
        int v = eval3(k, a);
        if (v == 1) return 1;
        if (v < 0) unknown = true;
      }
      return unknown ? -1 : 0;
    }
  }
  return -1;
}

struct DfsPropSolver final : PropSolver {
  std::optional<std::vector<bool>> solve_least(
      int nvars, const std::vector<Prop>& formulas) override {
    std::vector<signed char> a(nvars, -1);
    std::vector<bool> out;
    if (rec(0, nvars, formulas, a, out)) return out;
    return std::nullopt;
  }

  static bool rec(int i, int nvars, const std::vector<Prop>& fs,
                  std::vector<signed char>& a, std::vector<bool>& out) {
    bool all_true = true;
    for (const auto& f : fs) {
      int v = eval3(f, a);
      if (v == 0) return false;
      if (v < 0) all_true = false;
    }
    if (all_true) {
      out.assign(a.begin(), a.end());
      for (int j = 0; j < nvars; ++j)
        if (a[j] < 0) out[j] = false;  // least completion
      return true;
    }
    if (i == nvars) return false;
    a[i] = 0;
    if (rec(i + 1, nvars, fs, a, out)) return true;
    a[i] = 1;
    if (rec(i + 1, nvars, fs, a, out)) return true;
    a[i] = -1;
    return false;
  }
};

// Constant folding, flattening and complementary-literal elimination keep
// ground formula sets small before they reach the solver.
Prop fold_not(Prop p);

Prop fold_nary(Prop::K k, std::vector<Prop> kids) {
  const bool is_and = k == Prop::K::And;
  std::vector<Prop> flat;
  for (auto& c : kids) {
    if (c.k == Prop::K::True) {
      if (is_and) continue;
      return Prop::mk_true();
    }
    if (c.k == Prop::K::False) {
      if (is_and) return Prop::mk_false();
      continue;
    }
    if (c.k == k) {
      for (auto& g : c.kids) flat.push_back(std::move(g));
    } else {
      flat.push_back(std::move(c));
    }
  }
  // Dedup literals; detect complementary pairs.
  std::set<int> pos, neg;
  std::vector<Prop> out;
  for (auto& c : flat) {
    if (c.k == Prop::K::Var) {
      if (neg.count(c.var)) return is_and ? Prop::mk_false() : Prop::mk_true();
      if (!pos.insert(c.var).second) continue;
    } else if (c.k == Prop::K::Not && c.kids[0].k == Prop::K::Var) {
      int v = c.kids[0].var;
      if (pos.count(v)) return is_and ? Prop::mk_false() : Prop::mk_true();
      if (!neg.insert(v).second) continue;
    }
    out.push_back(std::move(c));
  }
  if (out.empty()) return is_and ? Prop::mk_true() : Prop::mk_false();
  if (out.size() == 1) return std::move(out[0]);
  return Prop{k, -1, std::move(out)};
}

Prop fold_not(Prop p) {
  if (p.k == Prop::K::True) return Prop::mk_false();
  if (p.k == Prop::K::False) return Prop::mk_true();
  if (p.k == Prop::K::Not) return std::move(p.kids[0]);
  return Prop::mk_not(std::move(p));
}

std::size_t prop_size(const Prop& p) {
  std::size_t n = 1;
  for (const auto& k : p.kids) n += prop_size(k);
  return n;
}

std::string print_prop(const Prop& p, const std::vector<std::string>& atoms) {
  switch (p.k) {
    case Prop::K::True: return "true";
    case Prop::K::False: return "false";
    case Prop::K::Var: return atoms[p.var];
    case Prop::K::Not: return "(not " + print_prop(p.kids[0], atoms) + ")";
    case Prop::K::And:
    case Prop::K::Or: {
      std::string s = p.k == Prop::K::And ? "(and" : "(or";
      for (const auto& k : p.kids) s += " " + print_prop(k, atoms);
      return s + ")";
    }
  }
  return "?";
}

}  // namespace

PropSolver& default_prop_solver() {
  static DfsPropSolver solver;
  return solver;
}

bool recheck_refutation(const Refutation& r) {
  return !default_prop_solver()
              .solve_least(static_cast<int>(r.atoms.size()), r.formulas)
              .has_value();
}

std::string print_refutation(const Refutation& r) {
  std::ostringstream os;
  os << "(refutation";
  for (const auto& f : r.formulas) os << "\n  " << print_prop(f, r.atoms);
  os << ")";
  return os.str();
}

// ---------------------------------------------------------------------------
// Model search
// ---------------------------------------------------------------------------

namespace {

struct AtomTable {
  std::map<std::string, int> ids;
  std::vector<std::string> names;
  int get(const std::string& key) {
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    int id = static_cast<int>(names.size());
    ids.emplace(key, id);
    names.push_back(key);
    return id;
  }
};

// Ground a closed expression over fixed universe sizes; atoms become
// propositional variables keyed by relation and element tuple.
struct ModelGrounder {
  const Language& lang;
  const std::map<std::string, int>& universe;
  AtomTable& atoms;
  std::size_t nodes = 0;

  void bump(std::size_t n) {
    nodes += n;
    if (nodes > kGroundNodeCap)
      throw ResourceLimit("model search grounding exceeded node cap");
  }

  static std::string atom_key(const std::string& rel,
                              const std::vector<int>& tup) {
    std::string k = rel + "(";
    for (size_t i = 0; i < tup.size(); ++i)
      k += (i ? "," : "") + std::to_string(tup[i]);
    return k + ")";
  }

  Prop ground(const ExprPtr& e,
              std::vector<std::pair<std::string, int>>& env) {
    bump(1);
    switch (e->kind) {
      case Conn::True: return Prop::mk_true();
      case Conn::False: return Prop::mk_false();
      case Conn::Atom: {
        std::vector<int> tup;
        for (const auto& v : e->vars) {
          int val = -1;
          for (auto it = env.rbegin(); it != env.rend(); ++it)
            if (it->first == v) {
              val = it->second;
              break;
            }
          tup.push_back(val);
        }
        return Prop::mk_var(atoms.get(atom_key(e->rel, tup)));
      }
      case Conn::Not: return fold_not(ground(e->kids[0], env));
      case Conn::And:
        return fold_nary(Prop::K::And,
                         {ground(e->kids[0], env), ground(e->kids[1], env)});
      case Conn::Or:
        return fold_nary(Prop::K::Or,
                         {ground(e->kids[0], env), ground(e->kids[1], env)});
      case Conn::Implies:
        return fold_nary(Prop::K::Or, {fold_not(ground(e->kids[0], env)),
                                       ground(e->kids[1], env)});
      case Conn::Iff: {
        Prop a = ground(e->kids[0], env);
        Prop b = ground(e->kids[1], env);
        Prop both = fold_nary(Prop::K::And, {a, b});
        Prop neither =
            fold_nary(Prop::K::And, {fold_not(std::move(a)), fold_not(std::move(b))});
        return fold_nary(Prop::K::Or, {std::move(both), std::move(neither)});
      }
      case Conn::Forall:
      case Conn::Exists: {
        bool is_all = e->kind == Conn::Forall;
        std::vector<int> sizes;
        for (const auto& [v, s] : e->binders) sizes.push_back(universe.at(s));
        std::vector<Prop> parts;
        std::vector<int> idx(sizes.size(), 0);
        while (true) {
          size_t base = env.size();
          for (size_t i = 0; i < idx.size(); ++i)
            env.emplace_back(e->binders[i].first, idx[i]);
          parts.push_back(ground(e->kids[0], env));
          env.resize(base);
          size_t i = 0;
          for (; i < idx.size(); ++i) {
            if (++idx[i] < sizes[i]) break;
            idx[i] = 0;
          }
          if (i == idx.size()) break;
        }
        return fold_nary(is_all ? Prop::K::And : Prop::K::Or,
                         std::move(parts));
      }
    }
    throw Error("ground: unreachable");
  }
};

std::vector<std::map<std::string, int>> size_vectors(
    const std::vector<std::string>& sorts, int max_size) {
  std::vector<std::vector<int>> vecs{{}};
  for (size_t i = 0; i < sorts.size(); ++i) {
    std::vector<std::vector<int>> next;
    for (const auto& v : vecs)
      for (int n = 1; n <= max_size; ++n) {
        auto w = v;
        w.push_back(n);
        next.push_back(std::move(w));
      }
    vecs = std::move(next);
  }
  std::stable_sort(vecs.begin(), vecs.end(),
                   [](const std::vector<int>& a, const std::vector<int>& b) {
                     int sa = 0, sb = 0;
                     for (int x : a) sa += x;
                     for (int x : b) sb += x;
                     if (sa != sb) return sa < sb;
                     return a < b;
                   });
  std::vector<std::map<std::string, int>> out;
  for (const auto& v : vecs) {
    std::map<std::string, int> u;
    for (size_t i = 0; i < sorts.size(); ++i) u[sorts[i]] = v[i];
    out.push_back(std::move(u));
  }
  return out;
}

}  // namespace

std::optional<FiniteStructure> find_model(const Theory& t, int max_size) {
  if (max_size < 1) throw Error("find_model: max_size must be >= 1");
  for (auto& universe : size_vectors(t.base.sorts, max_size)) {
    // Tuple variables: relations in name order, tuples lexicographic.
    AtomTable atoms;
    std::vector<std::pair<std::string, std::vector<int>>> tuples;
    for (const auto& [r, ar] : t.base.relations) {
      std::vector<int> sizes;
      for (const auto& s : ar) sizes.push_back(universe.at(s));
      std::vector<int> idx(sizes.size(), 0);
      while (true) {
        atoms.get(ModelGrounder::atom_key(r, idx));
        tuples.emplace_back(r, idx);
        // Lexicographic successor with the last position fastest.
        int i = static_cast<int>(idx.size()) - 1;
        for (; i >= 0; --i) {
          if (++idx[i] < sizes[i]) break;
          idx[i] = 0;
        }
        if (i < 0) break;
      }
    }
    if (static_cast<int>(tuples.size()) > kModelVarCap)
      throw ResourceLimit("model search: too many tuple variables");

    ModelGrounder g{t.base, universe, atoms};
    std::vector<Prop> formulas;
    std::vector<std::pair<std::string, int>> env;
    for (const auto& a : t.axioms) formulas.push_back(g.ground(a, env));

    auto assignment = default_prop_solver().solve_least(
        static_cast<int>(atoms.names.size()), formulas);
    if (!assignment) continue;

    FiniteStructure m{t.base, universe, {}};
    for (const auto& [r, ar] : t.base.relations) m.extensions[r] = {};
    for (size_t i = 0; i < tuples.size(); ++i)
      if ((*assignment)[i]) m.extensions[tuples[i].first].insert(tuples[i].second);
    return m;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Refutation: NNF -> Skolemization -> Herbrand grounding
// ---------------------------------------------------------------------------

namespace {

ExprPtr nnf(const ExprPtr& e, bool neg) {
  switch (e->kind) {
    case Conn::True: return neg ? mk_false() : mk_true();
    case Conn::False: return neg ? mk_true() : mk_false();
    case Conn::Atom: return neg ? mk_not(e) : e;
    case Conn::Not: return nnf(e->kids[0], !neg);
    case Conn::And:
      return mk_binary(neg ? Conn::Or : Conn::And, nnf(e->kids[0], neg),
                       nnf(e->kids[1], neg));
    case Conn::Or:
      return mk_binary(neg ? Conn::And : Conn::Or, nnf(e->kids[0], neg),
                       nnf(e->kids[1], neg));
    case Conn::Implies:
      return mk_binary(neg ? Conn::And : Conn::Or, nnf(e->kids[0], !neg),
                       nnf(e->kids[1], neg));
    case Conn::Iff: {
      if (!neg)
        return mk_binary(
            Conn::And,
            mk_binary(Conn::Or, nnf(e->kids[0], true), nnf(e->kids[1], false)),
            mk_binary(Conn::Or, nnf(e->kids[0], false), nnf(e->kids[1], true)));
      return mk_binary(
          Conn::Or,
          mk_binary(Conn::And, nnf(e->kids[0], false), nnf(e->kids[1], true)),
          mk_binary(Conn::And, nnf(e->kids[0], true), nnf(e->kids[1], false)));
    }
    case Conn::Forall:
      return mk_quant(neg ? Conn::Exists : Conn::Forall, e->binders,
                      nnf(e->kids[0], neg));
    case Conn::Exists:
      return mk_quant(neg ? Conn::Forall : Conn::Exists, e->binders,
                      nnf(e->kids[0], neg));
  }
  throw Error("nnf: unreachable");
}

struct Term {
  bool is_var;
  std::string name;
  std::vector<Term> args;
};

std::string print_term(const Term& t) {
  if (t.is_var) return t.name;
  if (t.args.empty()) return t.name;
  std::string s = t.name + "(";
  for (size_t i = 0; i < t.args.size(); ++i)
    s += (i ? "," : "") + print_term(t.args[i]);
  return s + ")";
}

struct FnSym {
  std::string name;
  std::vector<std::string> arg_sorts;
  std::string result_sort;
};

// Skolemized formula: no existentials, single-variable universal nodes.
struct SForm {
  enum class K { True, False, Lit, And, Or, All };
  K k = K::True;
  bool neg = false;
  std::string rel;
  std::vector<Term> args;
  std::vector<SForm> kids;
  std::string var, sort;
};

struct Skolemizer {
  std::vector<FnSym>& fns;
  int& sk_counter;
  int u_counter = 0;

  // env: variable name -> term (universal vars map to themselves, renamed
  // apart; existential vars map to Skolem terms).
  SForm walk(const ExprPtr& e,
             std::vector<std::pair<std::string, Term>>& env,
             std::vector<std::pair<std::string, std::string>>& univ) {
    switch (e->kind) {
      case Conn::True: return SForm{SForm::K::True};
      case Conn::False: return SForm{SForm::K::False};
      case Conn::Atom:
      case Conn::Not: {
        const Expr* atom = e->kind == Conn::Not ? e->kids[0].get() : e.get();
        SForm f{SForm::K::Lit};
        f.neg = e->kind == Conn::Not;
        f.rel = atom->rel;
        for (const auto& v : atom->vars) {
          const Term* bound = nullptr;
          for (auto it = env.rbegin(); it != env.rend(); ++it)
            if (it->first == v) {
              bound = &it->second;
              break;
            }
          if (!bound) throw Error("skolemize: free variable '" + v + "'");
          f.args.push_back(*bound);
        }
        return f;
      }
      case Conn::And:
      case Conn::Or: {
        SForm f{e->kind == Conn::And ? SForm::K::And : SForm::K::Or};
        f.kids.push_back(walk(e->kids[0], env, univ));
        f.kids.push_back(walk(e->kids[1], env, univ));
        return f;
      }
      case Conn::Forall: {
        size_t env_base = env.size(), univ_base = univ.size();
        std::vector<std::pair<std::string, std::string>> fresh;
        for (const auto& [v, s] : e->binders) {
          std::string u = "u" + std::to_string(++u_counter);
          env.emplace_back(v, Term{true, u, {}});
          univ.emplace_back(u, s);
          fresh.emplace_back(u, s);
        }
        SForm body = walk(e->kids[0], env, univ);
        env.resize(env_base);
        univ.resize(univ_base);
        for (auto it = fresh.rbegin(); it != fresh.rend(); ++it) {
          SForm all{SForm::K::All};
          all.var = it->first;
          all.sort = it->second;
          all.kids.push_back(std::move(body));
          body = std::move(all);
        }
        return body;
      }
      case Conn::Exists: {
        size_t env_base = env.size();
        for (const auto& [v, s] : e->binders) {
          FnSym fn;
          fn.name = "sk" + std::to_string(++sk_counter);
          for (const auto& [u, us] : univ) fn.arg_sorts.push_back(us);
          fn.result_sort = s;
          Term t{false, fn.name, {}};
          for (const auto& [u, us] : univ) t.args.push_back(Term{true, u, {}});
          fns.push_back(fn);
          env.emplace_back(v, std::move(t));
        }
        SForm body = walk(e->kids[0], env, univ);
        env.resize(env_base);
        return body;
      }
      default:
        throw Error("skolemize: input not in negation normal form");
    }
  }
};

Term subst_term(const Term& t,
                const std::map<std::string, Term>& env) {
  if (t.is_var) return env.at(t.name);
  Term out{false, t.name, {}};
  for (const auto& a : t.args) out.args.push_back(subst_term(a, env));
  return out;
}

bool has_all(const SForm& f) {
  if (f.k == SForm::K::All) return true;
  for (const auto& k : f.kids)
    if (has_all(k)) return true;
  return false;
}

struct HerbrandGrounder {
  const std::map<std::string, std::vector<Term>>& terms;  // per sort
  AtomTable& atoms;
  std::size_t nodes = 0;
  // Optional partial assignment (by atom id) that literals are conditioned
  // on while grounding; only sound when every forced value is entailed by
  // formulas already in the problem.
  const std::vector<signed char>* assume = nullptr;
  // Optional fold cache for closed single-universal subtrees. A pass with
  // `delta_terms` unset fills it; a pass with `delta_terms` set reuses a
  // cached fold and grounds the body only over the listed extra terms.
  // Only valid when `terms` of the filling pass plus `delta_terms` equals
  // `terms` of the reusing pass.
  std::map<const SForm*, Prop>* all_cache = nullptr;
  const std::map<std::string, std::vector<Term>>* delta_terms = nullptr;

  void bump() {
    if (++nodes > kGroundNodeCap)
      throw ResourceLimit("refutation grounding exceeded node cap");
  }

  Prop ground(const SForm& f, std::map<std::string, Term>& env) {
    bump();
    switch (f.k) {
      case SForm::K::True: return Prop::mk_true();
      case SForm::K::False: return Prop::mk_false();
      case SForm::K::Lit: {
        std::string key = f.rel + "(";
        for (size_t i = 0; i < f.args.size(); ++i)
          key += (i ? "," : "") + print_term(subst_term(f.args[i], env));
        key += ")";
        int id = atoms.get(key);
        if (assume && id < static_cast<int>(assume->size()) &&
            (*assume)[id] >= 0) {
          bool val = (*assume)[id] == 1;
          if (f.neg) val = !val;
          return val ? Prop::mk_true() : Prop::mk_false();
        }
        Prop v = Prop::mk_var(id);
        return f.neg ? fold_not(std::move(v)) : v;
      }
      case SForm::K::And:
      case SForm::K::Or: {
        std::vector<Prop> kids;
        for (const auto& k : f.kids) kids.push_back(ground(k, env));
        return fold_nary(f.k == SForm::K::And ? Prop::K::And : Prop::K::Or,
                         std::move(kids));
      }
      case SForm::K::All: {
        auto it = terms.find(f.sort);
        if (it == terms.end() || it->second.empty())
          throw Error("grounding: no terms for sort '" + f.sort + "'");
        // A subtree with no outer bindings and no nested universal grounds
        // to the same conjunction wherever it occurs, so its fold can be
        // cached and extended with delta instances alone.
        bool cacheable =
            all_cache && env.empty() && !has_all(f.kids[0]);
        if (cacheable && delta_terms) {
          auto hit = all_cache->find(&f);
          if (hit != all_cache->end()) {
            std::vector<Prop> kids{hit->second};
            if (auto dit = delta_terms->find(f.sort);
                dit != delta_terms->end())
              for (const auto& t : dit->second) {
                env[f.var] = t;
                kids.push_back(ground(f.kids[0], env));
              }
            env.erase(f.var);
            return fold_nary(Prop::K::And, std::move(kids));
          }
        }
        std::vector<Prop> kids;
        for (const auto& t : it->second) {
          env[f.var] = t;
          kids.push_back(ground(f.kids[0], env));
        }
        env.erase(f.var);
        Prop r = fold_nary(Prop::K::And, std::move(kids));
        if (cacheable && !delta_terms) all_cache->emplace(&f, r);
        return r;
      }
    }
    throw Error("ground: unreachable");
  }
};

int term_depth_of(const Term& t) {
  int d = 0;
  for (const auto& a : t.args) d = std::max(d, 1 + term_depth_of(a));
  return d;
}

// Herbrand universe: one seed constant per sort (nonempty-sort semantics),
// Skolem constants, then function applications up to term_depth. Keyed by
// printed text so enumeration order is deterministic; monotone in `fns`.
std::map<std::string, std::map<std::string, Term>> term_universe(
    const std::vector<std::string>& sorts, const std::vector<FnSym>& fns,
    int term_depth) {
  std::map<std::string, std::map<std::string, Term>> by_sort;
  for (const auto& s : sorts)
    by_sort[s].emplace("c$" + s, Term{false, "c$" + s, {}});
  for (const auto& fn : fns)
    if (fn.arg_sorts.empty())
      by_sort[fn.result_sort].emplace(fn.name, Term{false, fn.name, {}});
  for (int round = 0; round < term_depth; ++round) {
    auto snapshot = by_sort;
    for (const auto& fn : fns) {
      if (fn.arg_sorts.empty()) continue;
      // All argument combinations from the previous rounds.
      std::vector<std::vector<Term>> cands;
      bool ok = true;
      for (const auto& s : fn.arg_sorts) {
        std::vector<Term> ts;
        for (const auto& [txt, term] : snapshot[s]) ts.push_back(term);
        if (ts.empty()) ok = false;
        cands.push_back(std::move(ts));
      }
      if (!ok) continue;
      std::vector<size_t> idx(cands.size(), 0);
      while (true) {
        Term app{false, fn.name, {}};
        for (size_t i = 0; i < idx.size(); ++i)
          app.args.push_back(cands[i][idx[i]]);
        if (term_depth_of(app) <= term_depth)
          by_sort[fn.result_sort].emplace(print_term(app), app);
        size_t i = 0;
        for (; i < idx.size(); ++i) {
          if (++idx[i] < cands[i].size()) break;
          idx[i] = 0;
        }
        if (i == idx.size()) break;
      }
    }
  }
  return by_sort;
}

}  // namespace

std::optional<Refutation> refute(const Theory& t, int term_depth) {
  if (term_depth < 0) throw Error("refute: term_depth must be >= 0");

  std::vector<FnSym> fns;
  int sk_counter = 0;
  std::vector<SForm> skolemized;
  Skolemizer sk{fns, sk_counter};
  for (const auto& a : t.axioms) {
    std::vector<std::pair<std::string, Term>> env;
    std::vector<std::pair<std::string, std::string>> univ;
    skolemized.push_back(sk.walk(nnf(a, false), env, univ));
  }

  auto by_sort = term_universe(t.base.sorts, fns, term_depth);
  std::map<std::string, std::vector<Term>> terms;
  for (const auto& [s, m] : by_sort)
    for (const auto& [txt, term] : m) terms[s].push_back(term);

  AtomTable atoms;
  HerbrandGrounder g{terms, atoms};
  std::vector<Prop> formulas;
  std::set<std::string> seen;
  for (const auto& f : skolemized) {
    std::map<std::string, Term> env;
    Prop p = g.ground(f, env);
    if (p.k == Prop::K::True) continue;
    if (seen.insert(print_prop(p, atoms.names)).second)
      formulas.push_back(std::move(p));
  }

  auto assignment = default_prop_solver().solve_least(
      static_cast<int>(atoms.names.size()), formulas);
  if (assignment) return std::nullopt;
  return Refutation{atoms.names, std::move(formulas)};
}

Verdict consistent(const Theory& t, const Bounds& b) {
  Verdict v;
  if (auto m = find_model(t, b.max_size)) {
    v.value = Truth::Yes;
    v.model = std::move(m);
    return v;
  }
  if (auto r = refute(t, b.term_depth)) {
    v.value = Truth::No;
    v.refutation = std::move(r);
    return v;
  }
  v.value = Truth::Unknown;
  v.note = "no model with universes <= " + std::to_string(b.max_size) +
           ", no refutation at term depth <= " + std::to_string(b.term_depth);
  return v;
}

Verdict entails(const Theory& t, const ExprPtr& e, const Bounds& b) {
  check_well_formed(t.base, e);
  std::vector<ExprPtr> axioms = t.axioms;
  axioms.push_back(mk_not(e));
  Theory t2 = make_theory(t.base, std::move(axioms));
  Verdict v;
  if (auto r = refute(t2, b.term_depth)) {
    v.value = Truth::Yes;
    v.refutation = std::move(r);
    return v;
  }
  if (auto m = find_model(t2, b.max_size)) {
    v.value = Truth::No;
    v.model = std::move(m);
    return v;
  }
  v.value = Truth::Unknown;
  v.note = "undecided at bounds (size " + std::to_string(b.max_size) +
           ", depth " + std::to_string(b.term_depth) + ")";
  return v;
}

// ---------------------------------------------------------------------------
// Incremental entailment
// ---------------------------------------------------------------------------

namespace {

// One conjunct of a Skolemized axiom after distributing prefix universals
// over conjunction (forall u (A and B) == (forall u A) and (forall u B)).
// When the stripped matrix is universal-free the piece's grounding is a
// plain conjunction of matrix instances, which supports delta grounding;
// otherwise (a universal trapped under a disjunction) the piece is opaque
// and must be reground whole whenever the universe grows.
struct Piece {
  std::vector<std::pair<std::string, std::string>> vars;  // universal prefix
  SForm matrix;  // piece with the prefix stripped
  SForm whole;   // original piece, used for whole-formula grounding
  bool opaque = false;
};

SForm strip_prefix(SForm f,
                   std::vector<std::pair<std::string, std::string>>& vars) {
  if (f.k != SForm::K::All) return f;
  vars.emplace_back(f.var, f.sort);
  return strip_prefix(std::move(f.kids[0]), vars);
}

void split_pieces(SForm f, std::vector<std::pair<std::string, std::string>>& prefix,
                  std::vector<Piece>& out) {
  if (f.k == SForm::K::All) {
    prefix.emplace_back(f.var, f.sort);
    split_pieces(std::move(f.kids[0]), prefix, out);
    prefix.pop_back();
    return;
  }
  if (f.k == SForm::K::And) {
    for (auto& k : f.kids) split_pieces(std::move(k), prefix, out);
    return;
  }
  for (auto it = prefix.rbegin(); it != prefix.rend(); ++it) {
    SForm all{SForm::K::All};
    all.var = it->first;
    all.sort = it->second;
    all.kids.push_back(std::move(f));
    f = std::move(all);
  }
  Piece p;
  p.whole = f;
  p.matrix = strip_prefix(std::move(f), p.vars);
  p.opaque = has_all(p.matrix);
  out.push_back(std::move(p));
}

const std::vector<Term>& terms_for(
    const std::map<std::string, std::vector<Term>>& m,
    const std::string& sort) {
  static const std::vector<Term> empty;
  auto it = m.find(sort);
  return it == m.end() ? empty : it->second;
}

// Ground `p.matrix` once per assignment drawing position i from lists[i],
// appending the instances to `parts`.
void ground_instances(const Piece& p,
                      const std::vector<const std::vector<Term>*>& lists,
                      HerbrandGrounder& g, std::vector<Prop>& parts) {
  for (const auto* l : lists)
    if (l->empty()) return;
  std::vector<size_t> idx(lists.size(), 0);
  std::map<std::string, Term> env;
  while (true) {
    for (size_t i = 0; i < idx.size(); ++i)
      env[p.vars[i].first] = (*lists[i])[idx[i]];
    parts.push_back(g.ground(p.matrix, env));
    if (idx.empty()) break;
    size_t i = 0;
    for (; i < idx.size(); ++i) {
      if (++idx[i] < lists[i]->size()) break;
      idx[i] = 0;
    }
    if (i == idx.size()) break;
  }
}

// Fold a batch of ground instances into one conjunct per source formula;
// folds that reduce to `true` are dropped, the rest deduplicated by text.
// Keeping one formula per piece (not per instance) is what lets textual
// dedup collapse pieces that ground identically.
void push_folded(std::vector<Prop> parts, const HerbrandGrounder& g,
                 std::set<std::string>& seen, std::vector<Prop>& formulas) {
  if (parts.empty()) return;
  Prop p = fold_nary(Prop::K::And, std::move(parts));
  if (p.k != Prop::K::True && seen.insert(print_prop(p, g.atoms.names)).second)
    formulas.push_back(std::move(p));
}

// Condition a formula on a partial assignment (by atom id) and refold.
Prop simplify_prop(const Prop& p, const std::vector<signed char>& a) {
  switch (p.k) {
    case Prop::K::True:
    case Prop::K::False:
      return p;
    case Prop::K::Var:
      if (p.var < static_cast<int>(a.size()) && a[p.var] >= 0)
        return a[p.var] ? Prop::mk_true() : Prop::mk_false();
      return p;
    case Prop::K::Not:
      return fold_not(simplify_prop(p.kids[0], a));
    case Prop::K::And:
    case Prop::K::Or: {
      std::vector<Prop> kids;
      kids.reserve(p.kids.size());
      for (const auto& k : p.kids) kids.push_back(simplify_prop(k, a));
      return fold_nary(p.k, std::move(kids));
    }
  }
  return p;
}

void collect_vars(const Prop& p, std::set<int>& vars) {
  if (p.k == Prop::K::Var) vars.insert(p.var);
  for (const auto& k : p.kids) collect_vars(k, vars);
}

Prop remap_vars(const Prop& p, const std::map<int, int>& m) {
  if (p.k == Prop::K::Var) return Prop::mk_var(m.at(p.var));
  Prop out{p.k, -1, {}};
  out.kids.reserve(p.kids.size());
  for (const auto& k : p.kids) out.kids.push_back(remap_vars(k, m));
  return out;
}

// Satisfiability of a formula set, with the variable space compacted to the
// variables that actually occur; atoms mentioned nowhere cannot make the
// depth-first solver branch.
bool satisfiable_compact(const std::vector<Prop>& formulas) {
  std::set<int> vars;
  for (const auto& f : formulas) collect_vars(f, vars);
  std::map<int, int> m;
  for (int v : vars) m.emplace(v, static_cast<int>(m.size()));
  std::vector<Prop> remapped;
  remapped.reserve(formulas.size());
  for (const auto& f : formulas) remapped.push_back(remap_vars(f, m));
  return default_prop_solver()
      .solve_least(static_cast<int>(m.size()), remapped)
      .has_value();
}

// Least satisfying assignment mapped back to original atom ids (-1 where the
// atom does not occur), or nullopt when the set is unsatisfiable.
std::optional<std::vector<signed char>> solve_compact(
    const std::vector<Prop>& formulas, size_t nvars_hint) {
  std::set<int> vars;
  for (const auto& f : formulas) collect_vars(f, vars);
  std::map<int, int> m;
  for (int v : vars) m.emplace(v, static_cast<int>(m.size()));
  std::vector<Prop> remapped;
  remapped.reserve(formulas.size());
  for (const auto& f : formulas) remapped.push_back(remap_vars(f, m));
  auto sol =
      default_prop_solver().solve_least(static_cast<int>(m.size()), remapped);
  if (!sol) return std::nullopt;
  std::vector<signed char> out(nvars_hint, -1);
  for (const auto& [orig, idx] : m) {
    if (orig >= static_cast<int>(out.size())) out.resize(orig + 1, -1);
    out[orig] = (*sol)[idx] ? 1 : 0;
  }
  return out;
}

// Unit propagation to fixpoint. Forces every literal that appears alone or
// as a conjunct of a top-level conjunction, simplifying `work` as it goes;
// returns false on contradiction. On success `work` holds the satisfied
// formulas reduced away and only the non-unit residue left.
bool propagate_units(std::vector<Prop>& work, std::vector<signed char>& a) {
  auto force = [&](int var, bool val) -> int {  // 1 changed, 0 no-op, -1 clash
    if (a[var] >= 0) return a[var] == (val ? 1 : 0) ? 0 : -1;
    a[var] = val ? 1 : 0;
    return 1;
  };
  auto as_unit = [](const Prop& p) -> std::optional<std::pair<int, bool>> {
    if (p.k == Prop::K::Var) return std::pair{p.var, true};
    if (p.k == Prop::K::Not && p.kids[0].k == Prop::K::Var)
      return std::pair{p.kids[0].var, false};
    return std::nullopt;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& f : work) {
      if (f.k == Prop::K::True) continue;
      f = simplify_prop(f, a);
      if (f.k == Prop::K::False) return false;
      std::vector<std::pair<int, bool>> units;
      if (auto u = as_unit(f)) {
        units.push_back(*u);
      } else if (f.k == Prop::K::And) {
        for (const auto& k : f.kids)
          if (auto u = as_unit(k)) units.push_back(*u);
      }
      for (const auto& [var, val] : units) {
        int r = force(var, val);
        if (r < 0) return false;
        if (r > 0) changed = true;
      }
    }
  }
  std::erase_if(work, [](const Prop& f) { return f.k == Prop::K::True; });
  return true;
}

}  // namespace

struct EntailmentSession::Impl {
  Theory t;
  Bounds b;
  std::vector<FnSym> fns;
  int sk_counter = 0;
  std::vector<Piece> pieces;
  std::map<std::string, std::map<std::string, Term>> base_by_sort;
  std::map<std::string, std::vector<Term>> base_terms;
  AtomTable atoms;
  std::vector<Prop> formulas;  // unsimplified base grounding (certificates)
  std::set<std::string> seen;
  std::vector<signed char> forced;  // unit-implied atom values, -1 open
  std::vector<Prop> residual;       // base grounding modulo forced units
  bool base_unsat = false;
  // Assignment of the base atoms that satisfies the whole base grounding
  // (forced units plus a solution of the residual; -1 where unconstrained),
  // and the cached folds conditioned on it. Grounding a query under this
  // assignment collapses almost everything, which gives a cheap sufficient
  // check for satisfiability; refutations always go through the exact route.
  std::vector<signed char> base_model;
  std::map<const SForm*, Prop> all_cache_eval;
  // Folds of closed single-universal subtrees over the base universe,
  // conditioned on `forced`; keyed by node address into `pieces`.
  std::map<const SForm*, Prop> all_cache;
  // Models of the theory found by earlier queries; any of them falsifying
  // the current query is already a countermodel.
  std::vector<FiniteStructure> models;
};

EntailmentSession::EntailmentSession(const Theory& t, const Bounds& b)
    : impl_(std::make_unique<Impl>()) {
  Impl& s = *impl_;
  s.t = t;
  s.b = b;
  Skolemizer sk{s.fns, s.sk_counter};
  for (const auto& a : t.axioms) {
    std::vector<std::pair<std::string, Term>> env;
    std::vector<std::pair<std::string, std::string>> univ;
    std::vector<std::pair<std::string, std::string>> prefix;
    split_pieces(sk.walk(nnf(a, false), env, univ), prefix, s.pieces);
  }
  s.base_by_sort = term_universe(t.base.sorts, s.fns, b.term_depth);
  for (const auto& [sort, m] : s.base_by_sort)
    for (const auto& [txt, term] : m) s.base_terms[sort].push_back(term);
  HerbrandGrounder g{s.base_terms, s.atoms};
  g.all_cache = &s.all_cache;
  for (const auto& p : s.pieces) {
    std::map<std::string, Term> env;
    push_folded({g.ground(p.whole, env)}, g, s.seen, s.formulas);
  }
  s.forced.assign(s.atoms.names.size(), -1);
  s.residual = s.formulas;
  s.base_unsat = !propagate_units(s.residual, s.forced);
  for (auto& [node, fold] : s.all_cache) fold = simplify_prop(fold, s.forced);
  s.base_model = s.forced;
  if (!s.base_unsat && !s.residual.empty()) {
    auto sol = solve_compact(s.residual, s.atoms.names.size());
    if (sol) {
      for (size_t i = 0; i < s.base_model.size(); ++i)
        if (s.base_model[i] < 0) s.base_model[i] = (*sol)[i];
    } else {
      s.base_unsat = true;
    }
  }
  s.all_cache_eval = s.all_cache;
  for (auto& [node, fold] : s.all_cache_eval)
    fold = simplify_prop(fold, s.base_model);
}

EntailmentSession::~EntailmentSession() = default;
EntailmentSession::EntailmentSession(EntailmentSession&&) noexcept = default;
EntailmentSession& EntailmentSession::operator=(EntailmentSession&&) noexcept =
    default;

Verdict EntailmentSession::entails(const ExprPtr& e) {
  Impl& s = *impl_;
  check_well_formed(s.t.base, e);

  Verdict v;
  if (s.base_unsat) {
    // The theory grounds to a contradiction on its own, so it entails
    // everything; the base formulas are the certificate.
    v.value = Truth::Yes;
    v.refutation = Refutation{s.atoms.names, s.formulas};
    return v;
  }

  // Skolemize the negated query with names disjoint from the theory's.
  std::vector<FnSym> fns = s.fns;
  int sk_counter = s.sk_counter;
  Skolemizer sk{fns, sk_counter};
  std::vector<std::pair<std::string, Term>> env0;
  std::vector<std::pair<std::string, std::string>> univ0;
  SForm query = sk.walk(nnf(e, true), env0, univ0);

  // Split the enlarged universe into the cached base part and the terms the
  // query's Skolem symbols introduce. term_universe is monotone in `fns`, so
  // old_terms reproduces exactly the universe the base grounding used.
  auto full_by_sort = term_universe(s.t.base.sorts, fns, s.b.term_depth);
  std::map<std::string, std::vector<Term>> all_terms, old_terms, new_terms;
  for (const auto& [sort, m] : full_by_sort) {
    auto bit = s.base_by_sort.find(sort);
    for (const auto& [txt, term] : m) {
      all_terms[sort].push_back(term);
      bool is_new = bit == s.base_by_sort.end() || !bit->second.count(txt);
      (is_new ? new_terms : old_terms)[sort].push_back(term);
    }
  }

  // Grounds the theory instances missing from the base grounding, then the
  // query. A plain-conjunction piece only needs the assignments that touch a
  // new term, partitioned by the first position holding one; an opaque piece
  // is reground whole over the enlarged universe (its cached base formula is
  // implied by the new one, so keeping both changes nothing).
  auto ground_all = [&](HerbrandGrounder& g, auto&& add) {
    for (const auto& p : s.pieces) {
      if (p.opaque) {
        std::map<std::string, Term> env;
        add(g.ground(p.whole, env));
        continue;
      }
      std::vector<Prop> parts;
      for (size_t pos = 0; pos < p.vars.size(); ++pos) {
        std::vector<const std::vector<Term>*> lists;
        for (size_t i = 0; i < p.vars.size(); ++i) {
          const std::string& sort = p.vars[i].second;
          lists.push_back(i < pos    ? &terms_for(old_terms, sort)
                          : i == pos ? &terms_for(new_terms, sort)
                                     : &terms_for(all_terms, sort));
        }
        ground_instances(p, lists, g, parts);
      }
      if (!parts.empty()) add(fold_nary(Prop::K::And, std::move(parts)));
    }
    std::map<std::string, Term> env;
    add(g.ground(query, env));
  };

  // Sufficient satisfiability check first: under the stored base model the
  // cached folds are already collapsed, so the whole grounding reduces to
  // small residues. When the residues extend to a satisfying assignment the
  // exact formulas are satisfiable too and never get built; the exact route
  // below still decides every refutation.
  bool sat = false;
  {
    AtomTable fast_atoms = s.atoms;
    HerbrandGrounder gf{all_terms, fast_atoms};
    gf.assume = &s.base_model;
    gf.all_cache = &s.all_cache_eval;
    gf.delta_terms = &new_terms;
    std::vector<Prop> residues;
    bool falsified = false;
    ground_all(gf, [&](Prop p) {
      if (p.k == Prop::K::False)
        falsified = true;
      else if (p.k != Prop::K::True)
        residues.push_back(std::move(p));
    });
    if (!falsified) {
      std::vector<signed char> am = s.base_model;
      am.resize(fast_atoms.names.size(), -1);
      sat = propagate_units(residues, am) &&
            (residues.empty() || satisfiable_compact(residues));
    }
  }

  bool unsat = false;
  AtomTable atoms2 = s.atoms;
  std::vector<Prop> fresh;
  if (!sat) {
    // Exact route. Literals already decided by the base grounding's unit
    // closure can be conditioned away while grounding: their values are
    // entailed by the cached base formulas, which stay part of any
    // certificate.
    HerbrandGrounder g{all_terms, atoms2};
    g.assume = &s.forced;
    g.all_cache = &s.all_cache;
    g.delta_terms = &new_terms;
    ground_all(g, [&fresh](Prop p) {
      if (p.k != Prop::K::True) fresh.push_back(std::move(p));
    });
    std::vector<signed char> a = s.forced;
    a.resize(atoms2.names.size(), -1);
    std::vector<Prop> work = s.residual;
    work.insert(work.end(), fresh.begin(), fresh.end());
    unsat = !propagate_units(work, a);
    if (!unsat && !work.empty()) unsat = !satisfiable_compact(work);
  }
  if (unsat) {
    v.value = Truth::Yes;
    std::vector<Prop> certificate = s.formulas;
    certificate.insert(certificate.end(), fresh.begin(), fresh.end());
    v.refutation = Refutation{atoms2.names, std::move(certificate)};
    return v;
  }
  for (const auto& m : s.models)
    if (!evaluate(m, e)) {
      v.value = Truth::No;
      v.model = m;
      return v;
    }
  std::vector<ExprPtr> axioms = s.t.axioms;
  axioms.push_back(mk_not(e));
  Theory t2 = make_theory(s.t.base, std::move(axioms));
  if (auto m = find_model(t2, s.b.max_size)) {
    s.models.push_back(*m);
    v.value = Truth::No;
    v.model = std::move(m);
    return v;
  }
  v.value = Truth::Unknown;
  v.note = "undecided at bounds (size " + std::to_string(s.b.max_size) +
           ", depth " + std::to_string(s.b.term_depth) + ")";
  return v;
}

bool evaluate_via_grounding(const FiniteStructure& m, const ExprPtr& e) {
  AtomTable atoms;
  ModelGrounder g{m.lang, m.universe, atoms};
  std::vector<std::pair<std::string, int>> env;
  Prop p = g.ground(e, env);
  // Assignment read off the extensions.
  std::vector<signed char> a(atoms.names.size(), 0);
  for (const auto& [rel, ext] : m.extensions)
    for (const auto& tup : ext) {
      auto it = atoms.ids.find(ModelGrounder::atom_key(rel, tup));
      if (it != atoms.ids.end()) a[it->second] = 1;
    }
  int v = eval3(p, a);
  if (v < 0) throw Error("evaluate_via_grounding: unassigned atom");
  return v == 1;
}

}  // namespace theoria
