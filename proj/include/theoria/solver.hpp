#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "theoria/structure.hpp"
#include "theoria/theory.hpp"

namespace theoria {

enum class Truth { Yes, No, Unknown };

std::string to_string(Truth t);

// Search bounds for the two sound-but-incomplete procedures.
struct Bounds {
  int max_size = 3;    // largest universe per sort in model search
  int term_depth = 1;  // Herbrand term depth in refutation
};

// Propositional formula over integer variables.
struct Prop {
  enum class K { Var, True, False, Not, And, Or };
  K k = K::True;
  int var = -1;
  std::vector<Prop> kids;

  static Prop mk_var(int v) { return Prop{K::Var, v, {}}; }
  static Prop mk_true() { return Prop{K::True, -1, {}}; }
  static Prop mk_false() { return Prop{K::False, -1, {}}; }
  static Prop mk_not(Prop p) { return Prop{K::Not, -1, {std::move(p)}}; }
  static Prop mk_and(std::vector<Prop> ps) {
    return Prop{K::And, -1, std::move(ps)};
  }
  static Prop mk_or(std::vector<Prop> ps) {
    return Prop{K::Or, -1, std::move(ps)};
  }
};

// Decision procedure behind an interface so an external solver can be
// swapped in without touching callers.
class PropSolver {
 public:
  virtual ~PropSolver() = default;
  // Least satisfying assignment of the conjunction of `formulas` under the
  // order: variable 0 is most significant, false < true. nullopt = unsat.
  virtual std::optional<std::vector<bool>> solve_least(
      int nvars, const std::vector<Prop>& formulas) = 0;
};

PropSolver& default_prop_solver();

// Propositional unsatisfiability certificate from Skolem/Herbrand grounding.
struct Refutation {
  std::vector<std::string> atoms;  // ground atom text, index = variable
  std::vector<Prop> formulas;      // ground instances; conjunction is unsat
};

bool recheck_refutation(const Refutation& r);
std::string print_refutation(const Refutation& r);

struct Verdict {
  Truth value = Truth::Unknown;
  std::optional<FiniteStructure> model;
  std::optional<Refutation> refutation;
  std::string note;
};

// First satisfying structure in deterministic enumeration order (universe
// sizes by ascending total then lexicographic; extensions by least bitmask),
// or nullopt when no model with all universes <= max_size exists.
std::optional<FiniteStructure> find_model(const Theory& t, int max_size);

// Sound unsatisfiability check: Skolemize (with one seed constant per sort),
// ground over Herbrand terms up to term_depth, decide propositionally.
// A returned certificate implies t has no model of any cardinality.
std::optional<Refutation> refute(const Theory& t, int term_depth);

Verdict consistent(const Theory& t, const Bounds& b);

// Yes iff refute(t + {not e}); No with countermodel via find_model.
Verdict entails(const Theory& t, const ExprPtr& e, const Bounds& b);

// Amortizes the Skolemization and grounding of one fixed theory across many
// entailment queries. The theory's ground instances over its own Herbrand
// universe are computed once at construction; each query then adds only the
// instances that mention the query's fresh Skolem terms. Verdict values agree
// with entails(t, e, b) — both decide the same set of ground instances — but
// refutation certificates may group those instances differently.
class EntailmentSession {
 public:
  EntailmentSession(const Theory& t, const Bounds& b);
  ~EntailmentSession();
  EntailmentSession(EntailmentSession&&) noexcept;
  EntailmentSession& operator=(EntailmentSession&&) noexcept;

  Verdict entails(const ExprPtr& e);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Independent propositional route for evaluate(): expand quantifiers over
// the universes and read atoms off the extensions.
bool evaluate_via_grounding(const FiniteStructure& m, const ExprPtr& e);

}  // namespace theoria
