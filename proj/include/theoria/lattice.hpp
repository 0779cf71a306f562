#pragma once

#include <string>
#include <utility>
#include <vector>

#include "theoria/morphism.hpp"
#include "theoria/solver.hpp"
#include "theoria/theory.hpp"

namespace theoria {

// A language morphism with theory endpoints and a cached proof-obligation
// verdict: when Yes, every translated source axiom is entailed by the target.
struct TheoryMorphism {
  LanguageMorphism map;
  Theory source;
  Theory target;
  Truth verified = Truth::Unknown;
};

// Every translated source axiom entailed by the target; No dominates Unknown.
Verdict validate_theory_morphism(const LanguageMorphism& f, const Theory& t1,
                                 const Theory& t2, const Bounds& b);

// Existential direct image: translate the axioms forward.
Theory dir_exists(const LanguageMorphism& f, const Theory& t1);

// Membership in the inverse image: the translation is entailed by t2.
Verdict inv_member(const LanguageMorphism& f, const Theory& t2,
                   const ExprPtr& e1, const Bounds& b);

// Bounded reification of the inverse image: all enumerated source
// expressions with inv_member Yes. An under-approximation.
Theory inv_reify(const LanguageMorphism& f, const Theory& t2, int max_depth,
                 int max_vars, const Bounds& b);

// Universal direct image membership: every preimage of e2 is entailed by t1
// (vacuously Yes on empty preimage).
Verdict dir_forall_member(const LanguageMorphism& f, const Theory& t1,
                          const ExprPtr& e2, const Bounds& b);

// Mapping closure membership: clo(f)(T1) = inv(f)(dir(f)(T1)).
Verdict clo_member(const LanguageMorphism& f, const Theory& t1,
                   const ExprPtr& e1, const Bounds& b);

// Entailment order on one fiber: Yes iff ta entails every axiom of tb.
Verdict leq(const Theory& ta, const Theory& tb, const Bounds& b);

// Meet = axiom union; the greatest lower bound of finitely presented
// theories over one language.
Theory meet(const std::vector<Theory>& theories);

// Disjoint sum with symbols qualified name$local; injections are trivially
// valid theory morphisms.
std::pair<Theory, std::vector<TheoryMorphism>> theory_sum(
    const std::vector<std::pair<std::string, Theory>>& parts);

// Quotient the base language and push the axioms forward along the epi.
std::pair<Theory, TheoryMorphism> quotient_theory(const Theory& t,
                                                  const Endorelation& r);

// Selected axioms (indices into the canonical ordering) over the same base;
// the returned morphism includes the subtheory into t.
std::pair<Theory, TheoryMorphism> subtheory(const Theory& t,
                                            const std::vector<size_t>& indices);

// Pullback of a structure along a morphism: universes and extensions read
// through the symbol maps. Satisfies e iff the original satisfies its image.
FiniteStructure reduct_structure(const LanguageMorphism& f,
                                 const FiniteStructure& target_model);

// Process-wide memo for entailment verdicts, keyed by canonical inputs and
// bounds. Append-only and idempotent.
Verdict entails_cached(const Theory& t, const ExprPtr& e, const Bounds& b);

}  // namespace theoria
