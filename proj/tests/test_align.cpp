#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "generators.hpp"
#include "helpers.hpp"
#include "theoria/align.hpp"

using namespace theoria;
using theoria::testing::desk;

namespace {

AlignmentSpec full_spec() {
  AlignmentSpec spec;
  spec.left = desk().theory("TA").theory;
  spec.right = desk().theory("TB").theory;
  spec.sort_pairs = {{"s", "s"}};
  spec.rel_pairs = {{"P", "P"}};
  return spec;
}

const Bounds kB{};

}  // namespace

TEST_CASE("build_span produces the desk span up to naming") {
  TheoryDiagram d = build_span(full_spec());
  CHECK(is_span(d));
  CHECK(d.node_theories.at("mid").base.sorts ==
        std::vector<std::string>{"s=s"});
  CHECK(*d.node_theories.at("mid").base.arity("P=P") ==
        std::vector<std::string>{"s=s"});
  CHECK(d.node_theories.at("mid").axioms.empty());
  CHECK(d.edge_maps.at("to-left").sort_map.at("s=s") == "s");
  CHECK(d.edge_maps.at("to-right").rel_map.at("P=P") == "P");
  // Same fusion result as the desk SPAN, modulo the class naming.
  TheoryFusion fu = theory_fusion(d);
  CHECK(fu.lang.fused.sorts.size() == 1);
  CHECK(fu.fused.axioms.size() == 2);
}

TEST_CASE("empty pairing yields a disjoint-union span") {
  AlignmentSpec spec = full_spec();
  spec.sort_pairs.clear();
  spec.rel_pairs.clear();
  TheoryDiagram d = build_span(spec);
  CHECK(d.node_theories.at("mid").base.sorts.empty());
  TheoryFusion fu = theory_fusion(d);
  CHECK(fu.lang.fused.sorts.size() == 2);
  CHECK(fu.fused.axioms.size() == 2);
}

TEST_CASE("alignment errors name the offending symbols") {
  AlignmentSpec spec = full_spec();
  spec.sort_pairs = {{"nope", "s"}};
  CHECK_THROWS_WITH_AS(build_span(spec), doctest::Contains("nope"), Error);

  AlignmentSpec mism;
  mism.left = empty_theory(desk().language("L1"));
  mism.right = empty_theory(desk().language("L2"));
  mism.sort_pairs = {{"person", "agent"}, {"org", "agent"}};
  mism.rel_pairs = {{"mgr", "works"}};  // unary vs binary
  CHECK_THROWS_WITH_AS(build_span(mism), doctest::Contains("arities"), Error);

  // A relation pair whose arity sorts were never paired is an error too.
  AlignmentSpec unpaired = full_spec();
  unpaired.sort_pairs.clear();
  CHECK_THROWS_WITH_AS(build_span(unpaired),
                       doctest::Contains("correspondence"), Error);
}

TEST_CASE("merge fuses and classifies the alignment") {
  MergeResult r = merge(full_spec(), kB);
  CHECK(r.classification.kind == Cosmicity::Polycosmic);
  CHECK(r.fusion.fused.axioms.size() == 2);
  REQUIRE(r.sort_provenance.size() == 1);
  CHECK(r.sort_provenance.begin()->second ==
        std::vector<std::string>{"left$s", "mid$s=s", "right$s"});

  AlignmentSpec disjoint = full_spec();
  disjoint.sort_pairs.clear();
  disjoint.rel_pairs.clear();
  MergeResult r2 = merge(disjoint, kB);
  CHECK(r2.classification.kind == Cosmicity::Monocosmic);
  CHECK(r2.fusion.fused.axioms.size() == 2);
}

TEST_CASE("merging a theory with a renamed copy of itself collapses") {
  Theory left = desk().theory("TA").theory;
  Language lp2 = make_language({"s2"}, {{"P2", {"s2"}}});
  Theory right = make_theory(lp2, {parse_expression("(forall ((x s2)) (P2 x))")});
  AlignmentSpec spec{left, right, {{"s", "s2"}}, {{"P", "P2"}}, {}};
  MergeResult r = merge(spec, kB);
  CHECK(r.fusion.lang.fused.sorts.size() == 1);
  CHECK(r.fusion.fused.axioms.size() == 1);
  CHECK(r.classification.kind == Cosmicity::Monocosmic);
}

TEST_CASE("mapped pairs land on one fused symbol") {
  MergeResult r = merge(full_spec(), kB);
  const auto& legs = r.fusion.lang.cocone.legs;
  CHECK(legs.at("left").sort_map.at("s") == legs.at("right").sort_map.at("s"));
  CHECK(legs.at("left").rel_map.at("P") == legs.at("right").rel_map.at("P"));
}

TEST_CASE("merge never loses axioms when the mediator is axiom-free") {
  testing::Gen g(5001);
  for (int i = 0; i < 25; ++i) {
    Language ll = testing::random_language(g, 2, 2, 1);
    Language rl = testing::random_language(g, 2, 2, 1);
    AlignmentSpec spec;
    spec.left = testing::random_theory(g, ll, 2, 1);
    spec.right = testing::random_theory(g, rl, 2, 1);
    if (g.coin() && !ll.sorts.empty() && !rl.sorts.empty())
      spec.sort_pairs = {{g.pick(ll.sorts), g.pick(rl.sorts)}};
    MergeResult r = merge(spec, kB);
    CHECK(r.fusion.fused.axioms.size() <=
          spec.left.axioms.size() + spec.right.axioms.size());
  }
}

TEST_CASE("mediating axioms must be preserved by both legs") {
  // Both participants assert their version of the mediated fact, so the
  // alignment's compatibility axiom is preserved by both legs.
  Language lp2 = make_language({"s2"}, {{"P2", {"s2"}}});
  AlignmentSpec spec;
  spec.left = desk().theory("TA").theory;
  spec.right = make_theory(lp2, {parse_expression("(forall ((x s2)) (P2 x))")});
  spec.sort_pairs = {{"s", "s2"}};
  spec.rel_pairs = {{"P", "P2"}};
  spec.mediating_axioms = {parse_expression("(forall ((x s=s2)) (P=P2 x))")};
  TheoryDiagram d = build_span(spec);
  for (const auto& node : {std::string("left"), std::string("right")}) {
    Verdict v = validate_theory_morphism(d.edge_maps.at("to-" + node),
                                         d.node_theories.at("mid"),
                                         d.node_theories.at(node), kB);
    CHECK(v.value != Truth::No);
  }
}
