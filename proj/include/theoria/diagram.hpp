#pragma once

#include <map>
#include <string>
#include <vector>

#include "theoria/lattice.hpp"
#include "theoria/morphism.hpp"
#include "theoria/theory.hpp"

namespace theoria {

struct ShapeGraph {
  struct Edge {
    std::string name, src, dst;
  };
  std::vector<std::string> nodes;
  std::vector<Edge> edges;

  bool has_node(const std::string& n) const;
  void validate() const;
};

struct LanguageDiagram {
  ShapeGraph shape;
  std::map<std::string, Language> node_langs;
  std::map<std::string, LanguageMorphism> edge_maps;

  void validate() const;
};

struct TheoryDiagram {
  ShapeGraph shape;
  std::map<std::string, Theory> node_theories;
  std::map<std::string, LanguageMorphism> edge_maps;

  void validate() const;
};

struct LanguageCocone {
  Language apex;
  std::map<std::string, LanguageMorphism> legs;  // node -> morphism into apex
};

// Commuting law: legs(m) == compose(edge, legs(n)) for every edge e: m -> n.
bool cocone_commutes(const LanguageDiagram& d, const LanguageCocone& c);

struct TheoryCocone {
  Theory apex;
  std::map<std::string, TheoryMorphism> legs;
};

// Colimit of a language diagram: qualified disjoint union, then union-find
// merging every symbol with its image along each edge. Classes are named by
// their least qualified member.
struct LanguageFusion {
  Language fused;
  LanguageCocone cocone;
  // class name -> sorted qualified members node$local
  std::map<std::string, std::vector<std::string>> sort_classes;
  std::map<std::string, std::vector<std::string>> rel_classes;
};

struct TheoryFusion {
  LanguageFusion lang;
  std::map<std::string, Theory> moved;  // homogeneous family over the apex
  Theory fused;
  TheoryCocone cocone;
};

LanguageDiagram base_diagram(const TheoryDiagram& d);

LanguageFusion language_fusion(const LanguageDiagram& d);

std::map<std::string, Theory> move_along_cocone(const TheoryDiagram& d,
                                                const LanguageCocone& legs);

TheoryFusion theory_fusion(const TheoryDiagram& d);

// Mediating morphism from the fusion apex to the apex of another cocone;
// unique by joint surjectivity of the fusion legs.
LanguageMorphism factorize(const LanguageDiagram& d, const LanguageFusion& fusion,
                           const LanguageCocone& other);

enum class Cosmicity { Monocosmic, Polycosmic, PointwiseInconsistent, Unknown };

std::string to_string(Cosmicity c);

struct Classification {
  Cosmicity kind = Cosmicity::Unknown;
  Verdict fusion_verdict;
  std::map<std::string, Verdict> node_verdicts;  // of the moved theories
};

Classification classify(const TheoryDiagram& d, const Bounds& b);

// Disjoint union of shapes; node and edge names must not clash.
TheoryDiagram diagram_sum(const TheoryDiagram& a, const TheoryDiagram& b);

TheoryDiagram remove_node(const TheoryDiagram& d, const std::string& node);

bool is_span(const TheoryDiagram& d, std::string* apex = nullptr);

// Fusion of a span-shaped diagram (one apex node, two outward edges).
TheoryFusion pushout(const TheoryDiagram& span);

// Alternate pushout route: sum of the two feet, then quotient by the
// endorelation induced by the span legs. Kept separate from theory_fusion
// so the two constructions can be checked against each other.
std::pair<Theory, TheoryMorphism> pushout_via_sum_quotient(
    const TheoryDiagram& span);

}  // namespace theoria
