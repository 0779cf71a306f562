#include "theoria/diagram.hpp"

#include <algorithm>
#include <set>

#include "theoria/error.hpp"

namespace theoria {

bool ShapeGraph::has_node(const std::string& n) const {
  return std::find(nodes.begin(), nodes.end(), n) != nodes.end();
}

void ShapeGraph::validate() const {
  std::set<std::string> names;
  for (const auto& n : nodes) {
    check_name(n, "node");
    if (!names.insert(n).second) throw Error("duplicate node '" + n + "'");
  }
  std::set<std::string> enames;
  for (const auto& e : edges) {
    check_name(e.name, "edge");
    if (!enames.insert(e.name).second)
      throw Error("duplicate edge '" + e.name + "'");
    if (!has_node(e.src))
      throw Error("edge '" + e.name + "' has unknown source node '" + e.src + "'");
    if (!has_node(e.dst))
      throw Error("edge '" + e.name + "' has unknown target node '" + e.dst + "'");
  }
}

void LanguageDiagram::validate() const {
  shape.validate();
  for (const auto& n : shape.nodes)
    if (!node_langs.count(n)) throw Error("node '" + n + "' has no language");
  for (const auto& e : shape.edges) {
    auto it = edge_maps.find(e.name);
    if (it == edge_maps.end())
      throw Error("edge '" + e.name + "' has no morphism");
    if (!(it->second.source == node_langs.at(e.src)))
      throw Error("edge '" + e.name + "': morphism source mismatch");
    if (!(it->second.target == node_langs.at(e.dst)))
      throw Error("edge '" + e.name + "': morphism target mismatch");
    it->second.validate();
  }
}

void TheoryDiagram::validate() const {
  shape.validate();
  for (const auto& n : shape.nodes)
    if (!node_theories.count(n)) throw Error("node '" + n + "' has no theory");
  for (const auto& e : shape.edges) {
    auto it = edge_maps.find(e.name);
    if (it == edge_maps.end())
      throw Error("edge '" + e.name + "' has no morphism");
    if (!(it->second.source == node_theories.at(e.src).base))
      throw Error("edge '" + e.name + "': morphism source mismatch");
    if (!(it->second.target == node_theories.at(e.dst).base))
      throw Error("edge '" + e.name + "': morphism target mismatch");
    it->second.validate();
  }
}

bool cocone_commutes(const LanguageDiagram& d, const LanguageCocone& c) {
  for (const auto& e : d.shape.edges) {
    const auto& leg_m = c.legs.at(e.src);
    const auto& leg_n = c.legs.at(e.dst);
    if (!(compose(d.edge_maps.at(e.name), leg_n) == leg_m)) return false;
  }
  return true;
}

LanguageDiagram base_diagram(const TheoryDiagram& d) {
  LanguageDiagram out;
  out.shape = d.shape;
  for (const auto& [n, t] : d.node_theories) out.node_langs[n] = t.base;
  out.edge_maps = d.edge_maps;
  return out;
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
  void unite(const std::string& a, const std::string& b) {
    std::string ra = find(a), rb = find(b);
    if (ra == rb) return;
    if (rb < ra) std::swap(ra, rb);
    parent[rb] = ra;  // least member becomes the representative
  }
};

}  // namespace

LanguageFusion language_fusion(const LanguageDiagram& d) {
  d.validate();
  UnionFind sorts, rels;
  for (const auto& n : d.shape.nodes) {
    const auto& lang = d.node_langs.at(n);
    for (const auto& s : lang.sorts) sorts.add(n + "$" + s);
    for (const auto& [r, ar] : lang.relations) rels.add(n + "$" + r);
  }
  for (const auto& e : d.shape.edges) {
    const auto& f = d.edge_maps.at(e.name);
    for (const auto& [s, img] : f.sort_map)
      sorts.unite(e.src + "$" + s, e.dst + "$" + img);
    for (const auto& [r, img] : f.rel_map)
      rels.unite(e.src + "$" + r, e.dst + "$" + img);
  }

  LanguageFusion out;
  for (const auto& [x, p] : sorts.parent)
    out.sort_classes[sorts.find(x)].push_back(x);
  for (const auto& [x, p] : rels.parent)
    out.rel_classes[rels.find(x)].push_back(x);

  // Arity of a relation class, read through the sort classes; all members
  // must agree.
  std::vector<std::string> fused_sorts;
  for (const auto& [rep, members] : out.sort_classes) fused_sorts.push_back(rep);
  std::map<std::string, std::vector<std::string>> fused_rels;
  for (const auto& [rep, members] : out.rel_classes) {
    std::vector<std::string> class_arity;
    bool first = true;
    for (const auto& qualified : members) {
      auto dollar = qualified.find('$');
      std::string node = qualified.substr(0, dollar);
      std::string local = qualified.substr(dollar + 1);
      const auto& ar = *d.node_langs.at(node).arity(local);
      std::vector<std::string> mapped;
      for (const auto& s : ar) mapped.push_back(sorts.find(node + "$" + s));
      if (first) {
        class_arity = std::move(mapped);
        first = false;
      } else if (mapped != class_arity) {
        throw Error("fusion: arity inconsistency merging relation '" +
                    members.front() + "' with '" + qualified + "'");
      }
    }
    fused_rels[rep] = std::move(class_arity);
  }
  out.fused = make_language(std::move(fused_sorts), std::move(fused_rels));

  out.cocone.apex = out.fused;
  for (const auto& n : d.shape.nodes) {
    const auto& lang = d.node_langs.at(n);
    LanguageMorphism leg{lang, out.fused, {}, {}};
    for (const auto& s : lang.sorts) leg.sort_map[s] = sorts.find(n + "$" + s);
    for (const auto& [r, ar] : lang.relations)
      leg.rel_map[r] = rels.find(n + "$" + r);
    leg.validate();
    out.cocone.legs[n] = std::move(leg);
  }
  if (!cocone_commutes(d, out.cocone))
    throw Error("internal: fusion cocone fails the commuting law");
  return out;
}

std::map<std::string, Theory> move_along_cocone(const TheoryDiagram& d,
                                                const LanguageCocone& legs) {
  std::map<std::string, Theory> out;
  for (const auto& n : d.shape.nodes)
    out[n] = dir_exists(legs.legs.at(n), d.node_theories.at(n));
  return out;
}

TheoryFusion theory_fusion(const TheoryDiagram& d) {
  d.validate();
  TheoryFusion out;
  out.lang = language_fusion(base_diagram(d));
  out.moved = move_along_cocone(d, out.lang.cocone);
  if (d.shape.nodes.empty()) {
    out.fused = empty_theory(out.lang.fused);
  } else {
    std::vector<Theory> family;
    for (const auto& n : d.shape.nodes) family.push_back(out.moved.at(n));
    out.fused = meet(family);
  }
  out.cocone.apex = out.fused;
  for (const auto& n : d.shape.nodes)
    out.cocone.legs[n] =
        TheoryMorphism{out.lang.cocone.legs.at(n), d.node_theories.at(n),
                       out.fused, Truth::Yes};
  return out;
}

LanguageMorphism factorize(const LanguageDiagram& d,
                           const LanguageFusion& fusion,
                           const LanguageCocone& other) {
  for (const auto& n : d.shape.nodes) {
    if (!other.legs.count(n))
      throw Error("factorize: cocone is missing a leg for node '" + n + "'");
    const auto& leg = other.legs.at(n);
    if (!(leg.source == d.node_langs.at(n)) || !(leg.target == other.apex))
      throw Error("factorize: leg endpoints do not match at node '" + n + "'");
    leg.validate();
  }
  if (!cocone_commutes(d, other))
    throw Error("factorize: cocone fails the commuting law");

  LanguageMorphism h{fusion.fused, other.apex, {}, {}};
  for (const auto& [rep, members] : fusion.sort_classes) {
    std::string image;
    bool first = true;
    for (const auto& qualified : members) {
      auto dollar = qualified.find('$');
      const auto& leg = other.legs.at(qualified.substr(0, dollar));
      std::string img = leg.sort_map.at(qualified.substr(dollar + 1));
      if (first) {
        image = img;
        first = false;
      } else if (img != image) {
        throw Error("internal: factorize found inconsistent sort images");
      }
    }
    h.sort_map[rep] = image;
  }
  for (const auto& [rep, members] : fusion.rel_classes) {
    std::string image;
    bool first = true;
    for (const auto& qualified : members) {
      auto dollar = qualified.find('$');
      const auto& leg = other.legs.at(qualified.substr(0, dollar));
      std::string img = leg.rel_map.at(qualified.substr(dollar + 1));
      if (first) {
        image = img;
        first = false;
      } else if (img != image) {
        throw Error("internal: factorize found inconsistent relation images");
      }
    }
    h.rel_map[rep] = image;
  }
  h.validate();
  return h;
}

std::string to_string(Cosmicity c) {
  switch (c) {
    case Cosmicity::Monocosmic: return "monocosmic";
    case Cosmicity::Polycosmic: return "polycosmic";
    case Cosmicity::PointwiseInconsistent: return "pointwise-inconsistent";
    default: return "unknown";
  }
}

Classification classify(const TheoryDiagram& d, const Bounds& b) {
  TheoryFusion fusion = theory_fusion(d);
  Classification out;
  out.fusion_verdict = consistent(fusion.fused, b);
  bool node_no = false, node_unknown = false;
  for (const auto& [n, t] : fusion.moved) {
    Verdict v = consistent(t, b);
    if (v.value == Truth::No) node_no = true;
    if (v.value == Truth::Unknown) node_unknown = true;
    out.node_verdicts.emplace(n, std::move(v));
  }
  if (out.fusion_verdict.value == Truth::Yes) {
    out.kind = Cosmicity::Monocosmic;
  } else if (out.fusion_verdict.value == Truth::No && !node_no &&
             !node_unknown) {
    out.kind = Cosmicity::Polycosmic;
  } else if (node_no) {
    out.kind = Cosmicity::PointwiseInconsistent;
  } else {
    out.kind = Cosmicity::Unknown;
  }
  return out;
}

TheoryDiagram diagram_sum(const TheoryDiagram& a, const TheoryDiagram& b) {
  TheoryDiagram out = a;
  for (const auto& n : b.shape.nodes) {
    if (out.shape.has_node(n))
      throw Error("diagram_sum: duplicate node '" + n + "'");
    out.shape.nodes.push_back(n);
  }
  for (const auto& e : b.shape.edges) {
    for (const auto& f : out.shape.edges)
      if (f.name == e.name)
        throw Error("diagram_sum: duplicate edge '" + e.name + "'");
    out.shape.edges.push_back(e);
  }
  out.node_theories.insert(b.node_theories.begin(), b.node_theories.end());
  out.edge_maps.insert(b.edge_maps.begin(), b.edge_maps.end());
  return out;
}

TheoryDiagram remove_node(const TheoryDiagram& d, const std::string& node) {
  if (!d.shape.has_node(node)) throw Error("remove_node: unknown node '" + node + "'");
  TheoryDiagram out;
  for (const auto& n : d.shape.nodes)
    if (n != node) {
      out.shape.nodes.push_back(n);
      out.node_theories[n] = d.node_theories.at(n);
    }
  for (const auto& e : d.shape.edges)
    if (e.src != node && e.dst != node) {
      out.shape.edges.push_back(e);
      out.edge_maps[e.name] = d.edge_maps.at(e.name);
    }
  return out;
}

bool is_span(const TheoryDiagram& d, std::string* apex) {
  if (d.shape.nodes.size() != 3 || d.shape.edges.size() != 2) return false;
  const auto& e1 = d.shape.edges[0];
  const auto& e2 = d.shape.edges[1];
  if (e1.src != e2.src) return false;
  if (e1.dst == e1.src || e2.dst == e2.src || e1.dst == e2.dst) return false;
  if (apex) *apex = e1.src;
  return true;
}

TheoryFusion pushout(const TheoryDiagram& span) {
  if (!is_span(span))
    throw Error("pushout: diagram is not a span (apex with two outward edges)");
  return theory_fusion(span);
}

std::pair<Theory, TheoryMorphism> pushout_via_sum_quotient(
    const TheoryDiagram& span) {
  std::string apex;
  if (!is_span(span, &apex))
    throw Error("pushout: diagram is not a span (apex with two outward edges)");
  const auto& e1 = span.shape.edges[0];
  const auto& e2 = span.shape.edges[1];
  const auto& f1 = span.edge_maps.at(e1.name);
  const auto& f2 = span.edge_maps.at(e2.name);

  auto [sum, injections] = theory_sum(
      {{e1.dst, span.node_theories.at(e1.dst)},
       {e2.dst, span.node_theories.at(e2.dst)}});

  // Identify the two images of every apex symbol.
  std::vector<std::pair<std::string, std::string>> sp, rp;
  const auto& apex_lang = span.node_theories.at(apex).base;
  for (const auto& s : apex_lang.sorts)
    sp.emplace_back(e1.dst + "$" + f1.sort_map.at(s),
                    e2.dst + "$" + f2.sort_map.at(s));
  for (const auto& [r, ar] : apex_lang.relations)
    rp.emplace_back(e1.dst + "$" + f1.rel_map.at(r),
                    e2.dst + "$" + f2.rel_map.at(r));
  Endorelation rel = make_endorelation(sum.base, std::move(sp), std::move(rp));
  return quotient_theory(sum, rel);
}

}  // namespace theoria
