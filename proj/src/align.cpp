#include "theoria/align.hpp"

#include "theoria/error.hpp"

namespace theoria {

TheoryDiagram build_span(const AlignmentSpec& spec) {
  std::vector<std::string> med_sorts;
  std::map<std::string, std::vector<std::string>> med_rels;
  LanguageMorphism to_left, to_right;

  // Sort pairs first: relation arities in the mediating language refer to
  // mediating sorts.
  std::map<std::string, std::string> left_sort_of, right_sort_of;
  for (const auto& [l, r] : spec.sort_pairs) {
    if (!spec.left.base.has_sort(l))
      throw Error("alignment: unknown sort '" + l + "' in left theory");
    if (!spec.right.base.has_sort(r))
      throw Error("alignment: unknown sort '" + r + "' in right theory");
    std::string name = l + "=" + r;
    if (left_sort_of.count(name)) continue;  // repeated pair
    med_sorts.push_back(name);
    left_sort_of[name] = l;
    right_sort_of[name] = r;
  }
  auto mediating_sort_for = [&](const std::string& l, const std::string& r,
                                const std::string& rel) {
    std::string name = l + "=" + r;
    if (!left_sort_of.count(name))
      throw Error("alignment: relation pair '" + rel +
                  "' needs the sort pair (" + l + " " + r +
                  ") which is not in the correspondence list");
    return name;
  };
  for (const auto& [l, r] : spec.rel_pairs) {
    const auto* lar = spec.left.base.arity(l);
    const auto* rar = spec.right.base.arity(r);
    if (!lar) throw Error("alignment: unknown relation '" + l + "' in left theory");
    if (!rar) throw Error("alignment: unknown relation '" + r + "' in right theory");
    if (lar->size() != rar->size())
      throw Error("alignment: relations '" + l + "' and '" + r +
                  "' have different arities");
    std::string name = l + "=" + r;
    std::vector<std::string> arity;
    for (size_t i = 0; i < lar->size(); ++i)
      arity.push_back(mediating_sort_for((*lar)[i], (*rar)[i], name));
    if (med_rels.count(name)) continue;  // repeated pair
    med_rels[name] = std::move(arity);
  }
  Language med = make_language(med_sorts, med_rels);
  Theory med_theory = make_theory(med, spec.mediating_axioms);

  to_left = LanguageMorphism{med, spec.left.base, {}, {}};
  to_right = LanguageMorphism{med, spec.right.base, {}, {}};
  for (const auto& s : med.sorts) {
    to_left.sort_map[s] = left_sort_of.at(s);
    to_right.sort_map[s] = right_sort_of.at(s);
  }
  for (const auto& [r, ar] : med.relations) {
    auto eq = r.find('=');
    to_left.rel_map[r] = r.substr(0, eq);
    to_right.rel_map[r] = r.substr(eq + 1);
  }
  to_left.validate();
  to_right.validate();

  TheoryDiagram span;
  span.shape.nodes = {kAlignApex, kAlignLeft, kAlignRight};
  span.shape.edges = {{"to-left", kAlignApex, kAlignLeft},
                      {"to-right", kAlignApex, kAlignRight}};
  span.node_theories[kAlignApex] = std::move(med_theory);
  span.node_theories[kAlignLeft] = spec.left;
  span.node_theories[kAlignRight] = spec.right;
  span.edge_maps["to-left"] = std::move(to_left);
  span.edge_maps["to-right"] = std::move(to_right);
  span.validate();
  return span;
}

MergeResult merge(const AlignmentSpec& spec, const Bounds& b) {
  TheoryDiagram span = build_span(spec);
  MergeResult out;
  out.fusion = theory_fusion(span);
  out.classification = classify(span, b);
  out.sort_provenance = out.fusion.lang.sort_classes;
  out.rel_provenance = out.fusion.lang.rel_classes;
  return out;
}

}  // namespace theoria
