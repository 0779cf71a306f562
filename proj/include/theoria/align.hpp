#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "theoria/diagram.hpp"
#include "theoria/theory.hpp"

namespace theoria {

// User-specified type correspondences between two theories. Each pair turns
// into one mediating symbol named left=right with morphisms back to both
// sides. Mediating axioms (over the generated mediating language) state the
// compatibility the alignment must preserve; default none.
struct AlignmentSpec {
  Theory left;
  Theory right;
  std::vector<std::pair<std::string, std::string>> sort_pairs;
  std::vector<std::pair<std::string, std::string>> rel_pairs;
  std::vector<ExprPtr> mediating_axioms;
};

// Node names of the generated span.
inline constexpr const char* kAlignApex = "mid";
inline constexpr const char* kAlignLeft = "left";
inline constexpr const char* kAlignRight = "right";

// Span with the mediating theory at the apex and the participants at the
// feet. Throws on unknown symbols or arity mismatches between paired
// relations.
TheoryDiagram build_span(const AlignmentSpec& spec);

struct MergeResult {
  TheoryFusion fusion;
  Classification classification;
  // fused symbol -> contributing qualified symbols (node$local)
  std::map<std::string, std::vector<std::string>> sort_provenance;
  std::map<std::string, std::vector<std::string>> rel_provenance;
};

// Alignment followed by unification: fuse the span and classify it.
MergeResult merge(const AlignmentSpec& spec, const Bounds& b);

}  // namespace theoria
