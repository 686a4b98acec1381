#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "specsyn/frontend.hpp"

namespace specsyn {

/// Edge (a, b): declaration a references a name defined by declaration b.
/// Self-edges mark self-recursion.
struct DependencyGraph {
  std::vector<std::size_t> nodes;
  std::set<std::pair<std::size_t, std::size_t>> edges;
  std::map<std::size_t, std::set<std::string>> external_refs;  // names not declared in the unit
  std::vector<Declaration> decls;                               // indexed by id; may be empty

  std::vector<std::size_t> successors(std::size_t node) const;
};

struct Segment {
  std::size_t id = 0;
  std::vector<std::size_t> members;  // declaration ids, source order
  std::vector<std::string> member_names;
  std::string code;
  std::set<std::size_t> deps;
  std::size_t topo_rank = 0;
  std::set<std::string> external_refs;
  bool has_functions = false;
};

/// Throws DuplicateName when two declarations define the same name.
DependencyGraph build_dependency_graph(const std::vector<Declaration>& decls);

/// Strongly connected components in dependencies-first order; topo_rank and
/// id equal the list index. Segments holding several functions get forward
/// declarations prepended so their code compiles on its own.
std::vector<Segment> compute_segments(const DependencyGraph& graph);

/// Transitive dependencies of `seg` in topological order, excluding `seg`.
/// Throws DanglingDependency on an unknown segment id.
std::vector<Segment> dependency_closure(const Segment& seg, const std::vector<Segment>& all);

/// Typedef names visible to `seg` through its dependency closure.
ParseContext parse_context_for(const Segment& seg, const std::vector<Segment>& all);

}  // namespace specsyn
