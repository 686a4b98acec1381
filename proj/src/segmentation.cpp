#include "specsyn/segmentation.hpp"

#include <algorithm>
#include <deque>
#include <functional>

#include "specsyn/error.hpp"

namespace specsyn {

std::vector<std::size_t> DependencyGraph::successors(std::size_t node) const {
  std::vector<std::size_t> out;
  for (auto it = edges.lower_bound({node, 0}); it != edges.end() && it->first == node; ++it) out.push_back(it->second);
  return out;
}

DependencyGraph build_dependency_graph(const std::vector<Declaration>& decls) {
  DependencyGraph g;
  g.decls = decls;
  std::map<std::string, std::size_t> owner;
  for (const auto& d : decls) {
    g.nodes.push_back(d.id);
    for (const auto& n : d.defined_names) {
      auto [it, fresh] = owner.emplace(n, d.id);
      if (!fresh && it->second != d.id) throw DuplicateName("'" + n + "' is declared more than once");
    }
  }
  for (const auto& d : decls) {
    for (const auto& ref : d.referenced_names) {
      auto it = owner.find(ref);
      if (it == owner.end()) {
        g.external_refs[d.id].insert(ref);
        continue;
      }
      g.edges.insert({d.id, it->second});
    }
  }
  return g;
}

namespace {

/// Tarjan's algorithm, iterative. Components are emitted after every
/// component reachable from them, i.e. dependencies first.
std::vector<std::vector<std::size_t>> tarjan(const DependencyGraph& g) {
  std::map<std::size_t, std::size_t> index, low;
  std::set<std::size_t> on_stack;
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> out;
  std::size_t counter = 0;

  struct Frame {
    std::size_t node;
    std::vector<std::size_t> succ;
    std::size_t next = 0;
  };
  std::vector<std::size_t> nodes = g.nodes;
  std::sort(nodes.begin(), nodes.end());
  for (std::size_t root : nodes) {
    if (index.count(root)) continue;
    std::vector<Frame> frames;
    auto enter = [&](std::size_t v) {
      index[v] = low[v] = counter++;
      stack.push_back(v);
      on_stack.insert(v);
      frames.push_back({v, g.successors(v)});
    };
    enter(root);
    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.next < f.succ.size()) {
        std::size_t w = f.succ[f.next++];
        if (!index.count(w)) {
          enter(w);
        } else if (on_stack.count(w)) {
          low[f.node] = std::min(low[f.node], index[w]);
        }
        continue;
      }
      std::size_t v = f.node;
      frames.pop_back();
      if (!frames.empty()) low[frames.back().node] = std::min(low[frames.back().node], low[v]);
      if (low[v] == index[v]) {
        std::vector<std::size_t> comp;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack.erase(w);
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
      }
    }
  }
  return out;
}

std::string prototype_of(const Declaration& d) {
  return d.text.substr(0, d.function->header.end - d.span.begin) + ";";
}

}  // namespace

std::vector<Segment> compute_segments(const DependencyGraph& graph) {
  auto comps = tarjan(graph);
  std::map<std::size_t, std::size_t> seg_of;
  for (std::size_t i = 0; i < comps.size(); ++i)
    for (auto m : comps[i]) seg_of[m] = i;

  std::map<std::size_t, const Declaration*> decl_by_id;
  for (const auto& d : graph.decls) decl_by_id[d.id] = &d;

  std::vector<Segment> segs;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    Segment s;
    s.id = i;
    s.topo_rank = i;
    s.members = comps[i];
    for (auto m : s.members) {
      for (auto succ : graph.successors(m))
        if (seg_of[succ] != i) s.deps.insert(seg_of[succ]);
      auto ext = graph.external_refs.find(m);
      if (ext != graph.external_refs.end()) s.external_refs.insert(ext->second.begin(), ext->second.end());
    }
    std::vector<const Declaration*> members;
    for (auto m : s.members) {
      auto it = decl_by_id.find(m);
      if (it != decl_by_id.end()) members.push_back(it->second);
    }
    std::size_t fn_count = 0;
    for (auto* d : members) {
      s.member_names.push_back(d->name);
      if (d->kind == DeclKind::FunctionDef) ++fn_count;
    }
    s.has_functions = fn_count > 0;
    if (fn_count > 1) {
      for (auto* d : members)
        if (d->kind == DeclKind::FunctionDef) s.code += prototype_of(*d) + "\n";
      s.code += "\n";
    }
    for (std::size_t k = 0; k < members.size(); ++k) {
      if (k) s.code += "\n\n";
      s.code += members[k]->text;
    }
    if (!s.code.empty()) s.code += "\n";
    segs.push_back(std::move(s));
  }
  return segs;
}

std::vector<Segment> dependency_closure(const Segment& seg, const std::vector<Segment>& all) {
  std::map<std::size_t, const Segment*> by_id;
  for (const auto& s : all) by_id[s.id] = &s;
  std::set<std::size_t> seen;
  std::deque<std::size_t> work(seg.deps.begin(), seg.deps.end());
  while (!work.empty()) {
    std::size_t id = work.front();
    work.pop_front();
    if (id == seg.id || !seen.insert(id).second) continue;
    auto it = by_id.find(id);
    if (it == by_id.end()) throw DanglingDependency("segment " + std::to_string(seg.id) + " depends on unknown segment " +
                                                    std::to_string(id));
    for (auto d : it->second->deps) work.push_back(d);
  }
  std::vector<Segment> out;
  for (auto id : seen) out.push_back(*by_id[id]);
  std::sort(out.begin(), out.end(), [](const Segment& a, const Segment& b) { return a.topo_rank < b.topo_rank; });
  return out;
}

ParseContext parse_context_for(const Segment& seg, const std::vector<Segment>& all) {
  ParseContext ctx;
  for (const auto& dep : dependency_closure(seg, all)) {
    auto names = typedef_names_of(parse_declarations(dep.code, ctx));
    ctx.typedef_names.insert(names.begin(), names.end());
  }
  return ctx;
}

}  // namespace specsyn
