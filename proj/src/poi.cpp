#include "specsyn/poi.hpp"

#include <algorithm>

namespace specsyn {

namespace {

void post_order_loops(const StmtPtr& st, Path& path, std::vector<Path>& out) {
  if (!st) return;
  for (std::size_t i = 0; i < st->children.size(); ++i) {
    path.push_back(i);
    post_order_loops(st->children[i], path, out);
    path.pop_back();
  }
  if (st->kind == StmtKind::For || st->kind == StmtKind::While || st->kind == StmtKind::Do) out.push_back(path);
}

}  // namespace

std::vector<PointOfInterest> extract_points_of_interest(const Segment& seg, const ParseContext& ctx) {
  auto decls = parse_declarations(seg.code, ctx);
  std::vector<PointOfInterest> out;
  auto add = [&](PoiKind kind, std::size_t owner, const std::string& name, Path path) {
    PointOfInterest p;
    p.id = PoiRef{seg.id, out.size()};
    p.kind = kind;
    p.owner = owner;
    p.owner_name = name;
    p.path = std::move(path);
    p.order_rank = out.size();
    out.push_back(std::move(p));
  };
  for (const auto& d : decls) {
    if (d.kind != DeclKind::FunctionDef) continue;
    std::size_t owner = d.id;
    for (std::size_t k = 0; k < seg.member_names.size() && k < seg.members.size(); ++k)
      if (seg.member_names[k] == d.name) owner = seg.members[k];
    std::vector<Path> loops;
    Path path;
    post_order_loops(d.function->body, path, loops);
    for (auto& lp : loops) add(PoiKind::LoopHead, owner, d.name, std::move(lp));
    add(PoiKind::FunctionContract, owner, d.name, {});
  }
  return out;
}

SpecSet attach_targets(const Segment& seg, std::vector<PointOfInterest>& pois,
                       const std::vector<AttachedClause>& targets, std::uint64_t& next_id) {
  SpecSet out;
  for (const auto& t : targets) {
    if (t.kind != ClauseKind::Assert) continue;
    if (std::find(seg.member_names.begin(), seg.member_names.end(), t.owner) == seg.member_names.end()) continue;
    auto it = std::find_if(pois.begin(), pois.end(), [&](const PointOfInterest& p) {
      return p.kind == PoiKind::Statement && p.owner_name == t.owner && p.path == t.path;
    });
    if (it == pois.end()) {
      PointOfInterest p;
      p.id = PoiRef{seg.id, pois.size()};
      p.kind = PoiKind::Statement;
      p.owner_name = t.owner;
      for (std::size_t k = 0; k < seg.member_names.size() && k < seg.members.size(); ++k)
        if (seg.member_names[k] == t.owner) p.owner = seg.members[k];
      p.path = t.path;
      p.order_rank = pois.size();
      pois.push_back(p);
      it = pois.end() - 1;
    }
    SpecClause c;
    c.id = next_id++;
    c.kind = ClauseKind::Assert;
    c.predicate = t.predicate;
    c.poi = it->id;
    c.status = ClauseStatus::Candidate;
    c.origin = ClauseOrigin::Target;
    out.insert(std::move(c));
  }
  return out;
}

}  // namespace specsyn
