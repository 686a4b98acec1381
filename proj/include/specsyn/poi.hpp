#pragma once

#include <vector>

#include "specsyn/frontend.hpp"
#include "specsyn/segmentation.hpp"
#include "specsyn/spec.hpp"

namespace specsyn {

/// Function heads and loop heads of `seg`, ordered by a post-order walk of
/// each function body (functions in member order). Index and order_rank are
/// both the list position. `owner` is the unit-level declaration id.
std::vector<PointOfInterest> extract_points_of_interest(const Segment& seg, const ParseContext& ctx = {});

/// Appends a Statement anchor for each target assertion that falls inside
/// `seg`, returning the target clauses with their POIs set. Indices continue
/// after the existing POIs. Clause ids are taken from `next_id`.
SpecSet attach_targets(const Segment& seg, std::vector<PointOfInterest>& pois,
                       const std::vector<AttachedClause>& targets, std::uint64_t& next_id);

}  // namespace specsyn
