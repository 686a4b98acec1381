#include "specsyn/refinement.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <random>
#include <sstream>
#include <thread>

#include "specsyn/error.hpp"
#include "specsyn/synthesis.hpp"

namespace specsyn {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x5eed;
  for (auto p : parts) h = splitmix(h ^ splitmix(p));
  return h;
}

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

void emit(EventLog* log, const std::string& type, nlohmann::json fields) {
  if (log) log->emit(type, std::move(fields));
}

SpecSet others_at_segment(const UnitState& unit, std::size_t seg_id, std::size_t poi_index) {
  return unit.verified(seg_id).filtered([&](const SpecClause& c) { return c.poi.index != poi_index; });
}

}  // namespace

VdrReport compute_vdr(const UnitState& unit, std::size_t seg_id, const SpecSet& checked, const SpecSet& assumed,
                      const std::vector<Variant>& variants, const Verifier& verifier, int round) {
  if (variants.empty()) throw EmptyVariantSet("segment " + std::to_string(seg_id) + " has no non-equivalent variant");
  std::vector<VariantOutcome> outcomes(variants.size());
  std::vector<std::exception_ptr> errors(variants.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < variants.size();) {
      const Variant& v = variants[i];
      VariantOutcome& o = outcomes[i];
      o.variant_id = v.id;
      o.operator_id = v.operator_id;
      try {
        CheckProgram prog = unit.program(seg_id, v.code, assumed, checked);
        if (prog.checked.empty()) continue;
        for (const auto& verdict : verifier.verify(prog.source, prog.checked)) {
          if (!is_refuted(verdict.status)) continue;
          o.failing.push_back(verdict.clause_id);
          if (o.diagnostic.empty()) {
            auto label = prog.source.clause_labels.find(verdict.clause_id);
            o.diagnostic = (label != prog.source.clause_labels.end() ? label->second + ": " : std::string()) +
                           std::string(to_string(verdict.status)) +
                           (verdict.diagnostic.empty() ? "" : ", " + verdict.diagnostic);
          }
        }
        o.refuted = !o.failing.empty();
      } catch (const MalformedOutput& e) {
        o.diagnostic = std::string("verifier output unreadable: ") + e.what();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::size_t n_threads = std::min<std::size_t>(variants.size(), std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  VdrReport r;
  r.round = round;
  r.total = variants.size();
  for (const auto& o : outcomes) {
    if (o.refuted) ++r.refuted;
    else r.undistinguished.push_back(o.variant_id);
  }
  r.rate = static_cast<double>(r.refuted) / static_cast<double>(r.total);
  r.outcomes = std::move(outcomes);
  return r;
}

std::string unified_diff(const std::string& a, const std::string& b, const std::string& a_name,
                         const std::string& b_name, std::size_t context) {
  auto x = split_lines(a), y = split_lines(b);
  std::size_t n = x.size(), m = y.size();
  std::vector<std::vector<std::size_t>> lcs(n + 1, std::vector<std::size_t>(m + 1, 0));
  for (std::size_t i = n; i-- > 0;)
    for (std::size_t j = m; j-- > 0;)
      lcs[i][j] = x[i] == y[j] ? lcs[i + 1][j + 1] + 1 : std::max(lcs[i + 1][j], lcs[i][j + 1]);

  struct Op {
    char tag;  // ' ', '-', '+'
    std::size_t ai, bi;
  };
  std::vector<Op> ops;
  std::size_t i = 0, j = 0;
  while (i < n || j < m) {
    if (i < n && j < m && x[i] == y[j]) ops.push_back({' ', i++, j++});
    else if (i < n && (j == m || lcs[i + 1][j] >= lcs[i][j + 1])) ops.push_back({'-', i++, j});
    else ops.push_back({'+', i, j++});
  }

  std::ostringstream os;
  os << "--- " << a_name << "\n+++ " << b_name << "\n";
  std::size_t k = 0;
  while (k < ops.size()) {
    if (ops[k].tag == ' ') {
      ++k;
      continue;
    }
    std::size_t start = k >= context ? k - context : 0;
    while (start < k && ops[start].tag != ' ') ++start;
    std::size_t end = k;
    // Extend the hunk while changes are separated by at most 2*context lines.
    for (std::size_t gap = 0; end < ops.size(); ++end) {
      if (ops[end].tag == ' ') {
        if (++gap > 2 * context) break;
      } else {
        gap = 0;
      }
    }
    std::size_t last_change = end;
    while (last_change > k && ops[last_change - 1].tag == ' ') --last_change;
    end = std::min(ops.size(), last_change + context);
    std::size_t a_len = 0, b_len = 0;
    for (std::size_t q = start; q < end; ++q) {
      if (ops[q].tag != '+') ++a_len;
      if (ops[q].tag != '-') ++b_len;
    }
    os << "@@ -" << (a_len ? ops[start].ai + 1 : ops[start].ai) << "," << a_len << " +"
       << (b_len ? ops[start].bi + 1 : ops[start].bi) << "," << b_len << " @@\n";
    for (std::size_t q = start; q < end; ++q) {
      const std::string& line = ops[q].tag == '+' ? y[ops[q].bi] : x[ops[q].ai];
      os << ops[q].tag << line << "\n";
    }
    k = end;
  }
  return os.str();
}

CatalogMutator::CatalogMutator(std::size_t budget, std::uint64_t seed, Toolchain toolchain,
                               std::vector<MutationOperator> catalog)
    : budget_(budget), seed_(seed), toolchain_(std::move(toolchain)), catalog_(std::move(catalog)) {}

std::uint64_t CatalogMutator::round_seed(std::size_t seg_id, std::size_t poi_index, int round) const {
  return mix_seed({seed_, seg_id, poi_index, static_cast<std::uint64_t>(round)});
}

std::vector<Variant> CatalogMutator::variants(const UnitState& unit, std::size_t seg_id, std::size_t poi_index,
                                              int round) {
  const SegmentState& st = unit.at(seg_id);
  auto vs = generate_variants(st.seg, budget_, round_seed(seg_id, poi_index, round), st.ctx, catalog_);
  last_ = TceSummary{};
  return filter_non_equivalent(std::move(vs), st.seg.code, toolchain_, unit.dependency_text(seg_id, false), &last_);
}

Prompt assemble_refine_context(const Prompt& conversation, const std::vector<Variant>& undistinguished,
                               const std::string& original, const SpecSet& poi_specs, const VdrReport& report,
                               std::uint64_t seed) {
  if (undistinguished.empty()) throw EmptyVariantSet("no undistinguished variant to show");
  std::mt19937_64 rng(seed);
  std::size_t pick = static_cast<std::size_t>(uniform_index(rng, undistinguished.size()));
  const Variant& chosen = undistinguished[pick];

  std::ostringstream os;
  os << "The clauses proved so far hold on the original segment and also on " << report.total - report.refuted
     << " of " << report.total << " mutated variants of it, so they cannot tell those variants apart from the "
     << "original.\n\n## Clauses proved so far\n";
  if (poi_specs.empty()) os << "(none)\n";
  for (const auto& c : poi_specs) os << "- " << c.text() << "\n";
  os << "\n## Selected variant " << chosen.id << " (" << chosen.operator_id << ")\n```diff\n"
     << unified_diff(original, chosen.code, "original", "variant") << "```\nFull variant:\n```c\n" << chosen.code
     << (chosen.code.empty() || chosen.code.back() == '\n' ? "" : "\n") << "```\n";

  // Bounded extra context: two more undistinguished diffs, three refuted summaries.
  std::size_t shown = 0;
  for (std::size_t k = 1; k < undistinguished.size() && shown < 2; ++k, ++shown) {
    const Variant& v = undistinguished[(pick + k) % undistinguished.size()];
    if (shown == 0) os << "\n## Other variants that are not yet told apart\n";
    os << "```diff\n" << unified_diff(original, v.code, "original", "variant " + std::to_string(v.id)) << "```\n";
  }
  std::size_t refuted_shown = 0;
  for (const auto& o : report.outcomes) {
    if (!o.refuted || refuted_shown == 3) continue;
    if (refuted_shown++ == 0) os << "\n## Variants already told apart\n";
    os << "- variant " << o.variant_id << " (" << o.operator_id << "): " << o.diagnostic << "\n";
  }
  os << "\n## Task\nCompare the original and the selected variant, both in their syntax and in what they compute. "
        "Propose additional clauses for the same point that are true of the original segment but false of the "
        "variant, so that verifying the variant against them fails. Reply with one clause per line inside a "
        "single ``` fence.";

  Prompt next = conversation;
  next.purpose = Purpose::Refine;
  next.turns.push_back({"user", os.str()});
  return next;
}

RefinementResult refine_poi_specs(UnitState& unit, std::size_t seg_id, std::size_t poi_index,
                                  const Prompt& conversation, ModelClient& model, const Verifier& verifier,
                                  VariantSource& mutator, const RunConfig& cfg, EventLog* log) {
  RefinementResult res;
  std::vector<Variant> current;

  auto measure = [&](int round) {
    try {
      current = mutator.variants(unit, seg_id, poi_index, round);
      if (current.empty()) throw EmptyVariantSet("every variant was equivalent or failed to compile");
    } catch (const NoApplicableSites& e) {
      res.skipped = true;
      res.skip_reason = e.kind() + ": " + e.what();
      return false;
    } catch (const EmptyVariantSet& e) {
      res.skipped = true;
      res.skip_reason = e.kind() + ": " + e.what();
      return false;
    }
    SpecSet checked = unit.verified(seg_id, poi_index);
    VdrReport r = compute_vdr(unit, seg_id, checked, others_at_segment(unit, seg_id, poi_index), current, verifier,
                              round);
    for (const auto& o : r.outcomes)
      emit(log, "variant", {{"segment", seg_id}, {"poi", poi_index}, {"round", round}, {"variant", o.variant_id},
                            {"operator", o.operator_id}, {"refuted", o.refuted}});
    emit(log, "vdr_round", {{"segment", seg_id}, {"poi", poi_index}, {"round", round}, {"total", r.total},
                            {"refuted", r.refuted}, {"rate", r.rate}});
    std::vector<std::uint64_t> ids;
    for (const auto& c : checked) ids.push_back(c.id);
    res.snapshots.push_back(std::move(ids));
    res.history.push_back(std::move(r));
    return true;
  };

  int round = 1;
  if (!measure(round)) return res;
  Prompt conv = conversation;
  while (!meets_threshold(res.history.back(), cfg.t) && round < cfg.n_refine) {
    const VdrReport& last = res.history.back();
    std::vector<Variant> undist;
    for (const auto& v : current)
      if (std::find(last.undistinguished.begin(), last.undistinguished.end(), v.id) != last.undistinguished.end())
        undist.push_back(v);
    Prompt ctx = assemble_refine_context(conv, undist, unit.at(seg_id).seg.code, unit.verified(seg_id, poi_index),
                                         last, mix_seed({cfg.seed, seg_id, poi_index, static_cast<std::uint64_t>(round)}));
    ++round;
    PoiGeneration g = generate_poi_specs(unit, seg_id, poi_index, ctx, model, verifier, cfg, ClauseOrigin::Refined,
                                         round, log);
    res.model_calls += g.calls;
    conv = g.conversation;
    if (!measure(round)) break;
  }
  return res;
}

}  // namespace specsyn
