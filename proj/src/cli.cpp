#include "specsyn/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>

#include "specsyn/config.hpp"
#include "specsyn/error.hpp"
#include "specsyn/eval.hpp"
#include "specsyn/event_log.hpp"
#include "specsyn/io.hpp"
#include "specsyn/refinement.hpp"
#include "specsyn/report.hpp"
#include "specsyn/synthesis.hpp"

namespace specsyn {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

/// Bad invocation: unreadable input, missing option value.
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& msg) : Error("UsageError", msg) {}
};

std::string read_input(const std::string& path, const std::string& role) {
  std::error_code ec;
  if (path.empty() || !fs::is_regular_file(path, ec)) throw UsageError(role + " file not found: " + path);
  try {
    return read_text_file(path);
  } catch (const IoError& e) {
    throw UsageError(e.what());
  }
}

/// "-" writes to `out`; anything else is written atomically.
void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path == "-") out << content;
  else write_file_atomic(path, content);
}

/// Options shared by the subcommands that need a configuration.
struct ConfigOptions {
  std::string file;
  std::vector<std::string> sets;
  std::optional<double> t;
  std::optional<int> n_refine;
  std::optional<int> n_repair;
  std::optional<int> budget;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App* sub, bool pipeline_knobs) {
    sub->add_option("--config", file, "configuration file");
    sub->add_option("--set", sets, "override a configuration key (key=value)");
    sub->add_option("--budget", budget, "mutants per segment");
    sub->add_option("--seed", seed, "random seed");
    if (!pipeline_knobs) return;
    sub->add_option("--t", t, "VDR threshold in (0, 1]");
    sub->add_option("--n-refine", n_refine, "refinement rounds per POI");
    sub->add_option("--n-repair", n_repair, "model calls per generation");
  }

  RunConfig load(const std::map<std::string, std::string>& env, std::map<std::string, std::string> flags) const {
    for (const auto& s : sets) {
      auto eq = s.find('=');
      if (eq == std::string::npos || eq == 0) throw UsageError("--set expects key=value, got '" + s + "'");
      flags[s.substr(0, eq)] = s.substr(eq + 1);
    }
    // Dedicated flags beat --set.
    if (t) flags["t"] = std::to_string(*t);
    if (n_refine) flags["n_refine"] = std::to_string(*n_refine);
    if (n_repair) flags["n_repair"] = std::to_string(*n_repair);
    if (budget) flags["mutation_budget"] = std::to_string(*budget);
    if (seed) flags["seed"] = std::to_string(*seed);
    std::optional<std::string> path;
    if (!file.empty()) {
      std::error_code ec;
      if (!fs::is_regular_file(file, ec)) throw UsageError("config file not found: " + file);
      path = file;
    }
    return load_config(path, env, flags);
  }
};

std::unique_ptr<Verifier> make_verifier(const RunConfig& cfg) {
  if (cfg.verifier_backend == "frama-c") return std::make_unique<FramaCVerifier>(cfg.external);
  return std::make_unique<MockVerifier>(cfg.mock);
}

/// Whole unit with segment `seg_id` replaced by `code`, in segment order.
std::string unit_with(const UnitState& unit, std::size_t seg_id, const std::string& code) {
  std::string out;
  for (const auto& st : unit.segments) {
    if (!out.empty()) out += "\n";
    out += st.seg.id == seg_id ? code : st.seg.code;
  }
  return out;
}

json verdict_json(const UnitState& unit, const SpecSet& checked, const VerifierVerdict& v) {
  json j = {{"clause", v.clause_id}, {"status", std::string(to_string(v.status))}, {"diagnostic", v.diagnostic}};
  if (const SpecClause* c = checked.find(v.clause_id)) j["spec"] = clause_json(unit, *c);
  return j;
}

// ---------------------------------------------------------------------------

int cmd_segment(const std::string& input, const std::string& out_path, std::ostream& out) {
  std::string text = read_input(input, "input");
  UnitState unit = UnitState::from_source({input, text, true});
  emit(out_path, dump_json(segments_json(unit)), out);
  return kExitOk;
}

struct SynthesizeOptions {
  std::string input, out = "report.json", annotated, replay, record, log;
  bool deterministic = false;
};

int cmd_synthesize(const SynthesizeOptions& o, const ConfigOptions& co, const std::map<std::string, std::string>& env,
                   std::ostream& err) {
  std::string text = read_input(o.input, "input");
  std::map<std::string, std::string> flags;
  if (!o.replay.empty()) {
    read_input(o.replay, "transcript");
    flags["model.backend"] = "replay";
  }
  RunConfig cfg = co.load(env, flags);
  if (cfg.model_backend == "replay" && o.replay.empty())
    throw ConfigError("model.backend", "replay backend needs --replay <transcript>");

  std::shared_ptr<ModelBackend> backend;
  if (cfg.model_backend == "replay") backend = ReplayBackend::from_file(o.replay);
  else backend = std::make_shared<LiveBackend>(cfg.model);
  ModelClient model(backend);
  auto verifier = make_verifier(cfg);
  CatalogMutator mutator(static_cast<std::size_t>(cfg.mutation_budget), cfg.seed, cfg.toolchain);
  EventLog log(o.deterministic);

  ReportMeta meta;
  meta.input = o.deterministic ? fs::path(o.input).filename().string() : o.input;
  meta.model_backend = backend->name();
  meta.verifier = verifier->name();
  meta.deterministic = o.deterministic;
  auto start = std::chrono::steady_clock::now();
  auto finish_meta = [&] {
    meta.model_calls = model.calls();
    meta.elapsed_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  };
  auto side_outputs = [&] {
    if (!o.record.empty()) record_transcript(model.session(), o.record);
    if (!o.log.empty()) write_file_atomic(o.log, log.to_jsonl());
  };

  std::optional<UnitState> unit;
  try {
    unit = UnitState::from_source({o.input, text, true});
    SynthesisResult res = synthesize_program(*unit, model, *verifier, mutator, cfg, &log);
    finish_meta();
    write_file_atomic(o.out, dump_json(synthesis_report(*unit, res, cfg, meta)));
    if (!o.annotated.empty()) write_file_atomic(o.annotated, unit->annotated_unit(true).text);
    side_outputs();
    for (const auto& w : res.warnings) err << "warning: " << w << "\n";
    return kExitOk;
  } catch (const Error& e) {
    finish_meta();
    try {
      write_file_atomic(o.out, dump_json(partial_report(unit ? &*unit : nullptr, cfg, meta, e.kind(), e.what())));
      side_outputs();
    } catch (const Error& inner) {
      err << "error: could not write partial report: " << inner.what() << "\n";
    }
    throw;
  }
}

struct MutateOptions {
  std::string input, out = "variants";
  std::optional<std::size_t> segment;
};

int cmd_mutate(const MutateOptions& o, const ConfigOptions& co, const std::map<std::string, std::string>& env,
               std::ostream& err) {
  std::string text = read_input(o.input, "input");
  RunConfig cfg = co.load(env, {});
  UnitState unit = UnitState::from_source({o.input, text, true});
  if (o.segment && *o.segment >= unit.segments.size())
    throw UsageError("no segment " + std::to_string(*o.segment));
  fs::create_directories(o.out);

  CatalogMutator seeds(static_cast<std::size_t>(cfg.mutation_budget), cfg.seed, cfg.toolchain);
  json segs = json::array(), files = json::array();
  for (const auto& st : unit.segments) {
    if (o.segment && st.seg.id != *o.segment) continue;
    json s = {{"id", st.seg.id}, {"members", st.seg.member_names}};
    std::uint64_t seed = seeds.round_seed(st.seg.id, 0, 1);
    s["seed"] = seed;
    try {
      auto vs = generate_variants(st.seg, static_cast<std::size_t>(cfg.mutation_budget), seed, st.ctx);
      TceSummary summary;
      vs = classify_variants(std::move(vs), st.seg.code, cfg.toolchain, unit.dependency_text(st.seg.id, false),
                             &summary);
      for (const auto& w : summary.warnings) err << "warning: " << w << "\n";
      s["equivalent"] = summary.equivalent;
      s["compile_failed"] = summary.compile_failed;
      s["kept"] = summary.kept;
      s["tce_fallback"] = summary.fallback_used;
      for (const auto& v : vs) {
        std::string name = "seg" + std::to_string(st.seg.id) + "_v" + std::to_string(v.id) + ".c";
        write_file_atomic((fs::path(o.out) / name).string(), unit_with(unit, st.seg.id, v.code));
        files.push_back({{"file", name},
                         {"segment", st.seg.id},
                         {"variant", v.id},
                         {"operator", v.operator_id},
                         {"category", std::string(to_string(v.category))},
                         {"site", v.site},
                         {"equivalence", std::string(to_string(v.equivalence))}});
      }
    } catch (const NoApplicableSites& e) {
      s["error"] = {{"kind", e.kind()}, {"message", e.what()}};
    }
    segs.push_back(s);
  }
  json index = {{"format", "specsyn-variants"},
                {"version", 1},
                {"input", fs::path(o.input).filename().string()},
                {"budget", cfg.mutation_budget},
                {"seed", cfg.seed},
                {"toolchain", cfg.toolchain.describe()},
                {"segments", segs},
                {"variants", files}};
  write_file_atomic((fs::path(o.out) / "index.json").string(), dump_json(index));
  return kExitOk;
}

int cmd_vdr(const std::string& input, const std::string& out_path, const ConfigOptions& co,
            const std::map<std::string, std::string>& env, std::ostream& out, std::ostream& err) {
  std::string text = read_input(input, "input");
  RunConfig cfg = co.load(env, {});
  UnitState unit = UnitState::from_annotated({input, text, true});
  auto verifier = make_verifier(cfg);
  CatalogMutator mutator(static_cast<std::size_t>(cfg.mutation_budget), cfg.seed, cfg.toolchain);

  json segs = json::array();
  std::size_t total = 0, refuted = 0;
  for (auto& st : unit.segments) {
    SpecSet clauses = unit.verified(st.seg.id);
    if (clauses.empty()) continue;
    json s = {{"id", st.seg.id}, {"members", st.seg.member_names}};
    // Clauses that fail on the original would refute every variant.
    CheckProgram prog = unit.program(st.seg.id, st.seg.code, {}, clauses);
    json unproved = json::array();
    for (const auto& v : verifier->verify(prog.source, prog.checked)) {
      if (!is_refuted(v.status)) continue;
      if (const SpecClause* c = clauses.find(v.clause_id)) unproved.push_back(c->text());
      st.specs.set_status(v.clause_id, ClauseStatus::Refuted);
    }
    SpecSet kept = unit.verified(st.seg.id);
    s["clauses"] = kept.size();
    s["unproved_on_original"] = unproved;
    try {
      if (kept.empty()) throw EmptyVariantSet("no clause holds on the original");
      auto vs = mutator.variants(unit, st.seg.id, 0, 1);
      for (const auto& w : mutator.last_summary().warnings) err << "warning: " << w << "\n";
      VdrReport r = compute_vdr(unit, st.seg.id, kept, {}, vs, *verifier, 1);
      total += r.total;
      refuted += r.refuted;
      s["vdr"] = vdr_json(r);
    } catch (const NoApplicableSites& e) {
      s["error"] = {{"kind", e.kind()}, {"message", e.what()}};
    } catch (const EmptyVariantSet& e) {
      s["error"] = {{"kind", e.kind()}, {"message", e.what()}};
    }
    segs.push_back(s);
  }
  double rate = total ? static_cast<double>(refuted) / static_cast<double>(total) : 0.0;
  json report = {{"format", "specsyn-vdr"},
                 {"version", 1},
                 {"input", fs::path(input).filename().string()},
                 {"budget", cfg.mutation_budget},
                 {"seed", cfg.seed},
                 {"t", cfg.t},
                 {"total", total},
                 {"refuted", refuted},
                 {"rate", rate},
                 {"objective", total - refuted},
                 {"meets_threshold", total > 0 && rate >= cfg.t},
                 {"segments", segs}};
  emit(out_path, dump_json(report), out);
  return kExitOk;
}

int cmd_verify(const std::string& input, const std::string& out_path, const ConfigOptions& co,
               const std::map<std::string, std::string>& env, std::ostream& out) {
  std::string text = read_input(input, "input");
  RunConfig cfg = co.load(env, {});
  UnitState unit = UnitState::from_annotated({input, text, true});
  auto verifier = make_verifier(cfg);
  SpecSet checked = unit.all_specs();
  json verdicts = json::array();
  std::size_t proved = 0;
  for (const auto& v : verifier->verify(unit.annotated_unit(true), checked)) {
    if (!is_refuted(v.status)) ++proved;
    verdicts.push_back(verdict_json(unit, checked, v));
  }
  json report = {{"format", "specsyn-verify"},
                 {"version", 1},
                 {"input", fs::path(input).filename().string()},
                 {"verifier", verifier->name()},
                 {"total", checked.size()},
                 {"proved", proved},
                 {"verdicts", verdicts}};
  emit(out_path, dump_json(report), out);
  return kExitOk;
}

struct EvalOptions {
  std::string subject, ground_truth, generated, out = "metrics.json";
};

int cmd_eval(const EvalOptions& o, const ConfigOptions& co, const std::map<std::string, std::string>& env,
             std::ostream& out) {
  std::string subject = read_input(o.subject, "subject");
  std::string gt = read_input(o.ground_truth, "ground-truth");
  std::string generated = read_input(o.generated, "generated report");
  RunConfig cfg = co.load(env, {});
  json report;
  try {
    report = json::parse(generated);
  } catch (const json::exception& e) {
    throw MalformedOutput(std::string("generated report is not JSON: ") + e.what());
  }
  auto verifier = make_verifier(cfg);
  emit(o.out, dump_json(metrics_json(evaluate(subject, gt, report, *verifier))), out);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const std::map<std::string, std::string>& env) {
  CLI::App app{"Specification synthesis for C programs", "specsyn"};
  app.require_subcommand(1);

  std::string seg_input, seg_out = "segments.json";
  auto* seg = app.add_subcommand("segment", "split a unit into segments and list its points of interest");
  seg->add_option("--input", seg_input, "C source")->required();
  seg->add_option("--out", seg_out, "output path, - for stdout");

  SynthesizeOptions so;
  ConfigOptions so_cfg;
  auto* syn = app.add_subcommand("synthesize", "synthesize and verify specifications");
  syn->add_option("--input", so.input, "C source")->required();
  syn->add_option("--out", so.out, "report path");
  syn->add_option("--emit-annotated", so.annotated, "annotated source path");
  auto* replay = syn->add_option("--replay", so.replay, "serve model responses from a transcript");
  syn->add_option("--record", so.record, "record the model transcript")->excludes(replay);
  syn->add_option("--log", so.log, "event log path (JSON Lines)");
  syn->add_flag("--deterministic", so.deterministic, "byte-identical reports");
  so_cfg.attach(syn, true);

  MutateOptions mo;
  ConfigOptions mo_cfg;
  auto* mut = app.add_subcommand("mutate", "write mutated variants of each segment");
  mut->add_option("--input", mo.input, "C source")->required();
  mut->add_option("--out", mo.out, "output directory");
  mut->add_option("--segment", mo.segment, "only this segment");
  mo_cfg.attach(mut, false);

  std::string vdr_input, vdr_out = "-";
  ConfigOptions vdr_cfg;
  auto* vdr = app.add_subcommand("vdr", "variant distinction rate of an annotated unit");
  vdr->add_option("--input", vdr_input, "annotated C source")->required();
  vdr->add_option("--out", vdr_out, "output path, - for stdout");
  vdr_cfg.attach(vdr, false);
  vdr->add_option("--t", vdr_cfg.t, "threshold in (0, 1]");

  EvalOptions eo;
  ConfigOptions eo_cfg;
  auto* ev = app.add_subcommand("eval", "precision and recall against a ground truth");
  ev->add_option("--subject", eo.subject, "C source")->required();
  ev->add_option("--ground-truth", eo.ground_truth, "annotated reference source")->required();
  ev->add_option("--generated", eo.generated, "synthesis report")->required();
  ev->add_option("--out", eo.out, "output path, - for stdout");
  eo_cfg.attach(ev, false);

  std::string ver_input, ver_out = "-";
  ConfigOptions ver_cfg;
  auto* ver = app.add_subcommand("verify", "verify every clause of an annotated unit");
  ver->add_option("--input", ver_input, "annotated C source")->required();
  ver->add_option("--out", ver_out, "output path, - for stdout");
  ver_cfg.attach(ver, false);

  std::vector<std::string> argv_store{"specsyn"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (seg->parsed()) return cmd_segment(seg_input, seg_out, out);
    if (syn->parsed()) return cmd_synthesize(so, so_cfg, env, err);
    if (mut->parsed()) return cmd_mutate(mo, mo_cfg, env, err);
    if (vdr->parsed()) return cmd_vdr(vdr_input, vdr_out, vdr_cfg, env, out, err);
    if (ev->parsed()) return cmd_eval(eo, eo_cfg, env, out);
    if (ver->parsed()) return cmd_verify(ver_input, ver_out, ver_cfg, env, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.kind() << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.kind() << ": " << e.what() << "\n";
    return kExitPipeline;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitPipeline;
  }
  return kExitUsage;
}

}  // namespace specsyn
