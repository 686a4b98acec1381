#include <stdlib.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>

#include "specsyn/error.hpp"
#include "specsyn/io.hpp"
#include "specsyn/mutation.hpp"
#include "specsyn/verifier.hpp"

namespace specsyn {

namespace fs = std::filesystem;

std::string Toolchain::describe() const {
  std::string s = cc;
  for (const auto& f : flags) s += " " + f;
  return s + " -c -x c";
}

namespace {

/// Scratch directory removed on scope exit.
class TempDir {
 public:
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "specsyn-tce-XXXXXX").string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    if (!mkdtemp(buf.data())) throw IoError("cannot create temporary directory");
    path_ = buf.data();
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

/// Object bytes of `source`, or nullopt when compilation fails. Every unit is
/// compiled under the same file name so embedded names cannot differ.
std::optional<std::string> compile_object(const std::string& source, const Toolchain& tc) {
  TempDir dir;
  fs::path src = dir.path() / "unit.c";
  fs::path obj = dir.path() / "unit.o";
  {
    std::ofstream o(src, std::ios::binary);
    o << source;
    if (!o) throw IoError("cannot write " + src.string());
  }
  std::string cmd = tc.cc;
  for (const auto& f : tc.flags) cmd += " " + shell_quote(f);
  cmd += " -c -x c " + shell_quote(src.string()) + " -o " + shell_quote(obj.string());
  ProcessResult r = run_command(cmd, tc.timeout_seconds);
  if (r.exit_code == 127) throw ToolchainMissing("compiler not found: " + tc.cc);
  if (r.timed_out || r.exit_code != 0 || !fs::exists(obj)) return std::nullopt;
  return read_text_file(obj.string());
}

Equivalence compare(const std::optional<std::string>& original_obj, const std::string& variant_source,
                    const Toolchain& tc) {
  auto v = compile_object(variant_source, tc);
  if (!v) return Equivalence::CompileFailed;
  return *v == *original_obj ? Equivalence::Equivalent : Equivalence::NonEquivalent;
}

}  // namespace

bool toolchain_usable(const Toolchain& toolchain) {
  try {
    return compile_object("int specsyn_probe(void) { return 0; }\n", toolchain).has_value();
  } catch (const ToolchainMissing&) {
    return false;
  }
}

Equivalence tce_classify(const std::string& original, const Variant& variant, const Toolchain& toolchain,
                         const std::string& prefix) {
  if (variant.code == original) return Equivalence::Equivalent;
  auto base = compile_object(prefix + original, toolchain);
  if (!base) throw ToolchainMissing("original does not compile with " + toolchain.describe());
  return compare(base, prefix + variant.code, toolchain);
}

std::vector<Variant> classify_variants(std::vector<Variant> variants, const std::string& original,
                                       const Toolchain& toolchain, const std::string& prefix, TceSummary* summary) {
  TceSummary local;
  TceSummary& sum = summary ? *summary : local;
  auto fallback = [&](const std::string& why) {
    if (!toolchain.fallback_when_missing) throw ToolchainMissing(why);
    sum.fallback_used = true;
    sum.warnings.push_back("TCE disabled (" + why + "); variants treated as non-equivalent");
    for (auto& v : variants)
      if (v.equivalence == Equivalence::Unknown) v.equivalence = v.code == original ? Equivalence::Equivalent : Equivalence::NonEquivalent;
  };

  bool pending = std::any_of(variants.begin(), variants.end(),
                             [](const Variant& v) { return v.equivalence == Equivalence::Unknown; });
  if (pending) {
    std::optional<std::string> base;
    try {
      base = compile_object(prefix + original, toolchain);
      if (!base) throw ToolchainMissing("original does not compile with " + toolchain.describe());
    } catch (const ToolchainMissing& e) {
      fallback(e.what());
    }
    if (base) {
      std::vector<std::future<Equivalence>> jobs(variants.size());
      for (std::size_t i = 0; i < variants.size(); ++i) {
        if (variants[i].equivalence != Equivalence::Unknown) continue;
        if (variants[i].code == original) {
          variants[i].equivalence = Equivalence::Equivalent;
          continue;
        }
        std::string src = prefix + variants[i].code;
        jobs[i] = std::async(std::launch::async, [&base, src, &toolchain] { return compare(base, src, toolchain); });
      }
      for (std::size_t i = 0; i < variants.size(); ++i)
        if (jobs[i].valid()) variants[i].equivalence = jobs[i].get();
    }
  }

  for (const auto& v : variants) {
    switch (v.equivalence) {
      case Equivalence::Equivalent: ++sum.equivalent; break;
      case Equivalence::CompileFailed: ++sum.compile_failed; break;
      case Equivalence::NonEquivalent: ++sum.kept; break;
      case Equivalence::Unknown: break;
    }
  }
  return variants;
}

std::vector<Variant> filter_non_equivalent(std::vector<Variant> variants, const std::string& original,
                                           const Toolchain& toolchain, const std::string& prefix,
                                           TceSummary* summary) {
  TceSummary local;
  TceSummary& sum = summary ? *summary : local;
  variants = classify_variants(std::move(variants), original, toolchain, prefix, &sum);
  std::vector<Variant> kept;
  for (auto& v : variants)
    if (v.equivalence == Equivalence::NonEquivalent) kept.push_back(std::move(v));
  return kept;
}

}  // namespace specsyn
