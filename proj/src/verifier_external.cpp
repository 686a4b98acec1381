#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include "specsyn/error.hpp"
#include "specsyn/verifier.hpp"

namespace specsyn {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out.push_back(c);
  }
  return out + "'";
}

ProcessResult run_command(const std::string& command, int timeout_seconds) {
  int fds[2];
  if (pipe(fds) != 0) throw IoError("pipe failed");
  pid_t pid = fork();
  if (pid < 0) throw IoError("fork failed");
  if (pid == 0) {
    setpgid(0, 0);
    dup2(fds[1], STDOUT_FILENO);
    dup2(fds[1], STDERR_FILENO);
    close(fds[0]);
    close(fds[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(fds[1]);
  ProcessResult res;
  auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(timeout_seconds);
  char buf[4096];
  while (true) {
    int wait_ms = -1;
    if (timeout_seconds > 0) {
      auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) {
        res.timed_out = true;
        kill(-pid, SIGKILL);
        break;
      }
      wait_ms = static_cast<int>(left.count());
    }
    pollfd p{fds[0], POLLIN, 0};
    int r = poll(&p, 1, wait_ms);
    if (r < 0 && errno == EINTR) continue;
    if (r == 0) continue;
    ssize_t n = read(fds[0], buf, sizeof buf);
    if (n <= 0) break;
    res.output.append(buf, static_cast<std::size_t>(n));
  }
  close(fds[0]);
  int status = 0;
  waitpid(pid, &status, 0);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

namespace {

/// True when `label` occurs in `text` not followed by another digit.
bool mentions(const std::string& text, const std::string& label) {
  for (std::size_t pos = text.find(label); pos != std::string::npos; pos = text.find(label, pos + 1)) {
    std::size_t end = pos + label.size();
    if (end >= text.size() || !std::isdigit(static_cast<unsigned char>(text[end]))) return true;
  }
  return false;
}

std::size_t line_of(const std::string& text, std::size_t offset) {
  return static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n')) + 1;
}

}  // namespace

std::vector<VerifierVerdict> FramaCVerifier::parse_output(const std::string& output, const InstrumentedSource& program,
                                                          const SpecSet& checked) const {
  std::regex goal_re(cfg_.goal_regex);
  std::regex summary_re(cfg_.summary_regex);
  std::regex error_re(R"(^\[kernel(?::[\w-]+)?\][^:]*?:(\d+):\s*(.*)$)");

  struct Failure {
    std::string goal;
    VerdictStatus status;
    std::string line;
  };
  std::vector<Failure> failures;
  std::map<std::size_t, std::string> error_lines;
  bool summary = false;
  std::istringstream in(output);
  std::string line;
  while (std::getline(in, line)) {
    std::smatch m;
    if (std::regex_search(line, m, summary_re)) {
      summary = true;
      continue;
    }
    if (std::regex_search(line, m, goal_re)) {
      std::string st = m[1].str();
      if (st == "Valid") continue;
      failures.push_back({m[2].str(), st == "Timeout" ? VerdictStatus::Timeout : VerdictStatus::Unproved, line});
      continue;
    }
    if (std::regex_search(line, m, error_re)) {
      std::string msg = m[2].str();
      if (line.find("annot") != std::string::npos || line.find("rror") != std::string::npos)
        error_lines[static_cast<std::size_t>(std::stoul(m[1].str()))] = line;
    }
  }

  std::vector<VerifierVerdict> out;
  for (const auto& c : checked) {
    VerifierVerdict v;
    v.clause_id = c.id;
    auto lit = program.clause_labels.find(c.id);
    if (lit == program.clause_labels.end()) {
      v.status = VerdictStatus::Invalid;
      v.diagnostic = "clause has no label in the program text";
      out.push_back(v);
      continue;
    }
    const std::string& label = lit->second;
    v.goal_name = label;
    std::size_t pos = program.text.find(label + ":");
    if (pos != std::string::npos) {
      auto err = error_lines.find(line_of(program.text, pos));
      if (err != error_lines.end()) {
        v.status = VerdictStatus::Invalid;
        v.diagnostic = err->second;
        out.push_back(v);
        continue;
      }
    }
    bool failed = false;
    for (const auto& f : failures) {
      if (!mentions(f.goal, label)) continue;
      failed = true;
      if (v.status != VerdictStatus::Unproved) v.status = f.status;
      v.goal_name = f.goal;
      v.diagnostic = f.line;
      if (f.status == VerdictStatus::Unproved) break;
    }
    if (!failed) {
      if (!summary) {
        if (error_lines.empty())
          throw MalformedOutput("verifier output has no 'Proved goals' summary");
        v.status = VerdictStatus::Unproved;
        v.diagnostic = "verification aborted by annotation errors";
      } else {
        v.status = VerdictStatus::Proved;
      }
    }
    out.push_back(v);
  }
  return out;
}

std::vector<VerifierVerdict> FramaCVerifier::verify(const InstrumentedSource& program, const SpecSet& checked) const {
  if (checked.empty()) return {};
  namespace fs = std::filesystem;
  std::string tmpl = (fs::temp_directory_path() / "specsyn-wp-XXXXXX").string();
  std::vector<char> buf(tmpl.begin(), tmpl.end());
  buf.push_back('\0');
  if (!mkdtemp(buf.data())) throw IoError("cannot create temporary directory");
  fs::path dir(buf.data());
  fs::path file = dir / "specsyn_input.c";
  {
    std::ofstream o(file, std::ios::binary);
    o << program.text;
    if (!o) throw IoError("cannot write " + file.string());
  }
  std::string cmd = cfg_.command_template;
  auto replace = [&](const std::string& key, const std::string& val) {
    for (std::size_t p = cmd.find(key); p != std::string::npos; p = cmd.find(key, p + val.size()))
      cmd.replace(p, key.size(), val);
  };
  replace("{timeout}", std::to_string(cfg_.timeout_seconds));
  replace("{file}", shell_quote(file.string()));
  int wall = cfg_.timeout_seconds > 0 ? cfg_.timeout_seconds * static_cast<int>(checked.size() + 2) + 30 : 0;
  ProcessResult res = run_command(cmd, wall);
  std::error_code ec;
  fs::remove_all(dir, ec);
  if (res.exit_code == 127) throw BackendUnavailable("verifier command not found: " + cmd);
  if (res.timed_out) {
    std::vector<VerifierVerdict> out;
    for (const auto& c : checked) {
      VerifierVerdict v;
      v.clause_id = c.id;
      v.status = VerdictStatus::Timeout;
      v.diagnostic = "verifier process exceeded its time limit";
      auto it = program.clause_labels.find(c.id);
      if (it != program.clause_labels.end()) v.goal_name = it->second;
      out.push_back(v);
    }
    return out;
  }
  return parse_output(res.output, program, checked);
}

}  // namespace specsyn
