#pragma once

// Hand-rolled random generators shared by unit and acceptance tests.

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "specsyn/segmentation.hpp"

namespace gen {

inline std::size_t below(std::mt19937_64& rng, std::size_t n) { return n == 0 ? 0 : rng() % n; }

/// Random digraph on `n` nodes with edge probability ~p (self-loops allowed).
inline specsyn::DependencyGraph random_digraph(std::mt19937_64& rng, std::size_t n, double p) {
  specsyn::DependencyGraph g;
  for (std::size_t i = 0; i < n; ++i) g.nodes.push_back(i);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (static_cast<double>(rng() % 1000) / 1000.0 < p) g.edges.insert({a, b});
  return g;
}

/// Reachability closure by Floyd-Warshall; reach[a][b] iff a path of length >= 0.
inline std::vector<std::vector<bool>> reachability(const specsyn::DependencyGraph& g) {
  std::size_t n = g.nodes.size();
  std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) r[i][i] = true;
  for (auto [a, b] : g.edges) r[a][b] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (r[i][k] && r[k][j]) r[i][j] = true;
  return r;
}

/// Partition into mutual-reachability classes, each sorted, classes sorted.
inline std::set<std::vector<std::size_t>> brute_force_sccs(const specsyn::DependencyGraph& g) {
  auto r = reachability(g);
  std::size_t n = g.nodes.size();
  std::set<std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> cls;
    for (std::size_t j = 0; j < n; ++j)
      if (r[i][j] && r[j][i]) cls.push_back(j);
    out.insert(cls);
  }
  return out;
}

/// Random C function nest: loops up to `max_depth` deep mixed with plain
/// statements. Returns source text of one function named `name`.
inline void emit_body(std::mt19937_64& rng, std::string& out, int depth, int max_depth, int& counter) {
  std::size_t n = 1 + below(rng, 3);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pick = below(rng, depth < max_depth ? 6 : 2);
    std::string v = "v" + std::to_string(counter++);
    switch (pick) {
      case 0: out += "s = s + " + std::to_string(below(rng, 5)) + ";\n"; break;
      case 1: out += "if (s > 3) { s = s - 1; } else { s = s + 2; }\n"; break;
      case 2:
        out += "for (int " + v + " = 0; " + v + " < n; " + v + "++) {\n";
        emit_body(rng, out, depth + 1, max_depth, counter);
        out += "}\n";
        break;
      case 3:
        out += "{ int " + v + " = n; while (" + v + " > 0) {\n";
        emit_body(rng, out, depth + 1, max_depth, counter);
        out += v + "--; } }\n";
        break;
      case 4:
        out += "{ int " + v + " = 0; do {\n";
        emit_body(rng, out, depth + 1, max_depth, counter);
        out += v + "++; } while (" + v + " < n); }\n";
        break;
      default:
        out += "if (n > 2) {\n";
        emit_body(rng, out, depth + 1, max_depth, counter);
        out += "}\n";
        break;
    }
  }
}

inline std::string random_function(std::mt19937_64& rng, const std::string& name, int max_depth) {
  std::string out = "int " + name + "(int n) {\nint s = 0;\n";
  int counter = 0;
  emit_body(rng, out, 0, max_depth, counter);
  out += "return s;\n}\n";
  return out;
}

}  // namespace gen
