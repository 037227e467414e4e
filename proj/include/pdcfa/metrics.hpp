#pragma once

// Precision metrics and serialization of analysis results.

#include <cstddef>
#include <string>
#include <vector>

#include "pdcfa/analyses.hpp"

namespace pdcfa {

struct SingletonTable {
  struct Row {
    Var var;
    std::size_t values = 0;  // distinct abstract values over all reached stores
  };
  std::vector<Row> rows;  // one per binder, in binder order
  std::size_t singletons = 0;
};

SingletonTable singleton_count(const Session& s, const AnalysisResult& r);

std::string_view gc_mode(AnalysisKind k);  // "none" | "precise" | "approx"

struct Metrics {
  std::string program;
  AnalysisKind kind = AnalysisKind::Plain;
  unsigned k = 0;
  std::size_t control_states = 0;
  std::size_t edges = 0;
  std::size_t singleton_vars = 0;
  std::size_t variables_total = 0;
  double wall_time_ms = 0;
  bool saturated = true;
};

Metrics measure(const Session& s, const AnalysisResult& r, std::string program, unsigned k);

std::string summary_line(const Metrics& m);
std::string summary_header();

std::string to_json(const Metrics& m);
std::string to_json(const Session& s, const AnalysisResult& r, const Metrics& m);
std::string to_dot(const Session& s, const AnalysisResult& r);

struct BenchmarkEntry {
  std::string name;
  std::string path;
  std::size_t fuel = concrete::kDefaultFuel;
  std::vector<std::string> tags;
};

/// The bundled corpus, with paths relative to `dir`.
std::vector<BenchmarkEntry> benchmark_corpus(const std::string& dir);

}  // namespace pdcfa
