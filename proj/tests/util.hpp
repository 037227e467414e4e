#pragma once

#include <fstream>
#include <sstream>
#include <string>

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

#ifdef PDCFA_BENCH_DIR
inline std::string bench(const std::string& name) { return slurp(std::string(PDCFA_BENCH_DIR) + "/" + name + ".scm"); }
#endif
