#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#ifndef SYNCOMP_FIXTURE_DIR
#error "SYNCOMP_FIXTURE_DIR must point at tests/fixtures"
#endif

namespace fixtures {

inline std::string path(const std::string& name) {
  return std::string(SYNCOMP_FIXTURE_DIR) + "/" + name;
}

inline std::string read(const std::string& name) {
  std::ifstream in(path(name), std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace fixtures
