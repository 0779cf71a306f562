#pragma once

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "theoria/error.hpp"
#include "theoria/workspace.hpp"

namespace theoria::testing {

inline std::string fixture_dir() {
  if (const char* p = std::getenv("THEORIA_FIXTURES")) return p;
  return "tests/fixtures";
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open fixture '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// The shared desk fixtures: LP, TA, TB, L1, L2, f, SPAN, DTA, DFALSE.
inline const Workspace& desk() {
  static Workspace ws = parse_workspace(read_file(fixture_dir() + "/desk.iff"));
  return ws;
}

}  // namespace theoria::testing
