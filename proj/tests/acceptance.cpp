#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>

#include "qmpc/harness.hpp"

using namespace qmpc;

int main(int argc, char** argv) {
  int id = 0;
  uint64_t seed = 20240611;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--criterion") && i + 1 < argc) {
      id = std::atoi(argv[++i]);
    } else if (!std::strcmp(argv[i], "--seed") && i + 1 < argc) {
      seed = std::strtoull(argv[++i], nullptr, 10);
    }
  }
  bool all = id == 0;
  int failed = 0;
  for (const Criterion& c : criteria()) {
    if (!all && c.id != id) continue;
    bool pass = false;
    std::string detail;
    try {
      auto records = run_criterion(c.id, seed);
      pass = exit_code(records) == 0;
      detail = to_jsonl(records);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what() + "\n";
    }
    std::fputs(detail.c_str(), stderr);
    std::printf("criterion %d (%s): %s\n", c.id, c.name.c_str(), pass ? "PASS" : "FAIL");
    std::fflush(stdout);
    failed += !pass;
  }
  return failed == 0 ? 0 : 1;
}
