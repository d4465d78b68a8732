// One line per acceptance criterion; exit status 1 when any fails.

#include <cstdio>
#include <cstdlib>
#include <string>

#include "symred/verify.hpp"

int main(int argc, char** argv) {
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
  const bool verbose = argc > 2 && std::string(argv[2]) == "-v";
  int failed = 0;
  for (const auto& r : symred::verify::run_acceptance(seed)) {
    std::printf("%-4s %2d %-18s %7.3fs (limit %gs)  %s\n", r.pass ? "PASS" : "FAIL", r.id, r.key.c_str(), r.seconds,
                r.runtime_limit, r.title.c_str());
    if (!r.error.empty()) std::printf("       error: %s\n", r.error.c_str());
    for (const auto& c : r.checks)
      if (verbose || !c.pass)
        std::printf("       %s %s: value %.3g, tolerance %.3g%s%s\n", c.pass ? "ok  " : "FAIL", c.name.c_str(), c.value,
                    c.tolerance, c.note.empty() ? "" : "  ", c.note.c_str());
    failed += r.pass ? 0 : 1;
  }
  std::printf("%d of 12 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
