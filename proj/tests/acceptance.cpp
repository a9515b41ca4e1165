// Acceptance run: one line per criterion.
//
// Exit status is 0 when every failing line belongs to the documented
// unattainable set (known_unattainable), 1 otherwise.  Those lines still
// print FAIL.

#include <cstdio>
#include <exception>
#include <string>

#include "gl3/verify.hpp"

int main(int argc, char** argv) {
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  gl3::VerifyOptions opt;
  int unexpected = 0, documented = 0, passed = 0;
  for (const auto& name : gl3::suite_names()) {
    if (argc > 1) {
      bool wanted = false;
      for (int i = 1; i < argc; ++i) wanted |= name == argv[i];
      if (!wanted) continue;
    }
    gl3::CheckResult r;
    try {
      r = gl3::run_suite(name, opt);
    } catch (const std::exception& e) {
      r.name = name;
      r.detail = std::string("exception: ") + e.what();
    }
    const char* status = r.pass ? "PASS" : gl3::known_unattainable(name) ? "FAIL (documented)" : "FAIL";
    std::printf("criterion %2d %-13s %s  checks=%ld failures=%ld max_dev=%.3g time=%.1fs  %s\n", r.id, name.c_str(),
                status, r.count, r.failures, r.max_deviation, r.seconds, r.detail.c_str());
    if (r.pass)
      ++passed;
    else if (gl3::known_unattainable(name))
      ++documented;
    else
      ++unexpected;
  }
  std::printf("summary: %d pass, %d documented fail, %d unexpected fail\n", passed, documented, unexpected);
  return unexpected == 0 ? 0 : 1;
}
