// Runs the full battery with default settings and prints one PASS/FAIL line
// per criterion. Criterion 16 additionally needs every report file to be
// byte-identical between a 1-thread and an 8-thread run.

#include <cstdio>
#include <exception>

#include "lagvar/harness.hpp"

int main() {
  try {
    lagvar::ExperimentConfig cfg;
    cfg.threads = 1;
    const auto serial = lagvar::run_verify(cfg);
    cfg.threads = 8;
    const auto parallel = lagvar::run_verify(cfg);
    const bool same_bytes = serial.files == parallel.files;

    bool all = true;
    for (const auto& s : lagvar::summarize(serial.rows)) {
      bool ok = s.status == "PASS";
      if (s.criterion == 16) ok = ok && same_bytes;
      all = all && ok;
      std::printf("criterion %2d %s %s\n", s.criterion, ok ? "PASS" : "FAIL", s.title.c_str());
    }
    for (const auto& r : serial.rows)
      if (!r.pass)
        std::printf("  failed: %s %s value=%s\n", r.experiment.c_str(), r.metric.c_str(),
                    lagvar::format_double(r.value).c_str());
    if (!same_bytes) std::printf("  report files differ between 1 and 8 threads\n");
    return all ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
