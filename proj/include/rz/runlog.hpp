#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rz {

/// One progression record, shared by every algorithm.
struct RunLogRow {
  std::int64_t step = 0;
  double delta_j = 0.0;
  double cum_delta_j = 0.0;
  std::int64_t j_cap = 0;
  std::int64_t j_delay = 0;
  std::string descriptor;
  double elapsed_ms = 0.0;
};

struct RunLog {
  std::string algorithm;
  std::vector<RunLogRow> rows;

  static constexpr const char* kHeader = "step,delta_j,cum_delta_j,j_cap,j_delay,regulation,elapsed_ms";

  /// With `with_timing` false the elapsed column is written as 0 so seeded
  /// runs are byte-identical.
  void write_csv(std::ostream& out, bool with_timing = true) const;
  std::string to_csv(bool with_timing = true) const;
  static RunLog read_csv(std::istream& in);
};

/// Wall-clock milliseconds since construction.
class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }
  double elapsed_s() const { return elapsed_ms() / 1000.0; }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace rz
