#include "rz/runlog.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rz {

namespace {

// Shortest text that reads back to the same double.
std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void RunLog::write_csv(std::ostream& out, bool with_timing) const {
  out << kHeader << '\n';
  for (const RunLogRow& r : rows) {
    out << r.step << ',' << fmt(r.delta_j) << ',' << fmt(r.cum_delta_j) << ',' << r.j_cap << ','
        << r.j_delay << ',' << quote(r.descriptor) << ','
        << (with_timing ? fmt(std::round(r.elapsed_ms * 1000.0) / 1000.0) : std::string("0"))
        << '\n';
  }
}

std::string RunLog::to_csv(bool with_timing) const {
  std::ostringstream os;
  write_csv(os, with_timing);
  return os.str();
}

RunLog RunLog::read_csv(std::istream& in) {
  RunLog log;
  std::string line;
  if (!std::getline(in, line) || line != kHeader) {
    throw std::runtime_error("run log: unexpected header");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (quoted) {
        if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else if (c == '"') {
          quoted = false;
        } else {
          cur += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        fields.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    fields.push_back(cur);
    if (fields.size() != 7) throw std::runtime_error("run log: expected 7 columns");
    RunLogRow r;
    r.step = std::stoll(fields[0]);
    r.delta_j = std::stod(fields[1]);
    r.cum_delta_j = std::stod(fields[2]);
    r.j_cap = std::stoll(fields[3]);
    r.j_delay = std::stoll(fields[4]);
    r.descriptor = fields[5];
    r.elapsed_ms = std::stod(fields[6]);
    log.rows.push_back(std::move(r));
  }
  return log;
}

}  // namespace rz
