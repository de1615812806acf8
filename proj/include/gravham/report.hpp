#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gravham/common.hpp"

// Deterministic check reports: same config + seed produces byte-identical
// text and JSON (no timestamps, fixed formatting, insertion-ordered keys).

namespace gravham {

struct CheckLine {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string note;        // what was measured, one clause
  std::string error_name;  // structured error that aborted the check, if any
  int error_code = 0;      // its exit-code class, 0 when none
};

struct Report {
  std::string tool;
  int d = 4;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> facts;
  std::vector<CheckLine> checks;

  void fact(std::string key, std::string value);

  // Pass iff measured <= tolerance.
  CheckLine& add(std::string name, double measured, double tolerance, std::string note);

  // A check that could not run: recorded as a failing line carrying the
  // error's name and exit-code class.
  CheckLine& add_error(std::string name, const Error& e);

  bool all_passed() const;

  // 0 all-pass; otherwise the worst structured error code, or 1 for a
  // plain measured-over-tolerance failure.
  int exit_code() const;
};

// Fixed "%.12g" rendering, shared by both output formats.
std::string format_number(double v);

std::string to_text(const Report& r);
std::string to_json(const Report& r);

// format is "text" or "json"; anything else throws BadInput.
std::string render(const Report& r, const std::string& format);

}  // namespace gravham
