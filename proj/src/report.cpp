#include "gravham/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace gravham {

void Report::fact(std::string key, std::string value) {
  facts.emplace_back(std::move(key), std::move(value));
}

CheckLine& Report::add(std::string name, double measured, double tolerance, std::string note) {
  CheckLine line;
  line.name = std::move(name);
  line.measured = measured;
  line.tolerance = tolerance;
  line.passed = measured <= tolerance;
  line.note = std::move(note);
  checks.push_back(std::move(line));
  return checks.back();
}

CheckLine& Report::add_error(std::string name, const Error& e) {
  CheckLine line;
  line.name = std::move(name);
  line.passed = false;
  line.note = e.what();
  line.error_name = e.name();
  line.error_code = static_cast<int>(e.code());
  checks.push_back(std::move(line));
  return checks.back();
}

bool Report::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckLine& c) { return c.passed; });
}

int Report::exit_code() const {
  if (all_passed()) return 0;
  int worst = 0;
  for (const CheckLine& c : checks)
    if (!c.passed) worst = std::max(worst, c.error_code);
  return worst == 0 ? 1 : worst;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string to_text(const Report& r) {
  std::ostringstream os;
  os << "tool: " << r.tool << "\n";
  os << "d: " << r.d << "\n";
  os << "seed: " << r.seed << "\n";
  for (const auto& [k, v] : r.facts) os << k << ": " << v << "\n";
  for (const CheckLine& c : r.checks) {
    if (!c.error_name.empty()) {
      os << "[ERR ] " << c.name << "  " << c.note << "\n";
      continue;
    }
    os << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << "  measured "
       << format_number(c.measured) << "  tol " << format_number(c.tolerance);
    if (!c.note.empty()) os << "  (" << c.note << ")";
    os << "\n";
  }
  std::size_t npass = 0;
  for (const CheckLine& c : r.checks)
    if (c.passed) ++npass;
  os << "status: " << (r.all_passed() ? "PASS" : "FAIL") << " (" << npass << "/"
     << r.checks.size() << " checks)\n";
  return os.str();
}

std::string to_json(const Report& r) {
  nlohmann::ordered_json j;
  j["tool"] = r.tool;
  j["d"] = r.d;
  j["seed"] = r.seed;
  nlohmann::ordered_json facts = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.facts) facts[k] = v;
  j["facts"] = std::move(facts);
  j["checks"] = nlohmann::ordered_json::array();
  for (const CheckLine& c : r.checks) {
    nlohmann::ordered_json line;
    line["name"] = c.name;
    line["status"] = !c.error_name.empty() ? "error" : (c.passed ? "pass" : "fail");
    if (c.error_name.empty()) {
      line["measured"] = c.measured;
      line["tolerance"] = c.tolerance;
    } else {
      line["error"] = c.error_name;
    }
    if (!c.note.empty()) line["note"] = c.note;
    j["checks"].push_back(std::move(line));
  }
  j["status"] = r.all_passed() ? "pass" : "fail";
  j["exit_code"] = r.exit_code();
  return j.dump(2) + "\n";
}

std::string render(const Report& r, const std::string& format) {
  if (format == "text") return to_text(r);
  if (format == "json") return to_json(r);
  throw BadInput("unknown report format '" + format + "', expected text or json");
}

}  // namespace gravham
