#include "inflex/report.hpp"

#include <algorithm>
#include <cmath>

namespace inflex {
namespace {

// JSON has no inf/nan; keep them readable instead of null
Json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

bool VerificationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.pass; });
}

CheckRecord& VerificationReport::add(std::string check_name, double measured, double bound,
                                     double tolerance, bool pass, std::string note) {
  checks.push_back({std::move(check_name), measured, bound, tolerance, pass, std::move(note)});
  return checks.back();
}

CheckRecord& VerificationReport::add_upper(std::string check_name, double measured, double bound,
                                           double tolerance, std::string note) {
  const bool pass = !std::isnan(measured) && measured <= bound + tolerance;
  return add(std::move(check_name), measured, bound, tolerance, pass, std::move(note));
}

void VerificationReport::merge(const VerificationReport& other, const std::string& prefix) {
  for (const auto& c : other.checks) {
    checks.push_back(c);
    if (!prefix.empty()) checks.back().name = prefix + "." + c.name;
  }
  if (!other.details.empty()) details[prefix.empty() ? other.name : prefix] = other.details;
}

Json to_json(const CheckRecord& check) {
  Json j;
  j["name"] = check.name;
  j["measured"] = number(check.measured);
  j["bound"] = number(check.bound);
  j["tolerance"] = number(check.tolerance);
  j["pass"] = check.pass;
  if (!check.note.empty()) j["note"] = check.note;
  return j;
}

Json VerificationReport::to_json() const {
  Json j;
  j["name"] = name;
  j["status"] = passed() ? "pass" : "fail";
  Json arr = Json::array();
  for (const auto& c : checks) arr.push_back(inflex::to_json(c));
  j["checks"] = std::move(arr);
  if (!details.empty()) j["details"] = details;
  return j;
}

}  // namespace inflex
