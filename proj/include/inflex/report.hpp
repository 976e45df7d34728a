#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace inflex {

using Json = nlohmann::ordered_json;

/// One numerical claim: what was measured, what it was compared with.
struct CheckRecord {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

/// Structured pass/fail record shared by every verification routine.
struct VerificationReport {
  std::string name;
  std::vector<CheckRecord> checks;
  Json details = Json::object();

  bool passed() const;
  CheckRecord& add(std::string check_name, double measured, double bound, double tolerance,
                   bool pass, std::string note = {});
  /// Records `measured <= bound`.
  CheckRecord& add_upper(std::string check_name, double measured, double bound,
                         double tolerance = 0.0, std::string note = {});
  void merge(const VerificationReport& other, const std::string& prefix = {});
  Json to_json() const;
};

Json to_json(const CheckRecord& check);

}  // namespace inflex
