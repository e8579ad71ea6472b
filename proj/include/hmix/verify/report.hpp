#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace hmix::verify {

enum class Status { Pass, Fail, Inconclusive };
const char* to_string(Status s) noexcept;

struct Residual {
  std::string name;
  double value = 0.0;      ///< absolute residual
  double tolerance = 0.0;  ///< pass iff value <= tolerance
  bool pass() const noexcept { return value <= tolerance; }
};

/// One machine-checked identity: residuals against tolerances, plus the
/// parameters and numerical method needed to reproduce it.
struct VerificationReport {
  std::string check;
  nlohmann::json params = nlohmann::json::object();
  std::vector<Residual> residuals;
  std::string method;
  nlohmann::json notes = nlohmann::json::object();
  bool inconclusive = false;  ///< a certificate (e.g. a truncation bound) could not be met

  void add(std::string name, double value, double tolerance);
  double max_residual() const noexcept;
  bool residuals_pass() const noexcept;
  Status status() const noexcept;
};

void to_json(nlohmann::json& j, const VerificationReport& r);

/// One compact JSON record per line.
void write_jsonl(std::ostream& out, const std::vector<VerificationReport>& reports);

/// Worst status across reports: any failure beats any inconclusive result.
Status overall(const std::vector<VerificationReport>& reports) noexcept;

}  // namespace hmix::verify
