#include "hmix/verify/report.hpp"

#include <algorithm>
#include <ostream>

namespace hmix::verify {

const char* to_string(Status s) noexcept {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Inconclusive: return "inconclusive";
  }
  return "?";
}

void VerificationReport::add(std::string name, double value, double tolerance) {
  residuals.push_back({std::move(name), value, tolerance});
}

double VerificationReport::max_residual() const noexcept {
  double m = 0.0;
  for (const auto& r : residuals) m = std::max(m, r.value);
  return m;
}

bool VerificationReport::residuals_pass() const noexcept {
  return std::all_of(residuals.begin(), residuals.end(), [](const Residual& r) { return r.pass(); });
}

Status VerificationReport::status() const noexcept {
  if (!residuals_pass()) return inconclusive ? Status::Inconclusive : Status::Fail;
  return inconclusive ? Status::Inconclusive : Status::Pass;
}

void to_json(nlohmann::json& j, const VerificationReport& r) {
  nlohmann::json residuals = nlohmann::json::array();
  for (const auto& x : r.residuals)
    residuals.push_back({{"name", x.name}, {"value", x.value}, {"tol", x.tolerance}, {"pass", x.pass()}});
  j = {{"check", r.check},
       {"params", r.params},
       {"residuals", residuals},
       {"max_residual", r.max_residual()},
       {"method", r.method},
       {"notes", r.notes},
       {"status", to_string(r.status())},
       {"pass", r.status() == Status::Pass}};
}

void write_jsonl(std::ostream& out, const std::vector<VerificationReport>& reports) {
  for (const auto& r : reports) out << nlohmann::json(r).dump() << '\n';
}

Status overall(const std::vector<VerificationReport>& reports) noexcept {
  Status s = Status::Pass;
  for (const auto& r : reports) {
    const Status t = r.status();
    if (t == Status::Fail) return Status::Fail;
    if (t == Status::Inconclusive) s = Status::Inconclusive;
  }
  return s;
}

}  // namespace hmix::verify
