#pragma once

#include <string>

#include <json.hpp>

#include "eqloc/localization.hpp"

namespace eqloc::cli {

struct RunConfig {
  std::string command;
  VerifyOptions options;
};

// Decimal string with 17 significant digits.
std::string number(double v);

// Report document. Every floating value is a string from number(); the
// worker count is not recorded because results do not depend on it.
nlohmann::ordered_json report_json(const VerificationReport& report, const RunConfig& config);

}  // namespace eqloc::cli
