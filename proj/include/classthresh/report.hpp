#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "classthresh/design.hpp"
#include "classthresh/estimation.hpp"
#include "classthresh/evaluation.hpp"
#include "classthresh/resampling.hpp"

namespace classthresh {

using Json = nlohmann::json;

// All report numbers are rounded to 6 significant digits before insertion,
// so identical configs and seeds serialize byte-identically.
double round6(double v);
Json j6(double v);
Json j6(const std::vector<double>& v);
std::string fmt6(double v);

Json to_json(const EstimatedRule& rule);
Json to_json(const BootstrapReport& report);
Json to_json(const ScreeningSimReport& report);
Json to_json(const EvaluationReport& report);
Json to_json(const Theorem1Report& report);
Json to_json(const PowerReport& report);

std::string to_csv(const EstimatedRule& rule);
std::string to_csv(const BootstrapReport& report,
                   const std::vector<std::string>& labels);
std::string to_csv(const ScreeningSimReport& report,
                   const std::vector<std::string>& labels);
std::string to_csv(const EvaluationReport& report);

// Re-parses an emitted report and re-checks its type invariants (probability
// ranges, count conservation, interval ordering). Throws ValidationError.
void validate_report_json(const Json& report);

}  // namespace classthresh
