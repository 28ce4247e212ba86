#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "stagpoint/classifier.hpp"

namespace stagpoint {

// Column order of profile CSV output.
inline constexpr const char* kProfileCsvHeader = "r,I,J,K,I1,I2,J1,Phi,M,D,V,Vtilde,Z,H,Y,diagnostics";

void write_profile_csv(std::ostream& out, const RadialProfile& profile);
nlohmann::ordered_json profile_json(const RadialProfile& profile);

void write_residuals_csv(std::ostream& out, const VerifyReport& report);
nlohmann::ordered_json verify_json(const VerifyReport& report);

nlohmann::ordered_json homogeneity_json(const HomogeneityEstimate& h);
nlohmann::ordered_json point_report_json(const StagnationPointReport& report);
nlohmann::ordered_json flat_summary_json(const FlatSetSummary& summary);

// Short human-readable block for one classified point.
std::string point_report_text(const StagnationPointReport& report);

// Non-finite values become null.
nlohmann::ordered_json number_or_null(double v);

}  // namespace stagpoint
