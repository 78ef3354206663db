#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "phyfid/metrics.hpp"

namespace phyfid {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kToolName = "phyfid";
inline constexpr const char* kToolVersion = "0.1.0";

std::string to_string(SsimMode mode);
std::string to_string(SeComponents c);
SsimMode parse_ssim_mode(const std::string& s);
SeComponents parse_se_components(const std::string& s);

nlohmann::json flow_params_to_json(const FlowParams& p);

/// Schema-versioned JSON document for a report. Paths are recorded verbatim.
nlohmann::json report_to_json(const MetricReport& report, const std::string& real_path,
                              const std::string& gen_path);

/// Appends one CSV row, writing a header first when the file is new or empty.
void append_csv_row(const std::filesystem::path& path, const MetricReport& report,
                    const std::string& real_path, const std::string& gen_path);

}  // namespace phyfid
