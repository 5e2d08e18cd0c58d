#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mcse/experiments.hpp"

namespace mcse {

enum class ReportFormat { Csv, Markdown };

/// "csv" or "markdown" (also "md").
[[nodiscard]] ReportFormat parse_format(std::string_view text);

/// 17 significant digits; NaN is written as "nan".
[[nodiscard]] std::string format_double(double x);

/// Each header line is written as a "# " comment before the table.
[[nodiscard]] std::string emit_report(const ReplicationReport& report, ReportFormat format,
                                      const std::vector<std::string>& header = {});

/// Inverse of the CSV form of emit_report; comment lines are skipped.
[[nodiscard]] ReplicationReport parse_report_csv(std::string_view text);

[[nodiscard]] std::string emit_mse_report(const MseReport& report, ReportFormat format,
                                          const std::vector<std::string>& header = {});

/// CSV column names of emit_report, in order.
[[nodiscard]] const std::vector<std::string>& report_columns();

}  // namespace mcse
