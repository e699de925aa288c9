#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sptb/bench.hpp"

namespace sptb {

enum class ReportFormat { csv, svg };

/// Leading columns in fixed order, followed by the extra columns.
const std::vector<std::string>& csv_columns();

/// One header line and one row per report.  Failures and the environment
/// follow as `#` comment lines.  Numbers use 17 significant digits.
void write_csv(const BenchSuiteResult& result, std::ostream& out);

/// GFLOPS bars grouped by tensor and kernel with the Roofline bound of each
/// bar as a marker, followed by a log-log Roofline chart with one
/// `oi-marker` per kernel and format.
void write_svg(const BenchSuiteResult& result, std::ostream& out);

/// Throws ConfigError on an empty result, Error on I/O failure.
void emit_report(const BenchSuiteResult& result, ReportFormat format, const std::string& path);

}  // namespace sptb
