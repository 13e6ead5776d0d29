#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "psdpath/verifier.hpp"

namespace psdpath {

enum class OutputFormat { Json, Csv };

std::string_view to_string(OutputFormat format) noexcept;
std::optional<OutputFormat> parse_output_format(std::string_view name) noexcept;

struct ReportWriteOptions {
  /// elapsed_seconds is the only run-dependent field; leave it out to get
  /// byte-comparable output.
  bool include_timing = true;
};

/// {"format": "psdpath-verification-report", "version": 1, "reports": [...]}.
/// Witness matrices are stored as {"dim": n, "entries": [row-major]}; doubles
/// are written shortest-round-trip, non-finite values as "inf", "-inf", "nan".
std::string reports_to_json(std::span<const VerificationReport> reports,
                            const ReportWriteOptions& options = {});

/// Throws ParseError on malformed input.
std::vector<VerificationReport> reports_from_json(std::string_view text);

/// One row per report with a header line; 17 significant digits. Witness
/// inputs are only carried by the JSON form.
std::string reports_to_csv(std::span<const VerificationReport> reports,
                           const ReportWriteOptions& options = {});

/// printf("%.17g").
std::string format_double(double value);

}  // namespace psdpath
