#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "wr/instrument.hpp"

namespace wr {

enum class ReportFormat { csv, json };

ReportFormat parse_format(const std::string& s);

/// Rows priced on one instrument and one model state.
struct ComparisonReport {
    std::string instrument;
    std::vector<PriceResult> rows;
    bool with_timings = false;
};

/// Fixed column order: instrument, method, price, std_error, ci_half_width, forward, numeraire,
/// normal_vol_bp, lognormal_vol[, seconds]. Floats at 9 significant digits.
void emit_report(const ComparisonReport& report, std::ostream& os, ReportFormat format);
void emit_report(const ComparisonReport& report, const std::string& path, ReportFormat format);

ComparisonReport parse_report_json(const std::string& text);

struct SmileRow {
    double strike_offset = 0.0;  // percent
    double strike = 0.0;
    double price = 0.0;
    double normal_vol_bp = 0.0;
    double lognormal_vol = 0.0;
    std::string method;
};

/// Columns: strike_offset, strike, price, normal_vol_bp, lognormal_vol, method.
void emit_smile(const std::vector<SmileRow>& rows, std::ostream& os, ReportFormat format);

/// Formats with 9 significant digits ("nan" for NaN).
std::string fmt9(double v);

}  // namespace wr
