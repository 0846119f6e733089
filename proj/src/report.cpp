#include "wr/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "wr/types.hpp"

namespace wr {

using nlohmann::ordered_json;

ReportFormat parse_format(const std::string& s) {
    if (s == "csv") return ReportFormat::csv;
    if (s == "json") return ReportFormat::json;
    throw config_error("unknown format '" + s + "' (expected csv or json)");
}

std::string fmt9(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

namespace {

ordered_json number9(double v) {
    if (!std::isfinite(v)) return nullptr;
    return std::stod(fmt9(v));
}

double from_json_number(const ordered_json& j) {
    return j.is_null() ? std::nan("") : j.get<double>();
}

}  // namespace

void emit_report(const ComparisonReport& report, std::ostream& os, ReportFormat format) {
    if (format == ReportFormat::csv) {
        os << "instrument,method,price,std_error,ci_half_width,forward,numeraire,normal_vol_bp,lognormal_vol";
        if (report.with_timings) os << ",seconds";
        os << '\n';
        for (const auto& r : report.rows) {
            os << report.instrument << ',' << r.method << ',' << fmt9(r.price) << ',' << fmt9(r.std_error) << ','
               << fmt9(r.ci_half_width) << ',' << fmt9(r.forward) << ',' << fmt9(r.numeraire) << ','
               << fmt9(r.normal_vol_bp) << ',' << fmt9(r.lognormal_vol);
            if (report.with_timings) os << ',' << fmt9(r.seconds);
            os << '\n';
        }
        return;
    }
    ordered_json j;
    j["instrument"] = report.instrument;
    j["rows"] = ordered_json::array();
    for (const auto& r : report.rows) {
        ordered_json row;
        row["method"] = r.method;
        row["price"] = number9(r.price);
        row["std_error"] = number9(r.std_error);
        row["ci_half_width"] = number9(r.ci_half_width);
        row["forward"] = number9(r.forward);
        row["numeraire"] = number9(r.numeraire);
        row["normal_vol_bp"] = number9(r.normal_vol_bp);
        row["lognormal_vol"] = number9(r.lognormal_vol);
        if (report.with_timings) row["seconds"] = number9(r.seconds);
        j["rows"].push_back(row);
    }
    os << j.dump(2) << '\n';
}

void emit_report(const ComparisonReport& report, const std::string& path, ReportFormat format) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    emit_report(report, out, format);
    if (!out) throw std::runtime_error("write to " + path + " failed");
}

ComparisonReport parse_report_json(const std::string& text) {
    const auto j = ordered_json::parse(text);
    ComparisonReport rep;
    rep.instrument = j.at("instrument").get<std::string>();
    for (const auto& row : j.at("rows")) {
        PriceResult r;
        r.method = row.at("method").get<std::string>();
        r.price = from_json_number(row.at("price"));
        r.std_error = from_json_number(row.at("std_error"));
        r.ci_half_width = from_json_number(row.at("ci_half_width"));
        r.forward = from_json_number(row.at("forward"));
        r.numeraire = from_json_number(row.at("numeraire"));
        r.normal_vol_bp = from_json_number(row.at("normal_vol_bp"));
        r.lognormal_vol = from_json_number(row.at("lognormal_vol"));
        if (row.contains("seconds")) {
            rep.with_timings = true;
            r.seconds = from_json_number(row.at("seconds"));
        }
        rep.rows.push_back(r);
    }
    return rep;
}

void emit_smile(const std::vector<SmileRow>& rows, std::ostream& os, ReportFormat format) {
    if (format == ReportFormat::csv) {
        os << "strike_offset,strike,price,normal_vol_bp,lognormal_vol,method\n";
        for (const auto& r : rows)
            os << fmt9(r.strike_offset) << ',' << fmt9(r.strike) << ',' << fmt9(r.price) << ','
               << fmt9(r.normal_vol_bp) << ',' << fmt9(r.lognormal_vol) << ',' << r.method << '\n';
        return;
    }
    ordered_json j = ordered_json::array();
    for (const auto& r : rows) {
        ordered_json row;
        row["strike_offset"] = number9(r.strike_offset);
        row["strike"] = number9(r.strike);
        row["price"] = number9(r.price);
        row["normal_vol_bp"] = number9(r.normal_vol_bp);
        row["lognormal_vol"] = number9(r.lognormal_vol);
        row["method"] = r.method;
        j.push_back(row);
    }
    os << j.dump(2) << '\n';
}

}  // namespace wr
