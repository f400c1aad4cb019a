#include "sojourn/errors.hpp"
#include "sojourn/study_harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

namespace sojourn {
namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  // strtod rather than stod: subnormal values set ERANGE but are exact here.
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw ConfigError("report csv: bad number '" + s + "'");
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw ConfigError("report csv: bad boolean '" + s + "'");
}

struct Column {
  const char* name;
  std::function<std::string(const ConvergenceRow&)> get;
  std::function<void(ConvergenceRow&, const std::string&)> set;
};

#define SOJOURN_NUM(field)                                                         \
  Column {                                                                         \
    #field, [](const ConvergenceRow& r) { return format_double(r.field); },       \
        [](ConvergenceRow& r, const std::string& s) { r.field = parse_double(s); } \
  }
#define SOJOURN_BOOL(field)                                                      \
  Column {                                                                       \
    #field, [](const ConvergenceRow& r) { return std::string(r.field ? "true" : "false"); }, \
        [](ConvergenceRow& r, const std::string& s) { r.field = parse_bool(s); } \
  }

const std::vector<Column>& columns() {
  static const std::vector<Column> cols = {
      SOJOURN_NUM(T),
      SOJOURN_NUM(u_eff),
      Column{"R", [](const ConvergenceRow& r) { return std::to_string(r.R); },
             [](ConvergenceRow& r, const std::string& s) { r.R = std::stoull(s); }},
      SOJOURN_NUM(h),
      SOJOURN_NUM(W1_emp),
      SOJOURN_NUM(W1_half_spread),
      SOJOURN_NUM(sigma2_or_var),
      SOJOURN_NUM(emp_var_normalized),
      SOJOURN_NUM(mean_raw),
      SOJOURN_NUM(mean_expected),
      SOJOURN_NUM(mean_se),
      SOJOURN_BOOL(mean_within_3se),
      Column{"n_trunc", [](const ConvergenceRow& r) { return std::to_string(r.n_trunc); },
             [](ConvergenceRow& r, const std::string& s) { r.n_trunc = std::stoi(s); }},
      SOJOURN_NUM(bound_total),
      SOJOURN_NUM(d1),
      SOJOURN_NUM(d2),
      SOJOURN_NUM(d3),
      SOJOURN_NUM(term_body),
      SOJOURN_NUM(term_body_d1_form),
      SOJOURN_NUM(term_tail),
      SOJOURN_NUM(var_ratio),
      SOJOURN_BOOL(corollary_holds),
      SOJOURN_BOOL(tail_non_vanishing),
      Column{"status", [](const ConvergenceRow& r) { return r.status; },
             [](ConvergenceRow& r, const std::string& s) { r.status = s; }},
  };
  return cols;
}

#undef SOJOURN_NUM
#undef SOJOURN_BOOL

std::string xml_escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t i = 0;
  auto end_field = [&] {
    record.push_back(field);
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(record);
    record.clear();
  };
  while (i < text.size()) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      end_record();
      ++i;
    } else if (c == '\n') {
      end_record();
    } else {
      field += c;
      field_started = true;
    }
    ++i;
  }
  if (quoted) throw ConfigError("csv: unterminated quoted field");
  if (field_started || !record.empty()) end_record();
  return records;
}

std::string report_to_csv(const ConvergenceReport& report) {
  std::ostringstream os;
  os << "mode,model";
  for (const auto& c : columns()) os << ',' << c.name;
  os << "\r\n";
  for (const auto& row : report.rows) {
    os << to_string(report.mode) << ',' << csv_escape(report.model);
    for (const auto& c : columns()) os << ',' << csv_escape(c.get(row));
    os << "\r\n";
  }
  return os.str();
}

ConvergenceReport report_from_csv(const std::string& text) {
  const auto records = parse_csv(text);
  if (records.empty()) throw ConfigError("report csv: no header");
  const auto& header = records.front();
  const auto& cols = columns();
  if (header.size() != cols.size() + 2 || header[0] != "mode" || header[1] != "model") {
    throw ConfigError("report csv: unexpected header");
  }
  for (std::size_t k = 0; k < cols.size(); ++k) {
    if (header[k + 2] != cols[k].name) throw ConfigError("report csv: unexpected column " + header[k + 2]);
  }
  ConvergenceReport report;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != header.size()) throw ConfigError("report csv: row " + std::to_string(r) + " has wrong width");
    report.mode = parse_bound_mode(rec[0]);
    report.model = rec[1];
    ConvergenceRow row;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      try {
        cols[k].set(row, rec[k + 2]);
      } catch (const std::logic_error&) {
        throw ConfigError("report csv: bad value '" + rec[k + 2] + "' in column " + cols[k].name);
      }
    }
    report.rows.push_back(row);
  }
  return report;
}

std::string report_to_svg(const ConvergenceReport& report) {
  constexpr double kWidth = 720.0;
  constexpr double kHeight = 480.0;
  constexpr double kLeft = 80.0;
  constexpr double kRight = 170.0;
  constexpr double kTop = 40.0;
  constexpr double kBottom = 60.0;

  struct Series {
    const char* label;
    const char* color;
    std::vector<std::pair<double, double>> points;
  };
  std::vector<Series> series = {{"W1 empirical", "#1f77b4", {}}, {"bound total", "#d62728", {}}};
  for (const auto& row : report.rows) {
    if (row.T > 0 && row.W1_emp > 0 && std::isfinite(row.W1_emp)) series[0].points.emplace_back(row.T, row.W1_emp);
    if (row.T > 0 && row.bound_total > 0 && std::isfinite(row.bound_total)) {
      series[1].points.emplace_back(row.T, row.bound_total);
    }
  }
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      x_lo = std::min(x_lo, std::log10(x));
      x_hi = std::max(x_hi, std::log10(x));
      y_lo = std::min(y_lo, std::log10(y));
      y_hi = std::max(y_hi, std::log10(y));
    }
  }
  if (!std::isfinite(x_lo)) {
    x_lo = 0.0;
    x_hi = 1.0;
    y_lo = 0.0;
    y_hi = 1.0;
  }
  auto widen = [](double& lo, double& hi) {
    lo = std::floor(lo * 4.0) / 4.0 - 0.05;
    hi = std::ceil(hi * 4.0) / 4.0 + 0.05;
    if (hi - lo < 0.5) hi = lo + 0.5;
  };
  widen(x_lo, x_hi);
  widen(y_lo, y_hi);
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (std::log10(x) - x_lo) / (x_hi - x_lo) * pw; };
  auto py = [&](double y) { return kTop + (y_hi - std::log10(y)) / (y_hi - y_lo) * ph; };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  auto tick_label = [](double e) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", std::pow(10.0, e));
    return std::string(buf);
  };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n"
     << "<text x=\"" << kLeft << "\" y=\"24\" font-size=\"14\">"
     << xml_escape(to_string(report.mode) + " level, " + report.model) << "</text>\n"
     << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";

  // Ticks at integer and half decades that fall inside the axis range.
  for (double e = std::ceil(x_lo * 2.0) / 2.0; e <= x_hi; e += 0.5) {
    const double x = px(std::pow(10.0, e));
    os << "<line x1=\"" << num(x) << "\" y1=\"" << kTop + ph << "\" x2=\"" << num(x) << "\" y2=\""
       << kTop + ph + 5 << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << num(x) << "\" y=\"" << kTop + ph + 20 << "\" text-anchor=\"middle\">"
       << tick_label(e) << "</text>\n";
  }
  for (double e = std::ceil(y_lo * 2.0) / 2.0; e <= y_hi; e += 0.5) {
    const double y = py(std::pow(10.0, e));
    os << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << num(y) << "\" x2=\"" << kLeft << "\" y2=\"" << num(y)
       << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << kLeft - 8 << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">" << tick_label(e)
       << "</text>\n";
  }
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 15
     << "\" text-anchor=\"middle\">T (window edge, log scale)</text>\n"
     << "<text x=\"20\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
     << kTop + ph / 2 << ")\">distance to Gaussian (log scale)</text>\n";

  double legend_y = kTop + 10;
  for (const auto& s : series) {
    if (!s.points.empty()) {
      os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"";
      for (const auto& [x, y] : s.points) os << num(px(x)) << ',' << num(py(y)) << ' ';
      os << "\"/>\n";
      for (const auto& [x, y] : s.points) {
        os << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"3.5\" fill=\"" << s.color
           << "\"/>\n";
      }
    }
    const double lx = kLeft + pw + 15;
    os << "<line x1=\"" << lx << "\" y1=\"" << legend_y << "\" x2=\"" << lx + 25 << "\" y2=\"" << legend_y
       << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n"
       << "<text x=\"" << lx + 32 << "\" y=\"" << legend_y + 4 << "\">" << xml_escape(s.label) << "</text>\n";
    legend_y += 20;
  }
  os << "</svg>\n";
  return os.str();
}

void emit_report(const ConvergenceReport& report, const std::string& path, ReportFormat format) {
  if (report.rows.empty()) throw DomainError("emit_report: report has no rows");
  const std::string body = format == ReportFormat::csv ? report_to_csv(report) : report_to_svg(report);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path, "cannot open for writing");
  out << body;
  out.close();
  if (!out) throw IoError(path, "write failed");
}

}  // namespace sojourn
