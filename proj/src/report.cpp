#include "mcse/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>
#include <stdexcept>

namespace mcse {

namespace {

std::string fixed(double x, int digits) {
  if (std::isnan(x)) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

// 1000 -> 1e3, 50000 -> 5e4; other values verbatim.
std::string compact_count(std::size_t n) {
  if (n < 1000) return std::to_string(n);
  std::size_t mant = n;
  int exp = 0;
  while (mant % 10 == 0) {
    mant /= 10;
    ++exp;
  }
  if (mant >= 10) return std::to_string(n);
  return std::to_string(mant) + "e" + std::to_string(exp);
}

std::string short_sci(double x) {
  if (std::isnan(x)) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

// nu as p/q for small q, else decimal.
std::string exponent_text(double nu) {
  for (int q = 1; q <= 12; ++q) {
    const double p = std::round(nu * q);
    if (std::abs(nu - p / q) < 1e-9) {
      return q == 1 ? std::to_string(static_cast<int>(p))
                    : std::to_string(static_cast<int>(p)) + "/" + std::to_string(q);
    }
  }
  return format_double(nu);
}

void write_header(std::ostringstream& os, const std::vector<std::string>& header) {
  for (const auto& line : header) os << "# " << line << '\n';
}

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::nan("");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw std::invalid_argument("bad number in report: '" + s + "'");
  return v;
}

std::size_t parse_count(const std::string& s) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) throw std::invalid_argument("bad count in report: '" + s + "'");
  return static_cast<std::size_t>(v);
}

// Distinct values in order of first appearance.
template <typename T, typename F>
std::vector<T> distinct(const std::vector<ReportRow>& rows, F key) {
  std::vector<T> out;
  for (const auto& r : rows) {
    const T k = key(r);
    if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
  }
  return out;
}

void coverage_markdown(std::ostringstream& os, const std::vector<ReportRow>& rows) {
  auto checkpoints = distinct<std::size_t>(rows, [](const ReportRow& r) { return r.checkpoint; });
  std::sort(checkpoints.begin(), checkpoints.end());
  const auto coords = distinct<std::string>(rows, [](const ReportRow& r) { return r.coordinate; });
  auto nus = distinct<double>(rows, [](const ReportRow& r) { return r.nu; });
  std::sort(nus.begin(), nus.end());
  const auto methods = distinct<std::string>(rows, [](const ReportRow& r) { return r.method; });

  os << "| Method | b_n |";
  for (const std::size_t n : checkpoints) {
    for (const auto& c : coords) os << ' ' << compact_count(n) << (coords.size() > 1 ? " [" + c + "]" : "") << " |";
  }
  os << "\n|---|---|";
  for (std::size_t i = 0; i < checkpoints.size() * coords.size(); ++i) os << "---|";
  os << '\n';
  for (const double nu : nus) {
    bool first = true;
    for (const auto& m : methods) {
      bool any = false;
      std::ostringstream line;
      line << "| " << m << " | " << (first ? "floor(n^" + exponent_text(nu) + ")" : "") << " |";
      for (const std::size_t n : checkpoints) {
        for (const auto& c : coords) {
          const auto it = std::find_if(rows.begin(), rows.end(), [&](const ReportRow& r) {
            return r.method == m && r.nu == nu && r.checkpoint == n && r.coordinate == c;
          });
          any = any || it != rows.end();
          line << ' ' << (it == rows.end() ? "-" : fixed(it->coverage, 4)) << " |";
        }
      }
      if (!any) continue;
      os << line.str() << '\n';
      first = false;
    }
  }
}

void fixed_width_markdown(std::ostringstream& os, const std::vector<ReportRow>& rows) {
  const auto coords = distinct<std::string>(rows, [](const ReportRow& r) { return r.coordinate; });
  auto nus = distinct<double>(rows, [](const ReportRow& r) { return r.nu; });
  std::sort(nus.begin(), nus.end());
  auto eps = distinct<double>(rows, [](const ReportRow& r) { return r.epsilon; });
  std::sort(eps.rbegin(), eps.rend());
  const auto methods = distinct<std::string>(rows, [](const ReportRow& r) { return r.method; });

  os << "| Method | b_n | eps |";
  for (const auto& c : coords) os << ' ' << (c == "sim" ? std::string("Simultaneous") : "x[" + c + "]") << " |";
  os << " n (s.e.) | exceeded |\n|---|---|---|";
  for (std::size_t i = 0; i < coords.size(); ++i) os << "---|";
  os << "---|---|\n";
  for (const double nu : nus) {
    for (const double e : eps) {
      bool first = true;
      for (const auto& m : methods) {
        const ReportRow* any = nullptr;
        std::ostringstream line;
        for (const auto& c : coords) {
          const auto it = std::find_if(rows.begin(), rows.end(), [&](const ReportRow& r) {
            return r.method == m && r.nu == nu && r.epsilon == e && r.coordinate == c;
          });
          if (it != rows.end()) any = &*it;
          line << ' ' << (it == rows.end() ? "-" : fixed(it->coverage, 3)) << " |";
        }
        if (!any) continue;
        os << "| " << m << " | " << "floor(n^" + exponent_text(nu) + ")" << " | "
           << (first ? short_sci(e) : std::string()) << " |" << line.str() << ' ' << short_sci(any->mean_n) << " ("
           << fixed(any->se_n, 0) << ") | " << any->flagged << " |\n";
        first = false;
      }
    }
  }
}

}  // namespace

ReportFormat parse_format(std::string_view text) {
  if (text == "csv") return ReportFormat::Csv;
  if (text == "markdown" || text == "md") return ReportFormat::Markdown;
  throw std::invalid_argument("unknown format '" + std::string(text) + "' (expected csv or markdown)");
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> cols{
      "study",   "method",   "nu",       "epsilon", "checkpoint", "coordinate",  "replications", "covered",
      "flagged", "coverage", "mcse",     "mean_n",  "se_n",       "mean_sigma2", "var_sigma2"};
  return cols;
}

std::string emit_report(const ReplicationReport& report, ReportFormat format, const std::vector<std::string>& header) {
  std::ostringstream os;
  write_header(os, header);
  if (format == ReportFormat::Csv) {
    const auto& cols = report_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
    for (const auto& r : report.rows) {
      os << r.study << ',' << r.method << ',' << format_double(r.nu) << ',' << format_double(r.epsilon) << ','
         << r.checkpoint << ',' << r.coordinate << ',' << r.replications << ',' << r.covered << ',' << r.flagged
         << ',' << format_double(r.coverage) << ',' << format_double(r.mcse) << ',' << format_double(r.mean_n) << ','
         << format_double(r.se_n) << ',' << format_double(r.mean_sigma2) << ',' << format_double(r.var_sigma2)
         << '\n';
    }
    return os.str();
  }

  std::vector<ReportRow> coverage;
  std::vector<ReportRow> fixed_width;
  for (const auto& r : report.rows) (r.study == "fixed-width" ? fixed_width : coverage).push_back(r);
  if (report.rows.empty()) os << "(no results)\n";
  if (!coverage.empty()) coverage_markdown(os, coverage);
  if (!coverage.empty() && !fixed_width.empty()) os << '\n';
  if (!fixed_width.empty()) fixed_width_markdown(os, fixed_width);
  return os.str();
}

ReplicationReport parse_report_csv(std::string_view text) {
  ReplicationReport report;
  bool header_seen = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split_csv(line);
    if (!header_seen) {
      if (fields != report_columns()) throw std::invalid_argument("report CSV: unexpected column header");
      header_seen = true;
      continue;
    }
    if (fields.size() != report_columns().size()) throw std::invalid_argument("report CSV: wrong field count");
    ReportRow r;
    r.study = fields[0];
    r.method = fields[1];
    r.nu = parse_double(fields[2]);
    r.epsilon = parse_double(fields[3]);
    r.checkpoint = parse_count(fields[4]);
    r.coordinate = fields[5];
    r.replications = parse_count(fields[6]);
    r.covered = parse_count(fields[7]);
    r.flagged = parse_count(fields[8]);
    r.coverage = parse_double(fields[9]);
    r.mcse = parse_double(fields[10]);
    r.mean_n = parse_double(fields[11]);
    r.se_n = parse_double(fields[12]);
    r.mean_sigma2 = parse_double(fields[13]);
    r.var_sigma2 = parse_double(fields[14]);
    report.rows.push_back(std::move(r));
  }
  if (!header_seen) throw std::invalid_argument("report CSV: missing column header");
  return report;
}

std::string emit_mse_report(const MseReport& report, ReportFormat format, const std::vector<std::string>& header) {
  std::ostringstream os;
  write_header(os, header);
  if (format == ReportFormat::Csv) {
    os << "# sigma2=" << format_double(report.sigma2) << " gamma=" << format_double(report.gamma_const) << '\n';
    os << "method,n,b,replications,mean_sigma2,bias,bias_se,variance,mse,b_bias,b_bias_se,scaled_variance,argmin\n";
    for (const auto& r : report.rows) {
      os << r.method << ',' << r.n << ',' << r.b << ',' << r.replications << ',' << format_double(r.mean_sigma2)
         << ',' << format_double(r.bias) << ',' << format_double(r.bias_se) << ',' << format_double(r.variance) << ','
         << format_double(r.mse) << ',' << format_double(r.b_bias) << ',' << format_double(r.b_bias_se) << ','
         << format_double(r.scaled_variance) << ',' << (r.argmin ? 1 : 0) << '\n';
    }
    return os.str();
  }
  os << "sigma^2 = " << fixed(report.sigma2, 6) << ", Gamma = " << fixed(report.gamma_const, 6) << "\n\n";
  os << "| Method | n | b | bias (s.e.) | b*bias (s.e.) | variance | (n/b) var | MSE | argmin |\n"
        "|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : report.rows) {
    os << "| " << r.method << " | " << compact_count(r.n) << " | " << r.b << " | " << fixed(r.bias, 4) << " ("
       << fixed(r.bias_se, 4) << ") | " << fixed(r.b_bias, 3) << " (" << fixed(r.b_bias_se, 3) << ") | "
       << fixed(r.variance, 5) << " | " << fixed(r.scaled_variance, 3) << " | " << fixed(r.mse, 5) << " | "
       << (r.argmin ? "*" : "") << " |\n";
  }
  return os.str();
}

}  // namespace mcse
