#include "ifslab/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <locale>
#include <sstream>

#include "ifslab/errors.hpp"

namespace ifslab {

Format parse_format(const std::string& s) {
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  throw UsageError("unknown format '" + s + "' (expected csv or json)");
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << static_cast<long long>(v);
    return os.str();
  }
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << v;
  return os.str();
}

void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_real(row[i]);
    os << '\n';
  }
}

namespace {

Json real_json(double v) {
  if (std::isfinite(v)) return v;
  return format_real(v);  // JSON has no inf/nan literals
}

Json table_json(const Table& t) {
  Json rows = Json::array();
  for (const auto& row : t.rows) {
    Json r = Json::array();
    for (double v : row) r.push_back(real_json(v));
    rows.push_back(std::move(r));
  }
  return Json{{"columns", t.columns}, {"rows", std::move(rows)}};
}

}  // namespace

Json report_json(const ExperimentReport& r, bool include_tables, bool include_timing) {
  Json j;
  j["experiment"] = r.experiment;
  j["config"] = r.config;
  j["aggregates"] = r.aggregates;
  j["censored"] = r.censored;
  if (include_timing) j["wall_time_s"] = r.wall_time_s;
  if (include_tables) {
    Json tabs = Json::object();
    for (const auto& [name, t] : r.tables) tabs[name] = table_json(t);
    j["tables"] = std::move(tabs);
  }
  return j;
}

Json coefficients_json(const CoefficientSequence& cs) {
  return Json{{"p0", cs.p0},
              {"k", cs.k},
              {"l", cs.l},
              {"regime", to_string(cs.regime)},
              {"H", cs.H},
              {"tail_ratio", cs.tail_ratio},
              {"recurrence_residual", cs.recurrence_residual()},
              {"b", cs.b}};
}

Json roots_json(const RootClassification& rc) {
  Json roots = Json::array();
  for (const auto& z : rc.roots) roots.push_back({{"re", z.real()}, {"im", z.imag()}});
  return Json{{"roots", std::move(roots)},
              {"counts", {{"inside", rc.inside}, {"on", rc.on_circle}, {"outside", rc.outside}}},
              {"nu1", rc.nu1}};
}

void write_coefficients_csv(std::ostream& os, const CoefficientSequence& cs) {
  os << "h,b_h\n";
  for (std::size_t h = 0; h < cs.b.size(); ++h) os << h << ',' << format_real(cs.b[h]) << '\n';
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw IoError("failed writing to stdout");
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  f.close();
  if (!f) throw IoError("failed writing '" + path + "'");
}

void emit_report(const ExperimentReport& r, const std::string& path, Format fmt, const std::string& table) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  if (fmt == Format::json) {
    os << report_json(r).dump(2) << '\n';
  } else {
    if (r.tables.empty()) throw UsageError("report has no tables to write as CSV");
    write_csv(os, table.empty() ? r.tables.front().second : r.table(table));
  }
  write_text(path, os.str());
}

void emit_coefficients(const CoefficientSequence& cs, const std::string& path, Format fmt) {
  std::ostringstream os;
  if (fmt == Format::json) os << coefficients_json(cs).dump(2) << '\n';
  else write_coefficients_csv(os, cs);
  write_text(path, os.str());
}

void emit_roots(const RootClassification& rc, const std::string& path, Format fmt) {
  std::ostringstream os;
  if (fmt == Format::json) {
    os << roots_json(rc).dump(2) << '\n';
  } else {
    os << "re,im,modulus\n";
    for (const auto& z : rc.roots)
      os << format_real(z.real()) << ',' << format_real(z.imag()) << ',' << format_real(std::abs(z)) << '\n';
  }
  write_text(path, os.str());
}

}  // namespace ifslab
