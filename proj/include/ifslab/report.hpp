#pragma once

#include <iosfwd>
#include <string>

#include "ifslab/experiments.hpp"
#include "ifslab/stationary_measures.hpp"

namespace ifslab {

enum class Format { csv, json };

Format parse_format(const std::string& s);

/// Shortest round-trip text of a double, '.' decimal separator, 17 significant digits.
std::string format_real(double v);

void write_csv(std::ostream& os, const Table& t);

Json report_json(const ExperimentReport& r, bool include_tables = true, bool include_timing = true);
Json coefficients_json(const CoefficientSequence& cs);
Json roots_json(const RootClassification& rc);

void write_coefficients_csv(std::ostream& os, const CoefficientSequence& cs);

/// Writes text to path ("-" means stdout). Throws IoError on failure.
void write_text(const std::string& path, const std::string& text);

/// CSV emits the named table (the first one when empty); JSON emits config,
/// aggregates, censor counts, wall time and all tables.
void emit_report(const ExperimentReport& r, const std::string& path, Format fmt, const std::string& table = "");
void emit_coefficients(const CoefficientSequence& cs, const std::string& path, Format fmt);
void emit_roots(const RootClassification& rc, const std::string& path, Format fmt);

}  // namespace ifslab
