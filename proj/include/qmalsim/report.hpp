#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"
#include "qmalsim/metrics.hpp"

namespace qmalsim {

using OrderedJson = nlohmann::ordered_json;

// Serializes with insertion-ordered keys, two-space indentation and reals
// formatted to 17 significant digits, so identical documents produce
// byte-identical files.
std::string dump_json(const OrderedJson& doc);

OrderedJson metrics_to_json(const MetricsReport& report, bool include_per_class = true);

void write_report(const OrderedJson& doc, const std::string& path);
OrderedJson read_report(const std::string& path);

// Prints the seven metrics as "mean +/- std" percentage rows. Accepts both
// aggregated train reports (an "aggregate" object) and single eval reports
// (a "metrics" object, rendered with std 0).
void print_report_table(const OrderedJson& report, std::ostream& out);

}  // namespace qmalsim
