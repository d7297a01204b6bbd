#include "qmalsim/report.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace qmalsim {

namespace {

std::string format_real(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void dump_value(const OrderedJson& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string pad_in(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case nlohmann::detail::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      std::size_t i = 0;
      for (const auto& [key, value] : j.items()) {
        out += pad_in;
        out += OrderedJson(key).dump();  // escaped string literal
        out += ": ";
        dump_value(value, out, indent + 1);
        if (++i < j.size()) out += ',';
        out += '\n';
      }
      out += pad + "}";
      return;
    }
    case nlohmann::detail::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        out += pad_in;
        dump_value(j[i], out, indent + 1);
        if (i + 1 < j.size()) out += ',';
        out += '\n';
      }
      out += pad + "]";
      return;
    }
    case nlohmann::detail::value_t::number_float:
      out += format_real(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

}  // namespace

std::string dump_json(const OrderedJson& doc) {
  std::string out;
  dump_value(doc, out, 0);
  out += '\n';
  return out;
}

OrderedJson metrics_to_json(const MetricsReport& report, bool include_per_class) {
  OrderedJson j = OrderedJson::object();
  for (const MetricField& mf : metric_fields()) {
    j[mf.name] = report.*(mf.field);
  }
  if (include_per_class) {
    OrderedJson per_class = OrderedJson::array();
    for (const PerClassMetrics& pc : report.per_class) {
      OrderedJson row = OrderedJson::object();
      row["precision"] = pc.precision;
      row["recall"] = pc.recall;
      row["f1"] = pc.f1;
      row["fpr"] = pc.fpr;
      row["fnr"] = pc.fnr;
      per_class.push_back(std::move(row));
    }
    j["per_class"] = std::move(per_class);
  }
  return j;
}

void write_report(const OrderedJson& doc, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << dump_json(doc);
  if (!out) throw std::runtime_error("write failed for " + path);
}

OrderedJson read_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  OrderedJson doc;
  try {
    doc = OrderedJson::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("malformed report " + path + ": " + e.what());
  }
  return doc;
}

void print_report_table(const OrderedJson& report, std::ostream& out) {
  OrderedJson mean, stddev;
  if (report.contains("aggregate")) {
    mean = report["aggregate"]["mean"];
    stddev = report["aggregate"]["std"];
  } else if (report.contains("metrics")) {
    mean = report["metrics"];
    for (const MetricField& mf : metric_fields()) stddev[mf.name] = 0.0;
  } else {
    throw std::runtime_error("report has neither 'aggregate' nor 'metrics'");
  }
  out << "Metric       Mean +/- Std (%)\n";
  for (const MetricField& mf : metric_fields()) {
    if (!mean.contains(mf.name)) {
      throw std::runtime_error("report is missing metric '" + std::string(mf.name) + "'");
    }
    char line[96];
    std::snprintf(line, sizeof line, "%-12s %6.2f +/- %.2f\n", mf.label,
                  mean[mf.name].get<double>() * 100.0,
                  stddev[mf.name].get<double>() * 100.0);
    out << line;
  }
}

}  // namespace qmalsim
