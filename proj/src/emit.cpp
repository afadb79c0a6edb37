#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "dfrc/harness.hpp"

namespace dfrc {

namespace {

// Shortest representation that round-trips a double exactly.
std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string render_csv(const std::vector<MetricsRecord>& records) {
  std::ostringstream out;
  out << "sweep_var,sweep_value,scheme,metric,mean,std_err,trials,"
         "master_seed\n";
  for (const MetricsRecord& r : records) {
    out << r.sweep_var << ',' << fmt_double(r.sweep_value) << ',' << r.scheme
        << ',' << r.metric << ',' << fmt_double(r.mean) << ','
        << fmt_double(r.std_err) << ',' << r.trials << ',' << r.master_seed
        << '\n';
  }
  return out.str();
}

std::string render_json(const std::vector<MetricsRecord>& records) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const MetricsRecord& r : records) {
    nlohmann::ordered_json row;
    row["sweep_var"] = r.sweep_var;
    row["sweep_value"] = r.sweep_value;
    row["scheme"] = r.scheme;
    row["metric"] = r.metric;
    row["mean"] = r.mean;
    row["std_err"] = r.std_err;
    row["trials"] = r.trials;
    row["master_seed"] = r.master_seed;
    arr.push_back(std::move(row));
  }
  return arr.dump(2) + "\n";
}

std::vector<MetricsRecord> parse_json_records(const std::string& text) {
  const nlohmann::json doc = nlohmann::json::parse(text);
  if (!doc.is_array()) {
    throw std::invalid_argument("results document must be a JSON array");
  }
  std::vector<MetricsRecord> records;
  records.reserve(doc.size());
  for (const auto& row : doc) {
    MetricsRecord r;
    r.sweep_var = row.at("sweep_var").get<std::string>();
    r.sweep_value = row.at("sweep_value").get<double>();
    r.scheme = row.at("scheme").get<std::string>();
    r.metric = row.at("metric").get<std::string>();
    r.mean = row.at("mean").get<double>();
    r.std_err = row.at("std_err").get<double>();
    r.trials = row.at("trials").get<std::uint64_t>();
    r.master_seed = row.at("master_seed").get<std::uint64_t>();
    records.push_back(std::move(r));
  }
  return records;
}

void emit_results(const std::vector<MetricsRecord>& records,
                  const std::string& path, const std::string& format) {
  std::string body;
  if (format == "csv") {
    body = render_csv(records);
  } else if (format == "json") {
    body = render_json(records);
  } else {
    throw std::invalid_argument("unknown output format: " + format);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open output file: " + path);
  }
  out << body;
  if (!out) {
    throw std::runtime_error("failed while writing output file: " + path);
  }
}

}  // namespace dfrc
