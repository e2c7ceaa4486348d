#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "lreach/bench.hpp"

namespace lreach {

ReportFormat parse_report_format(std::string_view name) {
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "jsonl") return ReportFormat::kJsonl;
  throw std::invalid_argument("unknown format '" + std::string(name) + "'");
}

namespace {

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

template <class T>
T parse_field(const std::string& text, std::size_t row) {
  T v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::runtime_error("csv row " + std::to_string(row) + ": bad number '" + text + "'");
  }
  return v;
}

nlohmann::json json_number(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

}  // namespace

void write_csv(std::span<const RunRecord> records, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << csv_field(r.experiment) << ',' << csv_field(r.storage) << ',' << r.workers << ','
        << csv_field(r.model) << ',' << number(r.fill) << ',' << number(r.throughput) << ','
        << number(r.wall_ms) << ',' << number(r.speedup) << ',' << number(r.efficiency) << ','
        << r.lock_waits << ',' << r.cas_failures << ',' << number(r.probes_per_op) << '\n';
  }
}

void write_jsonl(std::span<const RunRecord> records, std::ostream& out) {
  for (const auto& r : records) {
    nlohmann::json j = {
        {"experiment", r.experiment},
        {"storage", r.storage},
        {"workers", r.workers},
        {"model", r.model},
        {"fill", json_number(r.fill)},
        {"throughput", json_number(r.throughput)},
        {"wall_ms", json_number(r.wall_ms)},
        {"speedup", json_number(r.speedup)},
        {"efficiency", json_number(r.efficiency)},
        {"lock_waits", r.lock_waits},
        {"cas_failures", r.cas_failures},
        {"probes_per_op", json_number(r.probes_per_op)},
        {"status", r.status},
        {"raw_wall_ms", r.raw_wall_ms},
    };
    out << j.dump() << '\n';
  }
}

std::vector<RunRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw std::runtime_error("csv: unexpected header '" + line + "'");

  std::vector<RunRecord> records;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto f = split_csv_row(line);
    if (f.size() != 12) {
      throw std::runtime_error("csv row " + std::to_string(row) + ": expected 12 fields, got " +
                               std::to_string(f.size()));
    }
    RunRecord r;
    r.experiment = f[0];
    r.storage = f[1];
    r.workers = parse_field<std::size_t>(f[2], row);
    r.model = f[3];
    r.fill = parse_field<double>(f[4], row);
    r.throughput = parse_field<double>(f[5], row);
    r.wall_ms = parse_field<double>(f[6], row);
    r.speedup = parse_field<double>(f[7], row);
    r.efficiency = parse_field<double>(f[8], row);
    r.lock_waits = parse_field<std::uint64_t>(f[9], row);
    r.cas_failures = parse_field<std::uint64_t>(f[10], row);
    r.probes_per_op = parse_field<double>(f[11], row);
    records.push_back(std::move(r));
  }
  return records;
}

void report(std::span<const RunRecord> records, ReportFormat format, const std::string& path) {
  if (records.empty()) throw std::invalid_argument("report: no records to write");
  auto emit = [&](std::ostream& out) {
    if (format == ReportFormat::kCsv) {
      write_csv(records, out);
    } else {
      write_jsonl(records, out);
    }
    out.flush();
    if (!out) throw std::runtime_error("report: write to '" + path + "' failed");
  };
  if (path == "-") {
    emit(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("report: cannot open '" + path + "' for writing");
  emit(out);
}

}  // namespace lreach
