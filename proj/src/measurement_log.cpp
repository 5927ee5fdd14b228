#include "smol/cli/measurement_log.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "smol/errors.hpp"

namespace smol::cli {
namespace {

template <typename T>
T parse_field(const std::string& text, const char* column, std::size_t line_no) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw IoError("line " + std::to_string(line_no) + ": bad " + column + " value '" + text +
                  "'");
  }
  return value;
}

void check_label(const std::string& label) {
  if (label.find_first_of(",\"\r\n") != std::string::npos) {
    throw ValidationError("scenario label '" + label + "' contains a CSV delimiter");
  }
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, r.ptr};
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string::size_type start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

void write_log(std::ostream& os, const std::vector<sweepproto::Measurement>& rows) {
  os << kLogHeader << "\n";
  for (const auto& m : rows) {
    check_label(m.scenario);
    os << m.timestamp << ',' << m.device_id << ',' << m.tx_power_dbm << ','
       << format_number(m.rssi_dbm) << ',' << format_number(m.height_cm) << ','
       << format_number(m.depth_cm) << ',' << m.scenario << ',';
    if (m.vwc_truth_pct) os << format_number(*m.vwc_truth_pct);
    os << "\n";
  }
}

void write_log(const std::filesystem::path& path,
               const std::vector<sweepproto::Measurement>& rows) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  write_log(os, rows);
  if (!os) throw IoError("write to '" + path.string() + "' failed");
}

std::vector<sweepproto::Measurement> read_log(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("measurement log is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kLogHeader) throw IoError("unexpected measurement log header: '" + line + "'");

  std::vector<sweepproto::Measurement> rows;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 8) {
      throw IoError("line " + std::to_string(line_no) + ": expected 8 columns, got " +
                    std::to_string(f.size()));
    }
    sweepproto::Measurement m;
    m.timestamp = parse_field<std::int64_t>(f[0], "timestamp", line_no);
    m.device_id = parse_field<std::uint16_t>(f[1], "device_id", line_no);
    m.tx_power_dbm = parse_field<int>(f[2], "tx_power_dbm", line_no);
    m.rssi_dbm = parse_field<double>(f[3], "rssi_dbm", line_no);
    m.height_cm = parse_field<double>(f[4], "height_cm", line_no);
    m.depth_cm = parse_field<double>(f[5], "depth_cm", line_no);
    m.scenario = f[6];
    if (!f[7].empty()) {
      const double v = parse_field<double>(f[7], "vwc_truth_pct", line_no);
      if (!(v >= 0.0 && v <= 100.0)) {
        throw IoError("line " + std::to_string(line_no) + ": vwc_truth_pct outside [0, 100]");
      }
      m.vwc_truth_pct = v;
    }
    rows.push_back(std::move(m));
  }
  return rows;
}

std::vector<sweepproto::Measurement> read_log(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open measurement log '" + path.string() + "'");
  return read_log(is);
}

}  // namespace smol::cli
