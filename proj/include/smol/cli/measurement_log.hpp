#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "smol/sweepproto.hpp"

namespace smol::cli {

inline constexpr const char* kLogHeader =
    "timestamp,device_id,tx_power_dbm,rssi_dbm,height_cm,depth_cm,scenario,vwc_truth_pct";

/// Shortest decimal text that parses back to exactly `v`.
std::string format_number(double v);

/// Writes header plus one row per measurement. Scenario labels may not
/// contain commas, quotes or line breaks.
void write_log(std::ostream& os, const std::vector<sweepproto::Measurement>& rows);
void write_log(const std::filesystem::path& path, const std::vector<sweepproto::Measurement>& rows);

std::vector<sweepproto::Measurement> read_log(std::istream& is);
std::vector<sweepproto::Measurement> read_log(const std::filesystem::path& path);

/// Splits one CSV line on commas (no quoting).
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace smol::cli
