#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "cascade/diagnostics.hpp"
#include "cascade/experiments.hpp"

namespace cascade {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kCodeVersion = "1.0.0";

/// Shortest round-trip decimal form, independent of the C locale.
std::string format_double(double v);

/// Column names of a stream CSV: t, tau, norm_<m>..., sup, [cm], [shell_1...].
std::vector<std::string> csv_columns(const DiagnosticsStream& s);
void write_stream_csv(std::ostream& os, const DiagnosticsStream& s);
std::string stream_csv(const DiagnosticsStream& s);
/// Inverse of write_stream_csv; nu and the cadence are recovered from the t/tau columns.
DiagnosticsStream read_stream_csv(std::istream& is, std::uint64_t stream_id);

/// Two-column CSV (nu, q) with an optional header row.
std::vector<ScalingPoint> read_scaling_csv(std::istream& is);

/// Writes to a sibling temporary and renames over `path`.
void atomic_write(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

/// FNV-1a 64-bit, as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& data);

using Json = nlohmann::ordered_json;

/// Frozen column and field orders for every output kind.
Json schema_json();

Json to_json(const EnsembleSummary& s);
Json to_json(const ScalingFit& f);
Json to_json(const ObservableVerdict& v);
Json to_json(const OccupationReport& r);
Json to_json(const StationaryReport& r);
Json to_json(const BalanceReport& r);
Json to_json(const StationaryEntry& e, const std::vector<double>& orders);
Json to_json(const MomentBracket& b);

/// One JSON object per line, each stamped with "schema_version" and "record".
std::string json_line(const std::string& record, Json body);

}  // namespace cascade
