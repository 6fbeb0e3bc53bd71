#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Minimal RFC 4180 CSV plumbing shared by the persisted stores.
namespace citits::csv {

std::vector<std::string> split_line(std::string_view line);
std::string join_line(const std::vector<std::string>& fields);

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

std::optional<double> parse_double(std::string_view s);
std::optional<std::int64_t> parse_int(std::string_view s);
std::optional<std::uint64_t> parse_uint(std::string_view s);

// Writes a header row and one row per record.
void write_file(const std::filesystem::path& path, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows);

// Calls `row` with (fields, 1-based line number) for each data line after
// checking the header. Throws CorruptRecord on a header mismatch or when a
// row has the wrong field count.
void read_file(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::function<void(const std::vector<std::string>&, std::size_t)>& row);

}  // namespace citits::csv
