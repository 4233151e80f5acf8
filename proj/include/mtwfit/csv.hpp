#ifndef MTWFIT_CSV_HPP
#define MTWFIT_CSV_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace mtwfit::csv {

/// Shortest round-trip decimal form of a double (deterministic bytes).
std::string format_double(double v);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

/// Writes a UTF-8 comma-separated table with a header row.
void write(const std::filesystem::path& path, const Table& table);

/// Reads a comma-separated numeric table. The first line must be a header
/// row; malformed data lines are reported with their 1-based line number.
Table read(const std::filesystem::path& path);

} // namespace mtwfit::csv

#endif
