#include "mtwfit/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mtwfit::csv {

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write(const std::filesystem::path& path, const Table& table) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("csv: cannot open for writing: " + path.string());
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i)
            os << ',';
        os << table.header[i];
    }
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i)
                os << ',';
            os << format_double(row[i]);
        }
        os << '\n';
    }
    if (!os)
        throw std::runtime_error("csv: write failed: " + path.string());
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ','))
        out.push_back(field);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

} // namespace

Table read(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::runtime_error("csv: cannot open: " + path.string());
    Table table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const std::vector<std::string> fields = split(line);
        if (line_no == 1) {
            table.header = fields;
            continue;
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& field : fields) {
            double v = 0.0;
            const char* begin = field.data();
            const char* end = begin + field.size();
            while (begin < end && (*begin == ' ' || *begin == '\t'))
                ++begin;
            const auto res = std::from_chars(begin, end, v);
            if (res.ec != std::errc{} || res.ptr != end)
                throw std::runtime_error("csv: malformed value '" + field + "' at line " +
                                         std::to_string(line_no) + " of " + path.string());
            row.push_back(v);
        }
        if (!table.header.empty() && row.size() != table.header.size())
            throw std::runtime_error("csv: wrong column count at line " +
                                     std::to_string(line_no) + " of " + path.string());
        table.rows.push_back(std::move(row));
    }
    if (table.header.empty())
        throw std::runtime_error("csv: missing header row in " + path.string());
    return table;
}

} // namespace mtwfit::csv
