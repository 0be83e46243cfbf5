#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace gazeshutter {

// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

// Splits one CSV line on commas. No quoting: the formats used here never
// embed commas in fields.
std::vector<std::string> split_csv_line(const std::string& line);

// Parses a double, throwing DataError with file/line context on failure.
double parse_double_field(const std::string& field, const std::filesystem::path& file,
                          std::size_t line_no, const std::string& column);

long parse_int_field(const std::string& field, const std::filesystem::path& file,
                     std::size_t line_no, const std::string& column);

struct CsvReader {
    explicit CsvReader(const std::filesystem::path& path);

    // Reads the next non-empty line split into fields; false at EOF.
    bool next(std::vector<std::string>& fields);

    std::filesystem::path path;
    std::size_t line_no = 0;

private:
    std::ifstream stream_;
};

// Validates that the header line matches `expected` exactly.
void expect_header(CsvReader& reader, const std::vector<std::string>& expected);

std::ofstream open_output(const std::filesystem::path& path);

}  // namespace gazeshutter
