#include "gazeshutter/csvio.hpp"

#include <charconv>
#include <cstdlib>
#include <system_error>

#include "gazeshutter/errors.hpp"

namespace gazeshutter {

std::string format_double(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, ptr);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    if (!fields.empty() && !fields.back().empty() && fields.back().back() == '\r')
        fields.back().pop_back();
    return fields;
}

double parse_double_field(const std::string& field, const std::filesystem::path& file,
                          std::size_t line_no, const std::string& column) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw DataError(file.string() + ": malformed value '" + field + "' for column '" +
                        column + "', line " + std::to_string(line_no));
    return value;
}

long parse_int_field(const std::string& field, const std::filesystem::path& file,
                     std::size_t line_no, const std::string& column) {
    long value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw DataError(file.string() + ": malformed value '" + field + "' for column '" +
                        column + "', line " + std::to_string(line_no));
    return value;
}

CsvReader::CsvReader(const std::filesystem::path& p) : path(p), stream_(p) {
    if (!stream_) throw DataError("cannot open file: " + p.string());
}

bool CsvReader::next(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(stream_, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        fields = split_csv_line(line);
        return true;
    }
    return false;
}

void expect_header(CsvReader& reader, const std::vector<std::string>& expected) {
    std::vector<std::string> fields;
    if (!reader.next(fields))
        throw DataError(reader.path.string() + ": empty file, expected header row");
    if (fields != expected) {
        std::string want;
        for (const auto& c : expected) {
            if (!want.empty()) want += ",";
            want += c;
        }
        throw DataError(reader.path.string() + ": bad header, expected '" + want + "'");
    }
}

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path.string());
    return out;
}

}  // namespace gazeshutter
