#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fbnn {

// Filesystem or parse failure while reading/writing artifacts.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace csv {

// Shortest decimal form that round-trips the value exactly.
std::string format_double(double value);
double parse_double(std::string_view text);
long long parse_int(std::string_view text);

std::vector<std::string> split(std::string_view line, char delim = ',');
std::string_view trim(std::string_view text);

std::vector<std::string> read_lines(const std::string& path);
void write_file(const std::string& path, const std::string& content);
void append_file(const std::string& path, const std::string& content);
bool file_exists(const std::string& path);

}  // namespace csv
}  // namespace fbnn
