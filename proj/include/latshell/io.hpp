#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace latshell {

inline constexpr std::string_view kToolVersion = "latshell 0.1.0";

// Fixed 12-significant-digit formatting for every floating output.
std::string format_double(double v);

std::uint64_t fnv1a64(std::string_view data);

// CSV with '#'-prefixed metadata lines before the header.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    void metadata(std::string_view key, std::string_view value);
    void header(const std::vector<std::string>& names);
    void row(const std::vector<std::string>& cells);

private:
    std::ostream& out_;
};

} // namespace latshell
