#pragma once

#include <filesystem>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

// CSV output with deterministic formatting. Every file starts with comment
// lines embedding the effective configuration, so a run can be reproduced
// from any of its outputs.

namespace acbe::csv {

/// Shortest round-trippable decimal form ("%.17g" fallback); integers print
/// without an exponent. Deterministic across runs.
std::string format_double(double v);
void format_value(std::ostream& os, double v);

class Table {
public:
    explicit Table(std::vector<std::string> columns);

    /// Comment line(s) placed before the header row; "# " is prepended.
    void add_comment(const std::string& line);

    void add_row(const std::vector<double>& values);
    void add_row_mixed(const std::vector<std::string>& values);

    std::string to_string() const;

    /// Writes atomically-ish (whole buffer at once, binary mode). Creates
    /// parent directories. Throws std::runtime_error naming the path on
    /// failure.
    void write_file(const std::filesystem::path& path) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::string> comments_;
    std::vector<std::vector<std::string>> rows_;
};

/// Writes raw text to a file, creating parent directories; throws with the
/// path on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace acbe::csv
