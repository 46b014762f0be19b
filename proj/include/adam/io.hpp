#pragma once
// Small file helpers: atomic writes, line reading, TSV/CSV splitting.

#include <string>
#include <vector>

namespace adam::io {

// Writes content to a temp file in the same directory, then renames over the
// target so readers never observe a partial file.
void atomic_write(const std::string& path, const std::string& content);

std::vector<std::string> read_lines(const std::string& path);

std::vector<std::string> split(const std::string& line, char sep);

}  // namespace adam::io
