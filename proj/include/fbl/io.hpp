// Output formatting: round-trippable number text, field CSVs, content
// hashes, and file writing with path-carrying errors.
#pragma once

#include <string>

#include "fbl/grid.hpp"

namespace fbl {

// Shortest representation that round-trips a double ("%.17g").
std::string format_full(double v);

// Header "x,value" (1D) or "x,y,value" (2D); rows in node-index order.
std::string field_to_csv(const Field& field);

std::string sha256_hex(const std::string& bytes);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace fbl
