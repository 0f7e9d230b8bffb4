// Output formatting: round-trip-exact doubles, CSV/JSON writers, and the
// reproducibility header (resolved config + version) every file carries.
#pragma once

#include "json.hpp"

#include <string>
#include <vector>

namespace lastexit {

// Shortest text that parses back to the same double ("%.17g" fallback).
std::string fmt_double(double x);

// JSON document with {"version", "config"} header fields prepended.
nlohmann::json with_header(const nlohmann::json& config, nlohmann::json body);

// CSV: "# version: ..." and "# config: <json>" comment lines, then the header
// row and data rows. Cells are written verbatim.
std::string csv_document(const nlohmann::json& config,
                         const std::vector<std::string>& columns,
                         const std::vector<std::vector<std::string>>& rows);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace lastexit
