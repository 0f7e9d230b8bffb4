#include "lastexit/io.hpp"

#include "lastexit/errors.hpp"
#include "lastexit/version.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

namespace lastexit {

std::string fmt_double(double x) {
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == x || (back != back && x != x)) return buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

nlohmann::json with_header(const nlohmann::json& config, nlohmann::json body) {
    nlohmann::json doc;
    doc["version"] = kVersion;
    doc["config"] = config;
    for (auto& [k, v] : body.items()) doc[k] = std::move(v);
    return doc;
}

std::string csv_document(const nlohmann::json& config,
                         const std::vector<std::string>& columns,
                         const std::vector<std::vector<std::string>>& rows) {
    std::string out;
    out += "# version: ";
    out += kVersion;
    out += "\n# config: ";
    out += config.dump();
    out += "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out += ',';
        out += columns[i];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += row[i];
        }
        out += '\n';
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open for writing: " + path);
    f << content;
    if (!f) throw ResourceError("write failed: " + path);
}

}  // namespace lastexit
