#include "lastexit/config.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "lastexit/errors.hpp"

namespace lastexit {

namespace {

[[noreturn]] void fail_line(std::size_t line_no, const std::string& what) {
    char msg[256];
    std::snprintf(msg, sizeof msg, "config line %zu: %s", line_no, what.c_str());
    throw ConfigError(msg);
}

std::string strip(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Removes a trailing comment, respecting quoted strings.
std::string strip_comment(const std::string& s) {
    bool in_string = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '"' && (i == 0 || s[i - 1] != '\\')) in_string = !in_string;
        if (c == '#' && !in_string) return s.substr(0, i);
    }
    return s;
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') return false;
    }
    return true;
}

nlohmann::json parse_scalar(const std::string& tok, std::size_t line_no) {
    if (tok == "true") return true;
    if (tok == "false") return false;
    if (tok.size() >= 2 && tok.front() == '"' && tok.back() == '"') {
        std::string out;
        for (std::size_t i = 1; i + 1 < tok.size(); ++i) {
            if (tok[i] == '\\' && i + 2 < tok.size()) {
                char n = tok[i + 1];
                if (n == '"' || n == '\\') {
                    out += n;
                    ++i;
                    continue;
                }
            }
            out += tok[i];
        }
        return out;
    }
    errno = 0;
    char* end = nullptr;
    double x = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0' || errno == ERANGE) {
        fail_line(line_no, "cannot parse value '" + tok + "'");
    }
    bool looks_integral = tok.find_first_of(".eE") == std::string::npos;
    if (looks_integral && std::fabs(x) < 9.2e18) {
        return static_cast<std::int64_t>(std::strtoll(tok.c_str(), nullptr, 10));
    }
    return x;
}

std::vector<std::string> split_array_items(const std::string& body, std::size_t line_no) {
    std::vector<std::string> items;
    std::string cur;
    bool in_string = false;
    for (std::size_t i = 0; i < body.size(); ++i) {
        char c = body[i];
        if (c == '"' && (i == 0 || body[i - 1] != '\\')) in_string = !in_string;
        if (c == ',' && !in_string) {
            items.push_back(strip(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    std::string last = strip(cur);
    if (!last.empty()) items.push_back(last);
    if (in_string) fail_line(line_no, "unterminated string in array");
    for (const std::string& it : items) {
        if (it.empty()) fail_line(line_no, "empty array element");
    }
    return items;
}

nlohmann::json parse_value(const std::string& tok, std::size_t line_no) {
    if (!tok.empty() && tok.front() == '[') {
        if (tok.back() != ']') fail_line(line_no, "unterminated array");
        nlohmann::json arr = nlohmann::json::array();
        for (const std::string& item :
             split_array_items(tok.substr(1, tok.size() - 2), line_no)) {
            arr.push_back(parse_scalar(item, line_no));
        }
        return arr;
    }
    return parse_scalar(tok, line_no);
}

double require_number(const nlohmann::json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
    return v.get<double>();
}

std::string require_string(const nlohmann::json& v, const std::string& key) {
    if (!v.is_string()) throw ConfigError("config key '" + key + "' must be a string");
    return v.get<std::string>();
}

std::uint64_t require_nonneg_int(const nlohmann::json& v, const std::string& key) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
        return static_cast<std::uint64_t>(v.get<std::int64_t>());
    }
    throw ConfigError("config key '" + key + "' must be a nonnegative integer");
}

void reject_unknown(const nlohmann::json& obj, std::initializer_list<const char*> known,
                    const std::string& where) {
    for (auto& [k, v] : obj.items()) {
        (void)v;
        bool ok = false;
        for (const char* name : known)
            if (k == name) {
                ok = true;
                break;
            }
        if (!ok) throw ConfigError("unknown config key '" + k + "' in " + where);
    }
}

CovarianceModel covariance_from_json(const nlohmann::json& section) {
    reject_unknown(section, {"kind", "v", "kappa", "alpha", "Q", "file"}, "[covariance]");
    std::string kind = section.contains("kind") ? require_string(section["kind"], "kind") : "ou";
    double v = section.contains("v") ? require_number(section["v"], "v") : 1.0;

    if (kind == "ou" || kind == "ornstein_uhlenbeck" || kind == "ornstein-uhlenbeck") {
        return CovarianceModel::ornstein_uhlenbeck(v);
    }
    if (kind == "gaussian" || kind == "gaussian_kernel") {
        double kappa = section.contains("kappa") ? require_number(section["kappa"], "kappa") : 1.0;
        return CovarianceModel::gaussian_kernel(kappa, v);
    }
    if (kind == "power_exponential" || kind == "power-exponential" || kind == "powerexp") {
        if (!section.contains("alpha")) {
            throw ConfigError("power_exponential covariance requires 'alpha'");
        }
        double alpha = require_number(section["alpha"], "alpha");
        double kappa = section.contains("kappa") ? require_number(section["kappa"], "kappa") : 1.0;
        return CovarianceModel::power_exponential(alpha, kappa, v);
    }
    if (kind == "tabulated") {
        if (!section.contains("file") || !section.contains("alpha") || !section.contains("Q")) {
            throw ConfigError("tabulated covariance requires 'file', 'alpha', and 'Q'");
        }
        auto [t, rho] = load_table_file(require_string(section["file"], "file"));
        return CovarianceModel::tabulated(std::move(t), std::move(rho),
                                          require_number(section["alpha"], "alpha"),
                                          require_number(section["Q"], "Q"));
    }
    throw ConfigError("unknown covariance kind '" + kind +
                      "' (expected ou, gaussian, power_exponential, or tabulated)");
}

Boundary boundary_from_json(const nlohmann::json& section) {
    reject_unknown(section, {"kind", "d", "q"}, "[boundary]");
    std::string kind =
        section.contains("kind") ? require_string(section["kind"], "kind") : "polynomial";
    if (kind == "polynomial" || kind == "poly") {
        double d = section.contains("d") ? require_number(section["d"], "d") : 2.0;
        return builtin_polynomial(d);
    }
    if (kind == "stretched_exp" || kind == "stretched_exponential") {
        if (!section.contains("q")) throw ConfigError("stretched_exp boundary requires 'q'");
        return builtin_stretched_exponential(require_number(section["q"], "q"));
    }
    if (kind == "user" || kind == "user_defined") {
        throw ConfigError(
            "user-defined boundaries are available through the library API only; "
            "config files support polynomial and stretched_exp");
    }
    throw ConfigError("unknown boundary kind '" + kind +
                      "' (expected polynomial or stretched_exp)");
}

}  // namespace

nlohmann::json parse_toml_subset(const std::string& text) {
    nlohmann::json doc = nlohmann::json::object();
    nlohmann::json* scope = &doc;

    std::istringstream in(text);
    std::string raw_line;
    std::size_t line_no = 0;
    while (std::getline(in, raw_line)) {
        ++line_no;
        std::string line = strip(strip_comment(raw_line));
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') fail_line(line_no, "unterminated section header");
            std::string name = strip(line.substr(1, line.size() - 2));
            if (!valid_key(name)) {
                fail_line(line_no, "bad section name '" + name + "' (one level, [a-z0-9_-])");
            }
            if (!doc.contains(name)) {
                doc[name] = nlohmann::json::object();
            } else if (!doc[name].is_object()) {
                fail_line(line_no, "section '" + name + "' redefines a key");
            }
            scope = &doc[name];
            continue;
        }

        std::size_t eq = std::string::npos;
        bool in_string = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            char c = line[i];
            if (c == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
            if (c == '=' && !in_string) {
                eq = i;
                break;
            }
        }
        if (eq == std::string::npos) fail_line(line_no, "expected 'key = value'");
        std::string key = strip(line.substr(0, eq));
        std::string value = strip(line.substr(eq + 1));
        if (!valid_key(key)) fail_line(line_no, "bad key '" + key + "'");
        if (value.empty()) fail_line(line_no, "missing value for '" + key + "'");
        if (scope->contains(key)) fail_line(line_no, "duplicate key '" + key + "'");
        (*scope)[key] = parse_value(value, line_no);
    }
    return doc;
}

ExperimentConfig experiment_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("config root must be a table");
    reject_unknown(doc,
                   {"covariance", "boundary", "eps", "eps_ladder", "n_replicates", "seed",
                    "grid", "out", "format"},
                   "config");

    ExperimentConfig cfg;
    cfg.raw = doc;

    if (doc.contains("covariance")) {
        if (!doc["covariance"].is_object()) throw ConfigError("[covariance] must be a section");
        cfg.model = covariance_from_json(doc["covariance"]);
    }
    if (doc.contains("boundary")) {
        if (!doc["boundary"].is_object()) throw ConfigError("[boundary] must be a section");
        cfg.boundary = boundary_from_json(doc["boundary"]);
    }

    if (doc.contains("eps") && doc.contains("eps_ladder")) {
        throw ConfigError("give either 'eps' or 'eps_ladder', not both");
    }
    if (doc.contains("eps")) {
        cfg.eps_ladder = {require_number(doc["eps"], "eps")};
    } else if (doc.contains("eps_ladder")) {
        const nlohmann::json& arr = doc["eps_ladder"];
        if (!arr.is_array() || arr.empty()) {
            throw ConfigError("'eps_ladder' must be a nonempty array");
        }
        cfg.eps_ladder.clear();
        for (const auto& v : arr) cfg.eps_ladder.push_back(require_number(v, "eps_ladder"));
    }
    for (double e : cfg.eps_ladder) {
        if (!(e > 0.0 && e < 1.0)) throw ConfigError("every eps must lie in (0, 1)");
    }
    for (std::size_t i = 1; i < cfg.eps_ladder.size(); ++i) {
        if (!(cfg.eps_ladder[i] < cfg.eps_ladder[i - 1])) {
            throw ConfigError("eps_ladder must be strictly decreasing");
        }
    }

    if (doc.contains("n_replicates")) {
        cfg.n_replicates = require_nonneg_int(doc["n_replicates"], "n_replicates");
        if (cfg.n_replicates < 100) {
            throw ConfigError("n_replicates must be at least 100");
        }
    }
    if (doc.contains("seed")) cfg.seed = require_nonneg_int(doc["seed"], "seed");

    if (doc.contains("grid")) {
        const nlohmann::json& g = doc["grid"];
        if (!g.is_object()) throw ConfigError("[grid] must be a section");
        reject_unknown(g, {"step", "horizon"}, "[grid]");
        if (g.contains("step")) cfg.grid.step = require_number(g["step"], "step");
        if (g.contains("horizon")) cfg.grid.horizon = require_number(g["horizon"], "horizon");
        if (cfg.grid.step < 0.0 || cfg.grid.horizon < 0.0) {
            throw ConfigError("grid step and horizon must be nonnegative");
        }
    }

    if (doc.contains("out")) cfg.out = require_string(doc["out"], "out");
    if (doc.contains("format")) {
        cfg.format = require_string(doc["format"], "format");
        if (cfg.format != "json" && cfg.format != "csv") {
            throw ConfigError("format must be 'json' or 'csv'");
        }
    }
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return experiment_from_json(parse_toml_subset(buf.str()));
}

std::pair<std::vector<double>, std::vector<double>> load_table_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open table file: " + path);
    std::vector<double> t, rho;
    std::string raw_line;
    std::size_t line_no = 0;
    while (std::getline(f, raw_line)) {
        ++line_no;
        std::string line = strip(strip_comment(raw_line));
        if (line.empty()) continue;
        std::istringstream row(line);
        double a = 0.0, b = 0.0;
        if (!(row >> a >> b)) {
            char msg[128];
            std::snprintf(msg, sizeof msg, "table %s line %zu: expected two numbers",
                          path.c_str(), line_no);
            throw ConfigError(msg);
        }
        std::string extra;
        if (row >> extra) {
            char msg[128];
            std::snprintf(msg, sizeof msg, "table %s line %zu: trailing tokens", path.c_str(),
                          line_no);
            throw ConfigError(msg);
        }
        t.push_back(a);
        rho.push_back(b);
    }
    if (t.size() < 2) throw ConfigError("table file needs at least two rows: " + path);
    return {std::move(t), std::move(rho)};
}

}  // namespace lastexit
