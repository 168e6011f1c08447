#include "airnet/config.hpp"

#include <fstream>
#include <sstream>

#include "airnet/errors.hpp"
#include "airnet/util.hpp"

namespace airnet {

std::string RunConfig::get_str(const std::string& key, const std::string& fallback) const {
    auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
}

double RunConfig::get_num(const std::string& key, double fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    try {
        size_t used = 0;
        const double v = std::stod(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument(it->second);
        return v;
    } catch (const std::exception&) {
        throw config_error("config key '" + key + "' is not a number: " + it->second);
    }
}

int RunConfig::get_int(const std::string& key, int fallback) const {
    const double v = get_num(key, double(fallback));
    const int i = int(v);
    if (double(i) != v) throw config_error("config key '" + key + "' is not an integer");
    return i;
}

std::uint64_t RunConfig::get_seed() const {
    auto it = values.find("seed");
    if (it == values.end()) return 1;
    try {
        return std::stoull(it->second);
    } catch (const std::exception&) {
        throw config_error("config key 'seed' is not an unsigned integer");
    }
}

std::string RunConfig::require(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end() || it->second.empty())
        throw config_error("required config key '" + key + "' is missing");
    return it->second;
}

std::string RunConfig::canonical() const {
    std::string out;
    for (const auto& [k, v] : values) out += k + "=" + v + "\n";
    return out;
}

std::string RunConfig::hash() const { return to_hex(fnv1a64(canonical())); }

RunConfig parse_config(std::istream& in) {
    RunConfig cfg;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw config_error("config line " + std::to_string(line_no) +
                               " is not key=value: " + s);
        const std::string key = trim(s.substr(0, eq));
        if (key.empty())
            throw config_error("config line " + std::to_string(line_no) + " has no key");
        cfg.values[key] = trim(s.substr(eq + 1));
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open config file " + path);
    return parse_config(in);
}

} // namespace airnet
