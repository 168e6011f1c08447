#pragma once
// Flat key=value run configuration. Command-line flags overwrite file values
// (set() wins over what load_config read), and the canonical serialization of
// the merged map is hashed into every output artifact so downstream stages
// can detect mismatched inputs.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

namespace airnet {

struct RunConfig {
    std::map<std::string, std::string> values;
    bool strict = false;

    void set(const std::string& key, const std::string& value) { values[key] = value; }
    bool has(const std::string& key) const { return values.count(key) != 0; }

    std::string get_str(const std::string& key, const std::string& fallback = "") const;
    double get_num(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_seed() const; // "seed", default 1

    // Value that must be present (strict-mode required parameters).
    std::string require(const std::string& key) const;

    std::string canonical() const; // sorted key=value lines
    std::string hash() const;      // 64-bit FNV-1a of canonical(), hex
};

RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

} // namespace airnet
