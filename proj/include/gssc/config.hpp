#pragma once

#include "gssc/types.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gssc {

/// Flat key=value text configuration. '#' starts a comment, blank lines are
/// ignored, list values are comma-separated. Later keys override earlier ones.
class KeyValueConfig {
public:
    KeyValueConfig() = default;

    static KeyValueConfig parse(const std::string& text);
    static KeyValueConfig from_file(const std::filesystem::path& path);

    bool contains(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

    std::optional<std::string> get(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    /// "none" / empty maps to nullopt.
    std::optional<double> get_optional_double(const std::string& key) const;
    std::vector<double> get_double_list(const std::string& key, std::vector<double> fallback) const;
    std::vector<std::string> get_string_list(const std::string& key,
                                             std::vector<std::string> fallback) const;

    const std::map<std::string, std::string>& values() const { return values_; }
    std::string to_string() const;

private:
    std::map<std::string, std::string> values_;
};

std::string trim(const std::string& s);
std::vector<std::string> split(const std::string& s, char sep);
double parse_double(const std::string& s);
std::optional<double> parse_optional_double(const std::string& s);
/// Shortest text that round-trips the double exactly.
std::string format_double(double v);
std::string format_optional_double(const std::optional<double>& v);

}  // namespace gssc
