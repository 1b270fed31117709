#include "gssc/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace gssc {

std::string trim(const std::string& s) {
    const auto first = std::find_if_not(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
    const auto last = std::find_if_not(s.rbegin(), s.rend(), [](unsigned char c) { return std::isspace(c); }).base();
    return first < last ? std::string(first, last) : std::string();
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

double parse_double(const std::string& s) {
    const std::string t = trim(s);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
        // from_chars rejects "inf"/"nan" spellings some tools emit; fall back to strtod.
        char* end = nullptr;
        v = std::strtod(t.c_str(), &end);
        if (t.empty() || end != t.c_str() + t.size())
            throw InvalidArgument("not a number: '" + s + "'");
    }
    return v;
}

std::optional<double> parse_optional_double(const std::string& s) {
    const std::string t = trim(s);
    if (t.empty() || t == "none" || t == "None") return std::nullopt;
    return parse_double(t);
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw Error("format_double failed");
    return std::string(buf, ptr);
}

std::string format_optional_double(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string("none");
}

KeyValueConfig KeyValueConfig::parse(const std::string& text) {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty())
            throw InvalidArgument("config line " + std::to_string(lineno) + ": empty key");
        cfg.values_[key] = trim(line.substr(eq + 1));
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
    return get(key).value_or(fallback);
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    const auto v = get(key);
    return v ? parse_double(*v) : fallback;
}

long long KeyValueConfig::get_int(const std::string& key, long long fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    long long out = 0;
    const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc() || ptr != v->data() + v->size())
        throw InvalidArgument("config key '" + key + "': not an integer: '" + *v + "'");
    return out;
}

std::uint64_t KeyValueConfig::get_uint64(const std::string& key, std::uint64_t fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc() || ptr != v->data() + v->size())
        throw InvalidArgument("config key '" + key + "': not an unsigned integer: '" + *v + "'");
    return out;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    if (*v == "1" || *v == "true" || *v == "yes" || *v == "on") return true;
    if (*v == "0" || *v == "false" || *v == "no" || *v == "off") return false;
    throw InvalidArgument("config key '" + key + "': not a boolean: '" + *v + "'");
}

std::optional<double> KeyValueConfig::get_optional_double(const std::string& key) const {
    const auto v = get(key);
    return v ? parse_optional_double(*v) : std::nullopt;
}

std::vector<double> KeyValueConfig::get_double_list(const std::string& key,
                                                    std::vector<double> fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    std::vector<double> out;
    for (const auto& item : split(*v, ','))
        if (!item.empty()) out.push_back(parse_double(item));
    return out;
}

std::vector<std::string> KeyValueConfig::get_string_list(const std::string& key,
                                                         std::vector<std::string> fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    std::vector<std::string> out;
    for (auto& item : split(*v, ','))
        if (!item.empty()) out.push_back(std::move(item));
    return out;
}

std::string KeyValueConfig::to_string() const {
    std::ostringstream out;
    for (const auto& [k, v] : values_) out << k << '=' << v << '\n';
    return out.str();
}

}  // namespace gssc
