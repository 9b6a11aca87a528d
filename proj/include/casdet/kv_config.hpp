#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace casdet {

/// Error in a key/value document; `field` names the offending key so CLI
/// messages can point at it.
class kv_error : public std::runtime_error {
public:
    kv_error(std::string field_, const std::string& message)
        : std::runtime_error(message), field(std::move(field_)) {}

    std::string field;
};

/// Flat key/value document with dotted keys for nesting. Syntax: one
/// `key = value` per line, `#` starts a comment, blank lines ignored.
/// Values keep everything after the first `=`, trimmed.
class kv_file {
public:
    static kv_file parse_text(const std::string& text);
    static kv_file parse_file(const std::filesystem::path& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

    /// Applies a `key=value` override string (CLI --set).
    void set_entry(const std::string& entry);

    const std::map<std::string, std::string>& values() const { return values_; }

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    /// Probability: get_double plus a [0, 1] range check.
    double get_probability(const std::string& key) const;
    double get_probability(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    std::uint64_t get_uint(const std::string& key) const;
    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
    std::vector<double> get_double_list(const std::string& key) const;
    std::vector<std::int64_t> get_int_list(const std::string& key) const;

    /// Grid values: either a comma list of reals or linspace(a, b, count).
    std::vector<double> get_grid(const std::string& key) const;

private:
    std::map<std::string, std::string> values_;

    const std::string& raw(const std::string& key) const;
};

double parse_double_field(const std::string& field, const std::string& text);
std::int64_t parse_int_field(const std::string& field, const std::string& text);

}  // namespace casdet
