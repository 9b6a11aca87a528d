#include "casdet/kv_config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace casdet {

static std::string trim(const std::string& s) {
    std::size_t begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return "";
    }
    std::size_t end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

static std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            parts.push_back(trim(s.substr(start)));
            break;
        }
        parts.push_back(trim(s.substr(start, pos - start)));
        start = pos + 1;
    }
    return parts;
}

kv_file kv_file::parse_text(const std::string& text) {
    kv_file out;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (std::size_t hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw kv_error("line " + std::to_string(line_no),
                           "config line " + std::to_string(line_no) + " is not `key = value`: " + line);
        }
        std::string key = trim(line.substr(0, eq));
        if (key.empty()) {
            throw kv_error("line " + std::to_string(line_no),
                           "config line " + std::to_string(line_no) + " has an empty key");
        }
        out.values_[key] = trim(line.substr(eq + 1));
    }
    return out;
}

kv_file kv_file::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw kv_error("config", "cannot open config file: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str());
}

void kv_file::set_entry(const std::string& entry) {
    std::size_t eq = entry.find('=');
    if (eq == std::string::npos || trim(entry.substr(0, eq)).empty()) {
        throw kv_error("--set", "override must be key=value, got: " + entry);
    }
    values_[trim(entry.substr(0, eq))] = trim(entry.substr(eq + 1));
}

const std::string& kv_file::raw(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) {
        throw kv_error(key, "missing required field `" + key + "`");
    }
    return it->second;
}

std::string kv_file::get_string(const std::string& key) const { return raw(key); }

std::string kv_file::get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? values_.at(key) : fallback;
}

double parse_double_field(const std::string& field, const std::string& text) {
    const char* begin = text.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin || trim(end)[0] != '\0') {
        throw kv_error(field, "field `" + field + "` is not a real number: " + text);
    }
    return v;
}

std::int64_t parse_int_field(const std::string& field, const std::string& text) {
    const char* begin = text.c_str();
    char* end = nullptr;
    long long v = std::strtoll(begin, &end, 10);
    if (end == begin || trim(end)[0] != '\0') {
        throw kv_error(field, "field `" + field + "` is not an integer: " + text);
    }
    return v;
}

double kv_file::get_double(const std::string& key) const { return parse_double_field(key, raw(key)); }

double kv_file::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

double kv_file::get_probability(const std::string& key) const {
    double v = get_double(key);
    if (!(v >= 0.0 && v <= 1.0)) {
        throw kv_error(key, "field `" + key + "` must be a probability in [0, 1], got " + raw(key));
    }
    return v;
}

double kv_file::get_probability(const std::string& key, double fallback) const {
    return has(key) ? get_probability(key) : fallback;
}

std::int64_t kv_file::get_int(const std::string& key) const { return parse_int_field(key, raw(key)); }

std::int64_t kv_file::get_int(const std::string& key, std::int64_t fallback) const {
    return has(key) ? get_int(key) : fallback;
}

std::uint64_t kv_file::get_uint(const std::string& key) const {
    std::int64_t v = get_int(key);
    if (v < 0) {
        throw kv_error(key, "field `" + key + "` must be non-negative, got " + raw(key));
    }
    return static_cast<std::uint64_t>(v);
}

std::uint64_t kv_file::get_uint(const std::string& key, std::uint64_t fallback) const {
    return has(key) ? get_uint(key) : fallback;
}

std::vector<double> kv_file::get_double_list(const std::string& key) const {
    std::vector<double> out;
    for (const auto& part : split(raw(key), ',')) {
        out.push_back(parse_double_field(key, part));
    }
    return out;
}

std::vector<std::int64_t> kv_file::get_int_list(const std::string& key) const {
    std::vector<std::int64_t> out;
    for (const auto& part : split(raw(key), ',')) {
        out.push_back(parse_int_field(key, part));
    }
    return out;
}

std::vector<double> kv_file::get_grid(const std::string& key) const {
    const std::string text = trim(raw(key));
    if (text.rfind("linspace(", 0) == 0 && text.back() == ')') {
        const auto args = split(text.substr(9, text.size() - 10), ',');
        if (args.size() != 3) {
            throw kv_error(key, "field `" + key + "`: linspace takes (start, stop, count)");
        }
        const double a = parse_double_field(key, args[0]);
        const double b = parse_double_field(key, args[1]);
        const std::int64_t count = parse_int_field(key, args[2]);
        if (count < 1) {
            throw kv_error(key, "field `" + key + "`: linspace count must be >= 1");
        }
        std::vector<double> out(static_cast<std::size_t>(count));
        for (std::int64_t i = 0; i < count; ++i) {
            out[static_cast<std::size_t>(i)] =
                count == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
        }
        return out;
    }
    return get_double_list(key);
}

}  // namespace casdet
