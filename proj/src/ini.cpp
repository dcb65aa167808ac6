#include "cch/ini.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>

namespace cch {
namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

bool parse_long(const std::string& s, long& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtol(s.c_str(), &end, 10);
    return end == s.c_str() + s.size();
}

} // namespace

IniFile IniFile::parse(const std::string& text) {
    IniFile ini;
    std::istringstream is(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw parse_error(line_no, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw parse_error(line_no, "empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw parse_error(line_no, "expected `key = value` or `[section]`");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw parse_error(line_no, "empty key");
        if (section.empty()) throw parse_error(line_no, "key outside any section");
        const std::string full = section + "." + key;
        if (ini.values_.count(full))
            throw validation_error(full, "duplicate key (line " + std::to_string(line_no) + ")");
        ini.values_[full] = Value{trim(line.substr(eq + 1)), line_no, false};
    }
    return ini;
}

bool IniFile::has(const std::string& key) const {
    return values_.count(key) != 0;
}

int IniFile::line_of(const std::string& key) const {
    auto it = values_.find(key);
    return it == values_.end() ? 0 : it->second.line;
}

const std::string* IniFile::take(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) return nullptr;
    it->second.used = true;
    return &it->second.text;
}

void IniFile::bad_value(const std::string& key, const std::string& what) const {
    throw validation_error(key, what + " (line " + std::to_string(line_of(key)) + ")");
}

std::string IniFile::get_string(const std::string& key, const std::string& def) {
    const std::string* v = take(key);
    return v ? *v : def;
}

double IniFile::get_double(const std::string& key, double def) {
    const std::string* v = take(key);
    if (!v) return def;
    double out;
    if (!parse_double(*v, out)) bad_value(key, "not a number: `" + *v + "`");
    return out;
}

long IniFile::get_long(const std::string& key, long def) {
    const std::string* v = take(key);
    if (!v) return def;
    long out;
    if (!parse_long(*v, out)) bad_value(key, "not an integer: `" + *v + "`");
    return out;
}

std::uint64_t IniFile::get_u64(const std::string& key, std::uint64_t def) {
    const std::string* v = take(key);
    if (!v) return def;
    if (v->empty()) bad_value(key, "empty value");
    char* end = nullptr;
    const std::uint64_t out = std::strtoull(v->c_str(), &end, 10);
    if (end != v->c_str() + v->size()) bad_value(key, "not an unsigned integer: `" + *v + "`");
    return out;
}

bool IniFile::get_bool(const std::string& key, bool def) {
    const std::string* v = take(key);
    if (!v) return def;
    if (*v == "true") return true;
    if (*v == "false") return false;
    bad_value(key, "expected true or false, got `" + *v + "`");
}

std::vector<double> IniFile::get_double_list(const std::string& key, std::vector<double> def) {
    const std::string* v = take(key);
    if (!v) return def;
    std::vector<double> out;
    std::istringstream is(*v);
    std::string tok;
    while (is >> tok) {
        double d;
        if (!parse_double(tok, d)) bad_value(key, "not a number: `" + tok + "`");
        out.push_back(d);
    }
    return out;
}

std::vector<int> IniFile::get_int_list(const std::string& key, std::vector<int> def) {
    const std::string* v = take(key);
    if (!v) return def;
    std::vector<int> out;
    std::istringstream is(*v);
    std::string tok;
    while (is >> tok) {
        long d;
        if (!parse_long(tok, d)) bad_value(key, "not an integer: `" + tok + "`");
        out.push_back(static_cast<int>(d));
    }
    return out;
}

std::vector<std::string> IniFile::get_string_list(const std::string& key,
                                                  std::vector<std::string> def) {
    const std::string* v = take(key);
    if (!v) return def;
    std::vector<std::string> out;
    std::istringstream is(*v);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

void IniFile::get_rational(const std::string& key, long& num, long& den) {
    const std::string* v = take(key);
    if (!v) return; // keep caller defaults
    const auto slash = v->find('/');
    long n, d = 1;
    if (slash == std::string::npos) {
        if (!parse_long(*v, n)) bad_value(key, "expected `num/den` or an integer");
    } else {
        if (!parse_long(trim(v->substr(0, slash)), n) ||
            !parse_long(trim(v->substr(slash + 1)), d))
            bad_value(key, "expected `num/den` with integer parts");
    }
    num = n;
    den = d;
}

void IniFile::reject_unused() const {
    for (const auto& [key, value] : values_)
        if (!value.used)
            throw validation_error(key,
                                   "unknown key (line " + std::to_string(value.line) + ")");
}

} // namespace cch
