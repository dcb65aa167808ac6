#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cch/errors.hpp"

namespace cch {

/// Minimal INI reader shared by run configs and experiment manifests.
/// Grammar: `[section]` headers, `key = value` lines, `#` comments, blank
/// lines. Values run to end of line (trimmed). Keys are addressed as
/// "section.key". Reading marks keys used; leftover keys are reported as
/// unknown-key validation errors so typos cannot pass silently.
class IniFile {
public:
    static IniFile parse(const std::string& text);

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& def);
    double get_double(const std::string& key, double def);
    long get_long(const std::string& key, long def);
    std::uint64_t get_u64(const std::string& key, std::uint64_t def);
    bool get_bool(const std::string& key, bool def);
    std::vector<double> get_double_list(const std::string& key, std::vector<double> def);
    std::vector<int> get_int_list(const std::string& key, std::vector<int> def);
    std::vector<std::string> get_string_list(const std::string& key,
                                             std::vector<std::string> def);
    /// "num/den" or a bare integer; validated den > 0.
    void get_rational(const std::string& key, long& num, long& den);

    /// Throw for any key never touched by a getter.
    void reject_unused() const;

    /// Line number of a key (0 if absent), for error reporting.
    int line_of(const std::string& key) const;

private:
    struct Value {
        std::string text;
        int line = 0;
        bool used = false;
    };
    std::map<std::string, Value> values_;

    const std::string* take(const std::string& key);
    [[noreturn]] void bad_value(const std::string& key, const std::string& what) const;
};

} // namespace cch
