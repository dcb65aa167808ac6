#pragma once

#include <stdexcept>
#include <string>

namespace cch {

/// Config text could not be parsed (syntax level). Carries a 1-based line number.
class parse_error : public std::runtime_error {
public:
    parse_error(int line, const std::string& what)
        : std::runtime_error("parse error (line " + std::to_string(line) + "): " + what),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/// A parsed value violates an invariant. Carries the dotted key path
/// (e.g. "model.gamma") so the offending setting can be named exactly.
class validation_error : public std::runtime_error {
public:
    validation_error(const std::string& key_path, const std::string& what)
        : std::runtime_error("invalid " + key_path + ": " + what), key_path_(key_path) {}
    const std::string& key_path() const { return key_path_; }

private:
    std::string key_path_;
};

/// The solution left the representable regime (non-finite values or
/// |u| beyond the abort threshold). The run driver persists a snapshot
/// of the last good state when this propagates out of a run.
class blowup_error : public std::runtime_error {
public:
    explicit blowup_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace cch
