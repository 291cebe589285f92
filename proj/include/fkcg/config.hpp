#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fkcg/fk.hpp"

// Flat key-value experiment configuration with dotted section keys,
// command-line overrides, typed accessors, and a stable content hash.

namespace fkcg {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvariantViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Config {
    std::map<std::string, std::string> kv;

    /// Parse `key = value` lines; '#' starts a comment; blank lines ignored.
    static Config from_file(const std::string &path);
    static Config from_text(const std::string &text);

    void set(const std::string &key, const std::string &value) { kv[key] = value; }
    bool has(const std::string &key) const { return kv.count(key) > 0; }

    // Typed accessors; the one-argument forms throw ConfigError when the key
    // is missing, the two-argument forms fall back to the default.
    std::string str(const std::string &key) const;
    std::string str(const std::string &key, const std::string &fallback) const;
    long long integer(const std::string &key) const;
    long long integer(const std::string &key, long long fallback) const;
    double real(const std::string &key) const;
    double real(const std::string &key, double fallback) const;
    bool flag(const std::string &key, bool fallback) const;
    std::uint64_t u64(const std::string &key) const;
    std::vector<int> int_list(const std::string &key) const;  // comma-separated

    /// "v:p,v:p,..." atom list under `key`, e.g. "0:0.2,1:0.8".
    DisorderLaw disorder(const std::string &key) const;

    /// q and the interaction map from `q`, `interaction.family`
    /// (linear | exp_beta) and `interaction.param`.
    FKParams fk_params() const;

    /// Sorted `key=value` lines, LF-separated: the hashed canonical form.
    std::string canonical() const;
    /// FNV-1a 64-bit hash of the canonical form, as 16 hex digits.
    std::string hash() const;
};

}  // namespace fkcg
