#include "fkcg/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace fkcg {

namespace {

std::string trim(const std::string &s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string &s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

}  // namespace

Config Config::from_text(const std::string &text) {
    Config cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        cfg.kv[key] = value;
    }
    return cfg;
}

Config Config::from_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str());
}

std::string Config::str(const std::string &key) const {
    auto it = kv.find(key);
    if (it == kv.end()) throw ConfigError("missing required key: " + key);
    return it->second;
}

std::string Config::str(const std::string &key, const std::string &fallback) const {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
}

long long Config::integer(const std::string &key) const {
    std::string v = str(key);
    try {
        std::size_t pos = 0;
        long long r = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return r;
    } catch (const std::exception &) {
        throw ConfigError(key + ": expected an integer, got '" + v + "'");
    }
}

long long Config::integer(const std::string &key, long long fallback) const {
    return has(key) ? integer(key) : fallback;
}

double Config::real(const std::string &key) const {
    std::string v = str(key);
    try {
        std::size_t pos = 0;
        double r = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return r;
    } catch (const std::exception &) {
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    }
}

double Config::real(const std::string &key, double fallback) const {
    return has(key) ? real(key) : fallback;
}

bool Config::flag(const std::string &key, bool fallback) const {
    if (!has(key)) return fallback;
    std::string v = str(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(key + ": expected true/false, got '" + v + "'");
}

std::uint64_t Config::u64(const std::string &key) const {
    std::string v = str(key);
    try {
        std::size_t pos = 0;
        unsigned long long r = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return r;
    } catch (const std::exception &) {
        throw ConfigError(key + ": expected an unsigned integer, got '" + v + "'");
    }
}

std::vector<int> Config::int_list(const std::string &key) const {
    std::vector<int> out;
    for (const std::string &item : split(str(key), ',')) {
        if (item.empty()) continue;
        try {
            std::size_t pos = 0;
            out.push_back(std::stoi(item, &pos));
            if (pos != item.size()) throw std::invalid_argument("");
        } catch (const std::exception &) {
            throw ConfigError(key + ": expected a comma-separated integer list");
        }
    }
    if (out.empty()) throw ConfigError(key + ": empty list");
    return out;
}

DisorderLaw Config::disorder(const std::string &key) const {
    DisorderLaw law;
    if (has(key + ".bernoulli")) {
        law = DisorderLaw::bernoulli(real(key + ".bernoulli"));
    } else if (has(key + ".delta")) {
        law = DisorderLaw::delta(real(key + ".delta"));
    } else if (has(key + ".atoms")) {
        for (const std::string &item : split(str(key + ".atoms"), ',')) {
            std::size_t colon = item.find(':');
            if (colon == std::string::npos)
                throw ConfigError(key + ".atoms: expected value:probability pairs");
            try {
                law.atoms.emplace_back(std::stod(item.substr(0, colon)),
                                       std::stod(item.substr(colon + 1)));
            } catch (const std::exception &) {
                throw ConfigError(key + ".atoms: expected value:probability pairs");
            }
        }
    } else {
        throw ConfigError("missing coupling law: set " + key + ".bernoulli, " + key +
                          ".delta or " + key + ".atoms");
    }
    try {
        law.validate();
    } catch (const std::exception &e) {
        throw ConfigError(key + ": " + e.what());
    }
    return law;
}

FKParams Config::fk_params() const {
    FKParams params;
    params.q = real("q", 1.0);
    if (params.q < 1.0) throw ConfigError("q: requires q >= 1");
    std::string family = str("interaction.family", "linear");
    double param = real("interaction.param", 1.0);
    if (family == "linear")
        params.interaction = Interaction::scale(param);
    else if (family == "exp_beta")
        params.interaction = Interaction::beta(param);
    else
        throw ConfigError("interaction.family: expected linear or exp_beta, got '" + family +
                          "'");
    return params;
}

std::string Config::canonical() const {
    std::string out;
    for (const auto &[k, v] : kv) {
        out += k;
        out += '=';
        out += v;
        out += '\n';
    }
    return out;
}

std::string Config::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a 64
    for (unsigned char c : canonical()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace fkcg
