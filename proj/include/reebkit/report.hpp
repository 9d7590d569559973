#pragma once

// Deterministic key-value text format used by scenario inputs, config files
// and report outputs. Doubles print with %.17g so repeated runs are
// byte-identical.

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace reebkit {

inline std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Ordered key = value pairs; '#' starts a comment, keys may repeat.
struct KeyValues {
    std::vector<std::pair<std::string, std::string>> items;

    bool has(const std::string& key) const {
        for (auto& [k, v] : items)
            if (k == key) return true;
        return false;
    }
    std::string get(const std::string& key) const {
        for (auto& [k, v] : items)
            if (k == key) return v;
        throw ParseError("missing required key '" + key + "'");
    }
    std::string get_or(const std::string& key, const std::string& dflt) const {
        for (auto& [k, v] : items)
            if (k == key) return v;
        return dflt;
    }
    double get_double(const std::string& key) const {
        const std::string v = get(key);
        size_t pos = 0;
        double d;
        try {
            d = std::stod(v, &pos);
        } catch (const std::exception&) {
            throw ParseError("key '" + key + "': expected a number, got '" + v + "'");
        }
        if (pos != v.size()) throw ParseError("key '" + key + "': trailing junk in '" + v + "'");
        return d;
    }
    double get_double_or(const std::string& key, double dflt) const {
        return has(key) ? get_double(key) : dflt;
    }
    long long get_int(const std::string& key) const {
        const std::string v = get(key);
        size_t pos = 0;
        long long n;
        try {
            n = std::stoll(v, &pos);
        } catch (const std::exception&) {
            throw ParseError("key '" + key + "': expected an integer, got '" + v + "'");
        }
        if (pos != v.size()) throw ParseError("key '" + key + "': trailing junk in '" + v + "'");
        return n;
    }
    long long get_int_or(const std::string& key, long long dflt) const {
        return has(key) ? get_int(key) : dflt;
    }
    std::vector<std::string> all(const std::string& key) const {
        std::vector<std::string> out;
        for (auto& [k, v] : items)
            if (k == key) out.push_back(v);
        return out;
    }
};

inline std::string strip(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline KeyValues parse_kv_text(const std::string& text) {
    KeyValues kv;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = strip(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("line " + std::to_string(lineno) + ": expected 'key = value', got '" +
                             line + "'");
        std::string key = strip(line.substr(0, eq));
        std::string val = strip(line.substr(eq + 1));
        if (key.empty())
            throw ParseError("line " + std::to_string(lineno) + ": empty key");
        kv.items.emplace_back(key, val);
    }
    return kv;
}

inline KeyValues parse_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return parse_kv_text(os.str());
}

// Comma-separated integers, e.g. "1,0,0".
inline std::vector<long long> parse_int_tuple(const std::string& s) {
    std::vector<long long> out;
    std::string piece;
    std::istringstream is(s);
    while (std::getline(is, piece, ',')) {
        piece = strip(piece);
        size_t pos = 0;
        long long v;
        try {
            v = std::stoll(piece, &pos);
        } catch (const std::exception&) {
            throw ParseError("malformed integer tuple component '" + piece + "'");
        }
        if (pos != piece.size()) throw ParseError("malformed integer tuple component '" + piece + "'");
        out.push_back(v);
    }
    if (out.empty()) throw ParseError("empty integer tuple");
    return out;
}

inline std::vector<double> parse_double_tuple(const std::string& s) {
    std::vector<double> out;
    std::string piece;
    std::istringstream is(s);
    while (std::getline(is, piece, ',')) {
        piece = strip(piece);
        size_t pos = 0;
        double v;
        try {
            v = std::stod(piece, &pos);
        } catch (const std::exception&) {
            throw ParseError("malformed number '" + piece + "'");
        }
        if (pos != piece.size()) throw ParseError("malformed number '" + piece + "'");
        out.push_back(v);
    }
    if (out.empty()) throw ParseError("empty number tuple");
    return out;
}

// Report writer: ordered key = value lines with deterministic formatting.
struct ReportWriter {
    std::ostringstream os;
    void kv(const std::string& key, const std::string& value) { os << key << " = " << value << "\n"; }
    void kv(const std::string& key, double value) { kv(key, fmt(value)); }
    void kv(const std::string& key, long long value) { kv(key, std::to_string(value)); }
    void kv(const std::string& key, int value) { kv(key, std::to_string(value)); }
    void kv(const std::string& key, bool value) { kv(key, std::string(value ? "true" : "false")); }
    void blank() { os << "\n"; }
    void comment(const std::string& c) { os << "# " << c << "\n"; }
    std::string str() const { return os.str(); }
    void write(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write '" + path + "'");
        out << os.str();
    }
};

}  // namespace reebkit
