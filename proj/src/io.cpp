#include "hypequil/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace hypequil {

std::string format_double(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void write(const json& j, std::string& out) {
    switch (j.type()) {
        case json::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                out += json(it.key()).dump();
                out += ':';
                write(it.value(), out);
            }
            out += '}';
            break;
        }
        case json::value_t::array: {
            out += '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ',';
                write(j[i], out);
            }
            out += ']';
            break;
        }
        case json::value_t::number_float: {
            const double v = j.get<double>();
            if (!std::isfinite(v)) {
                out += "null";
            } else {
                std::string s = format_double(v);
                // keep it a float on re-parse
                if (s.find_first_of(".eE") == std::string::npos) s += ".0";
                out += s;
            }
            break;
        }
        default:
            out += j.dump();
    }
}

}  // namespace

std::string dump_json(const json& j) {
    std::string out;
    write(j, out);
    return out;
}

json point_to_json(const HPoint& p) {
    json a = json::array();
    for (std::size_t i = 0; i < p.ambient_dim(); ++i) a.push_back(p[i]);
    return a;
}

HPoint point_from_json(const json& j, const std::string& path) {
    if (!j.is_array()) throw ParseError(path, "expected an array of coordinates");
    if (j.size() < 2 || j.size() > kMaxAmbient) {
        throw ParseError(path, "expected between 2 and " + std::to_string(kMaxAmbient) + " coordinates");
    }
    Vec v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v[i] = number_at(j[i], path + "[" + std::to_string(i) + "]");
    try {
        return HPoint(v);
    } catch (const Error& e) {
        throw ParseError(path, e.what());
    }
}

double number_at(const json& j, const std::string& path) {
    if (!j.is_number()) throw ParseError(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ParseError(path, "expected a finite number");
    return v;
}

std::uint64_t integer_at(const json& j, const std::string& path) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer()) {
        if (j.get<std::int64_t>() < 0) throw ParseError(path, "must be >= 0");
        return static_cast<std::uint64_t>(j.get<std::int64_t>());
    }
    if (j.is_number_float()) {
        const double v = j.get<double>();
        if (v >= 0.0 && v < 0x1p63 && v == std::floor(v)) return static_cast<std::uint64_t>(v);
    }
    throw ParseError(path, "expected a non-negative integer");
}

bool bool_at(const json& j, const std::string& path) {
    if (!j.is_boolean()) throw ParseError(path, "expected true or false");
    return j.get<bool>();
}

std::string string_at(const json& j, const std::string& path) {
    if (!j.is_string()) throw ParseError(path, "expected a string");
    return j.get<std::string>();
}

void reject_unknown_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; });
        if (!ok) throw ParseError(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
    }
}

}  // namespace hypequil
