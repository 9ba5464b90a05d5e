#pragma once

// Serialization helpers shared by every module that writes files.

#include <cstdint>
#include <initializer_list>
#include <string>

#include "hypequil/hyperbolic.hpp"
#include "json.hpp"

namespace hypequil {

using json = nlohmann::json;

/// Decimal with 17 significant digits (exact round trip for doubles).
std::string format_double(double v);

/// Compact JSON writer that prints floating-point numbers via format_double.
/// Object keys come out sorted (nlohmann::json stores them ordered).
std::string dump_json(const json& j);

json point_to_json(const HPoint& p);

/// Parses an array of ambient coordinates. Errors name `path`.
HPoint point_from_json(const json& j, const std::string& path);

/// Reads a required / optional number with a ParseError naming `path` on type mismatch.
double number_at(const json& j, const std::string& path);

/// Non-negative integer (a JSON number without fractional part).
std::uint64_t integer_at(const json& j, const std::string& path);

bool bool_at(const json& j, const std::string& path);

std::string string_at(const json& j, const std::string& path);

/// ParseError at path.key for the first key of object `j` not in `allowed`.
void reject_unknown_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed);

}  // namespace hypequil
