#pragma once

#include "json.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace frontlab {

/// Parses the scenario file format: a TOML subset with [table] and [a.b]
/// headers, dotted keys, strings, numbers, booleans and arrays of scalars
/// (arrays may span lines). Errors carry "source:line:" prefixes.
nlohmann::json parse_config(std::string_view text, const std::string& source = "<config>");
nlohmann::json load_config(const std::filesystem::path& path);

/// Value at a dotted path, or nullptr when absent.
const nlohmann::json* find_path(const nlohmann::json& root, std::string_view dotted);
/// Throws a Config error naming the missing key.
const nlohmann::json& require_path(const nlohmann::json& root, std::string_view dotted);
/// Creates intermediate tables as needed.
void set_path(nlohmann::json& root, std::string_view dotted, nlohmann::json value);

double get_number(const nlohmann::json& root, std::string_view dotted);
double get_number(const nlohmann::json& root, std::string_view dotted, double fallback);
std::string get_string(const nlohmann::json& root, std::string_view dotted);
std::string get_string(const nlohmann::json& root, std::string_view dotted, const std::string& fallback);
bool get_bool(const nlohmann::json& root, std::string_view dotted, bool fallback);

} // namespace frontlab
