#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cachecraft/instance.hpp"
#include "cachecraft/model.hpp"
#include "cachecraft/rational.hpp"

namespace cachecraft::cli {

using Json = nlohmann::ordered_json;

/// Parsed instance file: {"K": 3, "N": 3, "m": ["2/5", ...], "C": [...], "m_tot": "1"}.
/// "m" may be omitted when "C" and "m_tot" are given.
struct InstanceFile {
  CacheInstance cache;
  std::optional<std::vector<Rational>> C;
  std::optional<Rational> m_tot;

  bool has_capacity() const { return C.has_value() && m_tot.has_value(); }
  CapacityInstance capacity() const;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

/// Parses JSON text; syntax errors become ValidationError with "name:line:column: ...".
Json parse_json(const std::string& text, const std::string& name);

/// Accepts "p/q", "0.95", integers, and plain JSON numbers (read via their decimal text).
Rational to_rational(const Json& value, const std::string& where);

InstanceFile parse_instance(const std::string& text, const std::string& name);
InstanceFile load_instance(const std::string& path);

/// Decimal rendering shared by every command.
std::string render_decimal(const Rational& value, int decimals);

/// {"a": {"[1,3]": "p/q"}, "v": {...}, "u": {"T=[1,2]|S=[2,3]": "p/q"}} with zero entries omitted.
void write_scheme(const model::Scheme& scheme, Json& into);
/// Reads "a", "v" and "u" (missing entries are zero). Keys are validated against K.
model::Scheme read_scheme(const Json& doc, int K, const std::string& name);

Json rational_list(const std::vector<Rational>& values);

}  // namespace cachecraft::cli
