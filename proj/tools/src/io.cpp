#include "cachecraft_cli/io.hpp"

#include <fstream>
#include <sstream>

#include "cachecraft/errors.hpp"
#include "cachecraft/user_set.hpp"

namespace cachecraft::cli {
namespace {

// "name:line" of the first occurrence of "key" in the text, or just the name.
std::string locate(const std::string& text, const std::string& name, const std::string& key) {
  std::size_t at = text.find("\"" + key + "\"");
  if (at == std::string::npos) return name;
  std::size_t line = 1;
  for (std::size_t i = 0; i < at; ++i) line += text[i] == '\n';
  return name + ":" + std::to_string(line);
}

int to_int(const Json& value, const std::string& where) {
  if (!value.is_number_integer()) throw ValidationError(where + ": expected an integer");
  return value.get<int>();
}

std::vector<Rational> to_rationals(const Json& value, const std::string& where) {
  if (!value.is_array()) throw ValidationError(where + ": expected an array");
  std::vector<Rational> out;
  for (std::size_t i = 0; i < value.size(); ++i) out.push_back(to_rational(value[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

UserSet parse_set(const std::string& text, int K, const std::string& where) {
  try {
    return UserSet::parse(text, K);
  } catch (const Error& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

}  // namespace

CapacityInstance InstanceFile::capacity() const {
  if (!has_capacity()) throw ValidationError("instance has no \"C\" and \"m_tot\" fields");
  return CapacityInstance{cache, *C, *m_tot};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  out << text;
  if (!out) throw ValidationError("failed writing " + path);
}

Json parse_json(const std::string& text, const std::string& name) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string what = e.what();
    std::size_t colon = what.rfind(": ");
    throw ValidationError(name + ":" + std::to_string(line) + ":" + std::to_string(column) + ": invalid JSON" +
                          (colon == std::string::npos ? "" : what.substr(colon)));
  }
}

Rational to_rational(const Json& value, const std::string& where) {
  try {
    if (value.is_string()) return Rational::parse(value.get<std::string>());
    if (value.is_number_integer()) return Rational(value.get<std::int64_t>());
    if (value.is_number_float()) return Rational::parse(value.dump());
  } catch (const Error& e) {
    throw ValidationError(where + ": " + e.what());
  }
  throw ValidationError(where + ": expected a number or a string such as \"2/5\"");
}

InstanceFile parse_instance(const std::string& text, const std::string& name) {
  Json doc = parse_json(text, name);
  if (!doc.is_object()) throw ValidationError(name + ": expected a JSON object");
  auto at = [&](const std::string& key) { return locate(text, name, key) + ": field \"" + key + "\""; };
  InstanceFile out;
  if (!doc.contains("K")) throw ValidationError(name + ": missing field \"K\"");
  out.cache.K = to_int(doc["K"], at("K"));
  out.cache.N = doc.contains("N") ? to_int(doc["N"], at("N")) : out.cache.K;
  if (doc.contains("m")) out.cache.m = to_rationals(doc["m"], at("m"));
  if (doc.contains("C")) out.C = to_rationals(doc["C"], at("C"));
  if (doc.contains("m_tot")) out.m_tot = to_rational(doc["m_tot"], at("m_tot"));
  if (out.C.has_value() != out.m_tot.has_value()) {
    throw ValidationError(name + ": \"C\" and \"m_tot\" must be given together");
  }
  if (!doc.contains("m") && !out.has_capacity()) throw ValidationError(name + ": missing field \"m\"");
  try {
    if (out.has_capacity()) validate_instance(out.capacity());
    if (doc.contains("m") || !out.has_capacity()) validate_instance(out.cache);
  } catch (const Error& e) {
    // Prefix each listed problem with the line of the field it concerns.
    std::istringstream lines(e.what());
    std::string line, message = name + ": invalid instance";
    std::getline(lines, line);
    while (std::getline(lines, line)) {
      std::size_t start = line.find_first_not_of(' ');
      std::string problem = start == std::string::npos ? line : line.substr(start);
      std::string key = problem.rfind("m_tot", 0) == 0 ? "m_tot" : problem.substr(0, 1);
      message += "\n  " + locate(text, name, key) + ": " + problem;
    }
    throw ValidationError(message);
  }
  return out;
}

InstanceFile load_instance(const std::string& path) { return parse_instance(read_file(path), path); }

std::string render_decimal(const Rational& value, int decimals) { return value.decimal(decimals); }

void write_scheme(const model::Scheme& scheme, Json& into) {
  Json a = Json::object();
  for (std::uint32_t s = 0; s < scheme.placement.a.size(); ++s) {
    if (!scheme.placement.a[s].is_zero()) a[UserSet(s).str()] = scheme.placement.a[s].str();
  }
  Json v = Json::object();
  for (std::uint32_t t = 1; t < scheme.delivery.v.size(); ++t) {
    if (!scheme.delivery.v[t].is_zero()) v[UserSet(t).str()] = scheme.delivery.v[t].str();
  }
  Json u = Json::object();
  for (const auto& [key, value] : scheme.delivery.u) {
    if (!value.is_zero()) u["T=" + key.T.str() + "|S=" + key.S.str()] = value.str();
  }
  into["a"] = std::move(a);
  into["v"] = std::move(v);
  into["u"] = std::move(u);
}

model::Scheme read_scheme(const Json& doc, int K, const std::string& name) {
  if (!doc.is_object()) throw ValidationError(name + ": expected a JSON object");
  model::Scheme s{model::PlacementVector::zero(K), model::DeliveryPlan::zero(K)};
  auto section = [&](const char* key) -> const Json* {
    if (!doc.contains(key)) return nullptr;
    const Json& part = doc[key];
    if (!part.is_object()) throw ValidationError(name + ": field \"" + key + "\" must be an object");
    return &part;
  };
  if (const Json* a = section("a")) {
    for (const auto& [key, value] : a->items()) {
      std::string where = name + ": a" + key;
      s.placement[parse_set(key, K, where)] = to_rational(value, where);
    }
  }
  if (const Json* v = section("v")) {
    for (const auto& [key, value] : v->items()) {
      std::string where = name + ": v" + key;
      UserSet T = parse_set(key, K, where);
      if (T.empty()) throw ValidationError(where + ": signals need at least one user");
      s.delivery[T] = to_rational(value, where);
    }
  }
  if (const Json* u = section("u")) {
    for (const auto& [key, value] : u->items()) {
      std::string where = name + ": u " + key;
      std::size_t bar = key.find('|');
      if (key.rfind("T=", 0) != 0 || bar == std::string::npos || key.compare(bar + 1, 2, "S=") != 0) {
        throw ValidationError(where + ": expected a key like \"T=[1,2]|S=[2,3]\"");
      }
      UserSet T = parse_set(key.substr(2, bar - 2), K, where);
      UserSet S = parse_set(key.substr(bar + 3), K, where);
      if ((T - S).size() != 1) {
        throw ValidationError(where + ": S must contain all of T but exactly one user");
      }
      s.delivery.set_piece(T, S, to_rational(value, where));
    }
  }
  return s;
}

Json rational_list(const std::vector<Rational>& values) {
  Json out = Json::array();
  for (const Rational& v : values) out.push_back(v.str());
  return out;
}

}  // namespace cachecraft::cli
