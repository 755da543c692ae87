#include "cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace g2mu::cli {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) throw InputError("unknown field '" + key + "' in " + where);
}

Rational rational_field(const json& v, const std::string& where) {
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_string()) {
    try {
      return parse_rational(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw InputError(where + ": " + e.what());
    }
  }
  throw InputError(where + " must be an integer or a \"p/q\" string");
}

/// Flat row-major list of 49 entries or 7 rows of 7.
std::vector<json> matrix_entries(const json& v, const std::string& where) {
  if (!v.is_array()) throw InputError(where + " must be an array");
  std::vector<json> flat;
  if (v.size() == kDim * kDim && std::none_of(v.begin(), v.end(), [](const json& x) { return x.is_array(); })) {
    flat.assign(v.begin(), v.end());
  } else if (v.size() == kDim) {
    for (const auto& row : v) {
      if (!row.is_array() || row.size() != kDim) throw InputError(where + " must have 7 rows of 7 entries");
      flat.insert(flat.end(), row.begin(), row.end());
    }
  } else {
    throw InputError(where + " must be 7x7 (nested) or 49 entries (row-major)");
  }
  return flat;
}

Matrix<Rational> integer_matrix(const json& v, const std::string& where) {
  const auto flat = matrix_entries(v, where);
  Matrix<Rational> m(kDim, kDim);
  for (std::size_t i = 0; i < flat.size(); ++i) {
    if (!flat[i].is_number_integer()) throw InputError(where + " entries must be integers");
    m(i / kDim, i % kDim) = Rational(flat[i].get<long long>());
  }
  return m;
}

Matrix<Rational> rational_matrix(const json& v, const std::string& where) {
  const auto flat = matrix_entries(v, where);
  Matrix<Rational> m(kDim, kDim);
  for (std::size_t i = 0; i < flat.size(); ++i) m(i / kDim, i % kDim) = rational_field(flat[i], where);
  return m;
}

AffineElement parse_generator(const json& g, std::size_t index) {
  const std::string where = "generators[" + std::to_string(index) + "]";
  if (!g.is_object()) throw InputError(where + " must be an object");
  reject_unknown(g, {"matrix", "translation"}, where);
  if (!g.contains("matrix")) throw InputError(where + " is missing 'matrix'");
  const Matrix<Rational> m = integer_matrix(g.at("matrix"), where + ".matrix");
  Vec7<Rational> t;
  t.fill(Rational(0));
  if (g.contains("translation")) {
    const auto& tv = g.at("translation");
    if (!tv.is_array() || tv.size() != kDim) throw InputError(where + ".translation must have 7 entries");
    for (int i = 0; i < kDim; ++i) t[i] = rational_field(tv[i], where + ".translation");
  }
  try {
    return AffineElement(m, t);
  } catch (const NonUnimodular& e) {
    throw NonUnimodular(where + ": " + e.what());
  }
}

}  // namespace

OrbifoldConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw InputError("config must be a JSON object");
  reject_unknown(doc, {"name", "generators", "frame", "oracle_radius_sq", "trials", "seed"}, "config");
  OrbifoldConfig c;
  if (!doc.contains("name") || !doc.at("name").is_string()) throw InputError("config needs a string 'name'");
  c.name = doc.at("name").get<std::string>();
  if (!doc.contains("generators") || !doc.at("generators").is_array())
    throw InputError("config needs a 'generators' array");
  const auto& gens = doc.at("generators");
  for (std::size_t i = 0; i < gens.size(); ++i) c.generators.push_back(parse_generator(gens[i], i));
  if (doc.contains("frame")) c.frame = rational_matrix(doc.at("frame"), "frame");
  if (doc.contains("oracle_radius_sq")) c.oracle_radius_sq = rational_field(doc.at("oracle_radius_sq"), "oracle_radius_sq");
  if (doc.contains("trials")) {
    const auto& v = doc.at("trials");
    if (!v.is_number_integer() || v.get<long long>() < 1) throw InputError("trials must be a positive integer");
    c.trials = v.get<std::size_t>();
  }
  if (doc.contains("seed")) {
    const auto& v = doc.at("seed");
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0))
      throw InputError("seed must be a nonnegative integer");
    c.seed = v.get<std::uint64_t>();
  }
  return c;
}

OrbifoldConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

nlohmann::ordered_json matrix_json(const Matrix<Rational>& m) {
  auto rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto row = nlohmann::ordered_json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (denominator(m(i, j)) == 1) {
        row.push_back(numerator(m(i, j)).convert_to<long long>());
      } else {
        row.push_back(format_rational(m(i, j)));
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::ordered_json vector_json(const Vec7<Rational>& v) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& x : v) out.push_back(format_rational(x));
  return out;
}

nlohmann::ordered_json to_json(const OrbifoldConfig& c) {
  nlohmann::ordered_json j;
  j["name"] = c.name;
  auto gens = nlohmann::ordered_json::array();
  for (const auto& g : c.generators) {
    nlohmann::ordered_json e;
    e["matrix"] = matrix_json(g.matrix());
    e["translation"] = vector_json(g.translation());
    gens.push_back(std::move(e));
  }
  j["generators"] = std::move(gens);
  j["frame"] = matrix_json(c.frame);
  j["oracle_radius_sq"] = format_rational(c.oracle_radius_sq);
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  return j;
}

}  // namespace g2mu::cli
