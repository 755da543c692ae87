#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "g2mu/orbifold.hpp"

namespace g2mu::cli {

struct OrbifoldConfig {
  std::string name;
  std::vector<AffineElement> generators;
  Matrix<Rational> frame = Matrix<Rational>::identity(kDim);
  Rational oracle_radius_sq{9};
  std::size_t trials = 100;
  std::uint64_t seed = 0;
};

/// Throws InputError on malformed documents, unknown fields, non-integer
/// matrices or malformed rationals. NonUnimodular propagates from the
/// element constructor.
OrbifoldConfig parse_config(const nlohmann::json& doc);
OrbifoldConfig load_config(const std::string& path);

/// Canonical echo of a config: nested integer matrices, rationals as "p/q".
nlohmann::ordered_json to_json(const OrbifoldConfig& config);

nlohmann::ordered_json matrix_json(const Matrix<Rational>& m);
nlohmann::ordered_json vector_json(const Vec7<Rational>& v);

}  // namespace g2mu::cli
