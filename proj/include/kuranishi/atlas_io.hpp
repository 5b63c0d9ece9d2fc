#pragma once

#include "kuranishi/atlas.hpp"

#include <json.hpp>

#include <string>

namespace kuranishi {

using Json = nlohmann::ordered_json;

// Numbers may be JSON numbers or strings such as "-1/3", "0.25", "1e-3".
Rational json_rational(const Json& v);
Json rational_json(const Rational& q);

Domain parse_domain(const Json& j, int expected_dim = -1);
Json domain_json(const Domain& d);
SmoothMap parse_smooth_map(const Json& components, const Json* bumps, int dom);
Json smooth_map_components(const SmoothMap& m);
Json smooth_map_bumps(const SmoothMap& m);
RationalMatrix parse_matrix(const Json& rows, int nrows, int ncols);
Json matrix_json(const RationalMatrix& m);

Atlas parse_atlas(const Json& doc);
Json atlas_json(const Atlas& atlas);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& doc);

}  // namespace kuranishi
