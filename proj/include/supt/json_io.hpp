#pragma once

#include <json.hpp>

#include "supt/bundles.hpp"

namespace supt {

using json = nlohmann::json;

// Schemas:
//   polynomial: [{"exp": [int...], "c": number}, ...]
//   form:       {"dim": n, "terms": [{"indices": [int...], "poly": <polynomial>}]}
//   field:      {"dim": n, "components": [<polynomial>, ...]}
//   grassmann:  {"generators": k, "terms": [{"subset": [int...], "coeff": number}]}
//   connection: {"dim": n, "p": int, "q": int, "even": bool?, "A": [[<form terms>]]}
// Malformed input raises schema_error with a location hint.

Polynomial polynomial_from_json(const json& j, int dim, const std::string& where);
json polynomial_to_json(const Polynomial& p);

DifferentialForm form_from_json(const json& j, int dim, const std::string& where);
json form_to_json(const DifferentialForm& w);

VectorField vector_field_from_json(const json& j, const std::string& where);
json vector_field_to_json(const VectorField& X);

GrassmannElement grassmann_from_json(const json& j, const std::string& where);
json grassmann_to_json(const GrassmannElement& v);

GradedConnection connection_from_json(const json& j, const std::string& where);
json connection_to_json(const GradedConnection& conn);

// Number formatting used in reports; fixed so identical runs are
// byte-identical.
std::string format_double(double v);

}  // namespace supt
