#pragma once

#include "neumann/field.hpp"

#include <json.hpp>

#include <string>

namespace neumann {

/// Parse a field document:
///   {"domain":{"kind":"torus","Lx":1,"Ly":1},
///    "modes":[{"amp":1,"nx":1,"ny":3,"px":"cos","py":"cos"}]}
/// or the grid form with "grid":{"nx":..,"ny":..,"values":[...]} and "lambda".
/// Throws Error(MalformedInput / InvalidField).
FieldPtr field_from_json(const nlohmann::json& doc);
FieldPtr load_field(const std::string& path);
nlohmann::json field_to_json(const ScalarField& f);

DomainSpec domain_from_json(const nlohmann::json& doc);
nlohmann::json domain_to_json(const DomainSpec& d);

}  // namespace neumann
