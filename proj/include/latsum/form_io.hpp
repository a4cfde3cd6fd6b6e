#pragma once
// JSON serialization for quadratic forms: {"dim": d, "matrix": [[...]]}.

#include <string>

#include <json.hpp>

#include "latsum/quadform.hpp"

namespace latsum {

inline nlohmann::json form_to_json(const QuadForm& q) {
  nlohmann::json j;
  j["dim"] = q.dim;
  j["matrix"] = q.matrix;
  return j;
}

inline QuadForm form_from_json(const nlohmann::json& j) {
  if (!j.contains("matrix"))
    throw DomainError("form_from_json: missing \"matrix\"");
  Mat m = j.at("matrix").get<Mat>();
  if (j.contains("dim") && j.at("dim").get<int>() != (int)m.size())
    throw DomainError("form_from_json: \"dim\" does not match the matrix");
  return make_form(m);
}

inline QuadForm form_from_json_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  return form_from_json(j);
}

}  // namespace latsum
