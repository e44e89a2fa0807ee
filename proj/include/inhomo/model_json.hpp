#pragma once

// Model files: {"q": int, "R": [[string|int]], "r": [string|int]} with
// rationals written as "p/q" strings. Non-integral JSON numbers are read as
// reals and make the model inexact.

#include "inhomo/errors.hpp"
#include "inhomo/model.hpp"
#include "inhomo/series.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace inhomo {

namespace detail {

inline RawScalar scalar_from_json(const nlohmann::json& v, bool exact_required, const std::string& where) {
  if (v.is_string()) {
    try {
      return parse_rational(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ModelError(ModelErrorKind::InvalidArgument, where + ": " + e.what());
    }
  }
  if (v.is_number_integer()) return Rational(BigInt(v.dump()));
  if (v.is_number_float()) {
    if (exact_required)
      throw ModelError(ModelErrorKind::NotExact, where + " is a real number; write it as a \"p/q\" string");
    return v.get<double>();
  }
  throw ModelError(ModelErrorKind::InvalidArgument, where + " must be a number or a \"p/q\" string");
}

}  // namespace detail

inline RawModel raw_model_from_json(const nlohmann::json& j, bool exact_required = false) {
  if (!j.is_object() || !j.contains("q") || !j.contains("R") || !j.contains("r"))
    throw ModelError(ModelErrorKind::InvalidArgument, "model JSON needs keys q, R and r");
  if (!j["q"].is_number_integer() || j["q"].get<long long>() < 1)
    throw ModelError(ModelErrorKind::DimensionMismatch, "q must be a positive integer");
  if (!j["R"].is_array() || !j["r"].is_array())
    throw ModelError(ModelErrorKind::InvalidArgument, "R and r must be arrays");
  RawModel raw;
  raw.q = j["q"].get<std::size_t>();
  for (std::size_t i = 0; i < j["R"].size(); ++i) {
    const auto& row = j["R"][i];
    if (!row.is_array()) throw ModelError(ModelErrorKind::DimensionMismatch, "R must be an array of rows");
    raw.R.emplace_back();
    for (std::size_t k = 0; k < row.size(); ++k)
      raw.R.back().push_back(detail::scalar_from_json(
          row[k], exact_required, "R[" + std::to_string(i + 1) + "][" + std::to_string(k + 1) + "]"));
  }
  for (std::size_t i = 0; i < j["r"].size(); ++i)
    raw.r.push_back(detail::scalar_from_json(j["r"][i], exact_required, "r[" + std::to_string(i + 1) + "]"));
  return raw;
}

inline RawModel raw_model_from_file(const std::string& path, bool exact_required = false) {
  std::ifstream in(path);
  if (!in) throw ModelError(ModelErrorKind::InvalidArgument, "cannot open model file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(ModelErrorKind::InvalidArgument, "model file '" + path + "' is not valid JSON: " + e.what());
  }
  return raw_model_from_json(j, exact_required);
}

inline nlohmann::json to_json(const ModelSpec& spec) {
  nlohmann::json j;
  j["q"] = spec.q;
  j["R"] = nlohmann::json::array();
  j["r"] = nlohmann::json::array();
  for (std::size_t i = 0; i < spec.q; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t k = 0; k < spec.q; ++k) {
      if (spec.exact)
        row.push_back(to_string(spec.R[i][k]));
      else
        row.push_back(spec.R_real(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)));
    }
    j["R"].push_back(row);
    if (spec.exact)
      j["r"].push_back(to_string(spec.r[i]));
    else
      j["r"].push_back(spec.r_real(static_cast<Eigen::Index>(i)));
  }
  return j;
}

/// Coefficients [z^0], [z^1], ... as "p/q" strings.
inline nlohmann::json to_json(const Series<Rational>& s) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& c : s.coefficients()) j.push_back(to_string(c));
  return j;
}

}  // namespace inhomo
