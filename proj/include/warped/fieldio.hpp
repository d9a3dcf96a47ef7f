#ifndef WARPED_FIELDIO_HPP
#define WARPED_FIELDIO_HPP

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "warped/metrics.hpp"
#include "warped/spheregrid.hpp"

// Field files: {"grid": {"n_r": int, "n_theta": int}, "values": [row-major]}
// for sphere fields, {"grid": {"n_phi": int}, "values": [...]} for circle
// fields.  Values are node samples in the grid's own node order.

namespace warped {

inline nlohmann::json field_to_json(const ScalarField& f) {
  return nlohmann::json{
      {"grid", {{"n_r", f.grid.n_r}, {"n_theta", f.grid.n_theta}}},
      {"values", f.values}};
}

inline ScalarField field_from_json(const nlohmann::json& j) {
  if (!j.contains("grid") || !j.contains("values"))
    throw std::invalid_argument("field_from_json: need grid and values");
  const auto& jg = j.at("grid");
  PolarGrid g = make_polar_grid(jg.at("n_r").get<int>(), jg.at("n_theta").get<int>());
  ScalarField f{g, j.at("values").get<std::vector<double>>()};
  if (f.values.size() != g.size())
    throw std::invalid_argument("field_from_json: values length does not match grid");
  return f;
}

inline nlohmann::json circle_to_json(const CircleField& f) {
  return nlohmann::json{{"grid", {{"n_phi", f.grid.n_phi}}}, {"values", f.values}};
}

inline CircleField circle_from_json(const nlohmann::json& j) {
  if (!j.contains("grid") || !j.contains("values"))
    throw std::invalid_argument("circle_from_json: need grid and values");
  CircleGrid g = make_circle_grid(j.at("grid").at("n_phi").get<int>());
  CircleField f{g, j.at("values").get<std::vector<double>>()};
  if (f.values.size() != g.size())
    throw std::invalid_argument("circle_from_json: values length does not match grid");
  return f;
}

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  in >> j;
  return j;
}

inline void save_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
}

inline ScalarField load_field(const std::string& path) {
  return field_from_json(load_json_file(path));
}

inline void save_field(const std::string& path, const ScalarField& f) {
  save_json_file(path, field_to_json(f));
}

inline CircleField load_circle_field(const std::string& path) {
  return circle_from_json(load_json_file(path));
}

inline void save_circle_field(const std::string& path, const CircleField& f) {
  save_json_file(path, circle_to_json(f));
}

inline nlohmann::json report_to_json(const InequalityReport& r) {
  return nlohmann::json{{"name", r.name},
                        {"lhs", r.lhs},
                        {"rhs", r.rhs},
                        {"slack", r.slack},
                        {"tol", r.tol},
                        {"worst_point", r.worst_point},
                        {"pass", r.pass},
                        {"hypothesis_ok", r.hypothesis_ok},
                        {"note", r.note}};
}

}  // namespace warped

#endif  // WARPED_FIELDIO_HPP
