#include "ibp/scenario_io.hpp"

#include <fstream>
#include <stdexcept>

namespace ibp {

namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("bad matrix in scenario file");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j.at(i);
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw std::invalid_argument("ragged matrix in scenario file");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row.at(c).get<double>();
  }
  return m;
}

json matrix_list_to_json(const std::vector<Eigen::MatrixXd>& ms) {
  json out = json::array();
  for (const auto& m : ms) out.push_back(matrix_to_json(m));
  return out;
}

json sym_list_to_json(const std::vector<SymMatrix>& ms) {
  json out = json::array();
  for (const auto& m : ms) out.push_back(matrix_to_json(m.mat()));
  return out;
}

std::vector<Eigen::MatrixXd> matrix_list_from_json(const json& j) {
  std::vector<Eigen::MatrixXd> out;
  for (const auto& e : j) out.push_back(matrix_from_json(e));
  return out;
}

std::vector<SymMatrix> sym_list_from_json(const json& j) {
  std::vector<SymMatrix> out;
  for (const auto& e : j) out.push_back(symmetrize(matrix_from_json(e)));
  return out;
}

}  // namespace

nlohmann::json scenario_to_json(const Scenario& sc) {
  json j;
  j["n_x"] = sc.n_x();
  j["N"] = sc.horizon();
  j["S"] = sc.num_sensors();
  j["A"] = matrix_list_to_json(sc.dynamics.A);
  j["Q"] = sym_list_to_json(sc.dynamics.Q);
  json sensors = json::array();
  for (const Sensor& s : sc.sensors) {
    json sj;
    sj["H"] = matrix_list_to_json(s.H);
    sj["R"] = sym_list_to_json(s.R);
    sensors.push_back(std::move(sj));
  }
  j["sensors"] = std::move(sensors);
  j["C0"] = matrix_to_json(sc.C0.mat());
  json mean = json::array();
  for (Eigen::Index i = 0; i < sc.x0_mean.size(); ++i) mean.push_back(sc.x0_mean(i));
  j["x0_mean"] = std::move(mean);
  j["W"] = sym_list_to_json(sc.W);
  j["cost_fn"] = cost_fn_name(sc.cost_fn);
  return j;
}

Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario sc;
  sc.dynamics.n_x = j.at("n_x").get<int>();
  sc.dynamics.horizon = j.at("N").get<int>();
  sc.dynamics.A = matrix_list_from_json(j.at("A"));
  sc.dynamics.Q = sym_list_from_json(j.at("Q"));
  int id = 1;
  for (const auto& sj : j.at("sensors")) {
    Sensor s;
    s.id = id++;
    s.H = matrix_list_from_json(sj.at("H"));
    s.R = sym_list_from_json(sj.at("R"));
    sc.sensors.push_back(std::move(s));
  }
  if (j.at("S").get<int>() != sc.num_sensors()) {
    throw std::invalid_argument("scenario file: S does not match sensor list");
  }
  sc.C0 = symmetrize(matrix_from_json(j.at("C0")));
  const auto& mean = j.at("x0_mean");
  sc.x0_mean = Eigen::VectorXd(mean.size());
  for (Eigen::Index i = 0; i < sc.x0_mean.size(); ++i) {
    sc.x0_mean(i) = mean.at(i).get<double>();
  }
  sc.W = sym_list_from_json(j.at("W"));
  sc.cost_fn = cost_fn_from_name(j.at("cost_fn").get<std::string>());
  sc.validate();
  return sc;
}

void save_scenario(const Scenario& sc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << scenario_to_json(sc).dump(2) << '\n';
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  json j;
  in >> j;
  return scenario_from_json(j);
}

}  // namespace ibp
