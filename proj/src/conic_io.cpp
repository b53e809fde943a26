#include <json.hpp>

#include "robustirs/conic_solver.hpp"

namespace robustirs {

namespace {

ConeKind kind_from_name(const std::string& name) {
  if (name == "zero") return ConeKind::Zero;
  if (name == "nonneg") return ConeKind::NonNeg;
  if (name == "soc") return ConeKind::SOC;
  if (name == "psd") return ConeKind::PSD;
  throw InvalidArgument("unknown cone kind '" + name + "'");
}

}  // namespace

std::string to_json(const ConicProblem& problem) {
  nlohmann::json j;
  j["c"] = std::vector<double>(problem.c.data(), problem.c.data() + problem.c.size());
  j["b"] = std::vector<double>(problem.b.data(), problem.b.data() + problem.b.size());
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < problem.A.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(problem.A.cols()));
    for (Eigen::Index k = 0; k < problem.A.cols(); ++k) row[static_cast<std::size_t>(k)] = problem.A(i, k);
    rows.push_back(row);
  }
  j["A"] = rows;
  nlohmann::json cones = nlohmann::json::array();
  for (const auto& cone : problem.cones)
    cones.push_back({{"kind", cone_name(cone.kind)}, {"dim", cone.dim}});
  j["cones"] = cones;
  return j.dump();
}

ConicProblem problem_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("problem_from_json: ") + e.what());
  }
  ConicProblem p;
  const auto c = j.at("c").get<std::vector<double>>();
  const auto b = j.at("b").get<std::vector<double>>();
  p.c = Eigen::Map<const RVec>(c.data(), static_cast<Eigen::Index>(c.size()));
  p.b = Eigen::Map<const RVec>(b.data(), static_cast<Eigen::Index>(b.size()));
  const auto& rows = j.at("A");
  p.A.resize(static_cast<Eigen::Index>(rows.size()), p.c.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto row = rows[i].get<std::vector<double>>();
    if (static_cast<Eigen::Index>(row.size()) != p.c.size())
      throw DimensionMismatch("problem_from_json: row " + std::to_string(i) + " has wrong length");
    for (std::size_t k = 0; k < row.size(); ++k)
      p.A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k];
  }
  for (const auto& cone : j.at("cones"))
    p.cones.push_back({kind_from_name(cone.at("kind").get<std::string>()), cone.at("dim").get<int>()});
  p.validate();
  return p;
}

}  // namespace robustirs
