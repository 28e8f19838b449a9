#include "lipfree/json_io.hpp"

#include <fstream>

#include "lipfree/ladder.hpp"

namespace lipfree {

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Structural, "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Structural, "parse error in " + path + ": " + e.what());
  }
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Structural, "cannot write " + path);
  out << text;
}

namespace {

FiniteMetricSpace space_from_matrix(const json& j) {
  const auto& jp = j.at("points");
  std::vector<PointMeta> metas(jp.size());
  for (const auto& pj : jp) {
    int id = pj.at("id").get<int>();
    if (id < 0 || id >= static_cast<int>(metas.size()))
      throw Error(ErrorKind::Structural, "space: point id out of range");
    PointMeta& m = metas[id];
    if (pj.contains("label")) m.label = pj.at("label").get<std::string>();
    if (pj.contains("coords")) {
      m.has_coords = true;
      m.a = pj.at("coords").at(0).get<double>();
      m.b = pj.at("coords").at(1).get<double>();
    }
  }
  std::vector<std::vector<double>> rows = j.at("dist").get<std::vector<std::vector<double>>>();
  ValidationReport rep = validate_metric(rows);
  if (!rep.ok()) throw Error(ErrorKind::Verification, "space: " + rep.summary());
  std::vector<double> flat;
  for (auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  return FiniteMetricSpace(std::move(metas), std::move(flat), j.at("base").get<int>());
}

MetricGraph graph_from_json(const json& jg) {
  MetricGraph g;
  if (jg.contains("vertices")) {
    g.labels = jg.at("vertices").get<std::vector<std::string>>();
    g.n_vertices = static_cast<int>(g.labels.size());
  } else {
    g.n_vertices = jg.at("n_vertices").get<int>();
  }
  for (const auto& ej : jg.at("edges"))
    g.edges.push_back({ej.at(0).get<int>(), ej.at(1).get<int>(), ej.at(2).get<double>()});
  if (jg.contains("base")) g.base = jg.at("base").get<int>();
  return g;
}

LadderParams ladder_from_json(const json& jl) {
  LadderParams p;
  p.n_levels = jl.at("n_levels").get<int>();
  p.rung_resolution = jl.at("rung_resolution").get<int>();
  p.side_resolution = jl.at("side_resolution").get<int>();
  if (jl.contains("extra_rung_heights"))
    p.extra_rung_heights = jl.at("extra_rung_heights").get<std::vector<double>>();
  if (jl.contains("extra_side_heights"))
    p.extra_side_heights = jl.at("extra_side_heights").get<std::vector<double>>();
  return p;
}

}  // namespace

SpaceFile parse_space(const json& j) {
  try {
    if (j.contains("ladder"))
      return {build_ladder(ladder_from_json(j.at("ladder"))), std::nullopt, {}};
    if (j.contains("graph")) {
      MetricGraph g = graph_from_json(j.at("graph"));
      std::vector<std::pair<int, int>> pairs;
      if (j.contains("pairs"))
        for (const auto& pj : j.at("pairs"))
          pairs.push_back({pj.at(0).get<int>(), pj.at(1).get<int>()});
      return {derive_space(g), std::move(g), std::move(pairs)};
    }
    return {space_from_matrix(j), std::nullopt, {}};
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Structural, std::string("space: malformed json: ") + e.what());
  }
}

SpaceFile load_space(const std::string& path) { return parse_space(load_json(path)); }

json space_to_json(const FiniteMetricSpace& space) {
  json jp = json::array();
  for (int i = 0; i < space.size(); ++i) {
    json pj;
    pj["id"] = i;
    if (!space.meta(i).label.empty()) pj["label"] = space.meta(i).label;
    if (space.meta(i).has_coords) pj["coords"] = {space.meta(i).a, space.meta(i).b};
    jp.push_back(pj);
  }
  json rows = json::array();
  for (int i = 0; i < space.size(); ++i) {
    json row = json::array();
    for (int j = 0; j < space.size(); ++j) row.push_back(space.dist(i, j));
    rows.push_back(std::move(row));
  }
  return json{{"points", std::move(jp)}, {"base", space.base()}, {"dist", std::move(rows)}};
}

FreeElement parse_element(const json& j, const FiniteMetricSpace& space) {
  try {
    std::map<PointId, double> coeffs;
    for (const auto& [key, val] : j.at("coeffs").items()) {
      int id = std::stoi(key);
      space.check_id(id, "element");
      coeffs[id] = val.get<double>();
    }
    return FreeElement::from_coeffs(coeffs, space.base());
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Structural, std::string("element: malformed json: ") + e.what());
  }
}

FreeElement load_element(const std::string& path, const FiniteMetricSpace& space) {
  return parse_element(load_json(path), space);
}

json element_to_json(const FreeElement& elem) {
  json coeffs = json::object();
  for (const auto& [p, c] : elem.coeffs()) coeffs[std::to_string(p)] = c;
  return json{{"coeffs", std::move(coeffs)}};
}

LipFunction parse_function(const json& j, const FiniteMetricSpace& space) {
  try {
    std::vector<double> vals(space.size(), 0.0);
    for (const auto& [key, val] : j.at("values").items()) {
      int id = std::stoi(key);
      space.check_id(id, "function");
      vals[id] = val.get<double>();
    }
    return LipFunction(space, std::move(vals));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Structural, std::string("function: malformed json: ") + e.what());
  }
}

LipFunction load_function(const std::string& path, const FiniteMetricSpace& space) {
  return parse_function(load_json(path), space);
}

json function_to_json(const LipFunction& f) {
  json vals = json::object();
  for (int i = 0; i < f.size(); ++i) vals[std::to_string(i)] = f(i);
  return json{{"values", std::move(vals)}};
}

}  // namespace lipfree
