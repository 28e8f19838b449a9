#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "lipfree/free_space.hpp"
#include "lipfree/metric_graph.hpp"

namespace lipfree {

using json = nlohmann::json;

// A space file holds one of three representations: an explicit matrix, a
// metric graph (optionally with zigzag pairs), or ladder parameters.
struct SpaceFile {
  FiniteMetricSpace space;
  std::optional<MetricGraph> graph;
  std::vector<std::pair<int, int>> pairs;
};

SpaceFile parse_space(const json& j);
SpaceFile load_space(const std::string& path);

// Matrix representation; floats round-trip exactly.
json space_to_json(const FiniteMetricSpace& space);

FreeElement parse_element(const json& j, const FiniteMetricSpace& space);
FreeElement load_element(const std::string& path, const FiniteMetricSpace& space);
json element_to_json(const FreeElement& elem);

LipFunction parse_function(const json& j, const FiniteMetricSpace& space);
LipFunction load_function(const std::string& path, const FiniteMetricSpace& space);
json function_to_json(const LipFunction& f);

json load_json(const std::string& path);
void write_text(const std::string& path, const std::string& text);

}  // namespace lipfree
