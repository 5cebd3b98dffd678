// json_io.hpp - internal JSON helpers shared by the file-format code.

#pragma once

#include <json.hpp>

#include "pixelnav/simworld.hpp"

namespace pixelnav::detail {

inline nlohmann::json obstacle_to_json(const Obstacle& obs) {
  nlohmann::json j;
  if (const auto* c = std::get_if<CircleShape>(&obs.shape)) {
    j["type"] = "circle";
    j["center"] = {c->center.x, c->center.y};
    j["radius"] = c->radius;
  } else {
    const auto& poly = std::get<PolygonShape>(obs.shape);
    j["type"] = "polygon";
    auto verts = nlohmann::json::array();
    for (const Vec2& v : poly.vertices) verts.push_back({v.x, v.y});
    j["vertices"] = std::move(verts);
  }
  j["is_target"] = obs.is_target;
  return j;
}

inline Obstacle obstacle_from_json(const nlohmann::json& j) {
  Obstacle obs;
  const std::string type = j.at("type").get<std::string>();
  if (type == "circle") {
    obs.shape = CircleShape{{j.at("center").at(0).get<double>(), j.at("center").at(1).get<double>()},
                            j.at("radius").get<double>()};
  } else if (type == "polygon") {
    PolygonShape poly;
    for (const auto& jv : j.at("vertices")) {
      poly.vertices.push_back({jv.at(0).get<double>(), jv.at(1).get<double>()});
    }
    obs.shape = std::move(poly);
  } else {
    throw std::runtime_error("unknown obstacle type: " + type);
  }
  obs.is_target = j.value("is_target", false);
  return obs;
}

}  // namespace pixelnav::detail
