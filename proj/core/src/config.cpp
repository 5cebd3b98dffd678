#include "pixelnav/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "json_io.hpp"

namespace pixelnav {

namespace {

nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["seed"] = c.seed;
  j["world_scale"] = c.world_scale;
  j["camera"] = {{"fx", c.camera.fx},       {"fy", c.camera.fy},   {"cx", c.camera.cx},
                 {"cy", c.camera.cy},       {"h_cam", c.camera.h_cam},
                 {"width", c.camera.width}, {"height", c.camera.height}};
  j["graph"] = {{"rho", c.graph_build.rho},
                {"phi_max", c.graph_build.phi_max},
                {"downsample_stride", c.graph_build.downsample_stride}};
  j["traversability"] = {{"threshold", c.traversability_threshold},
                         {"n_per_contour", c.n_per_contour}};
  j["subgoal"] = {{"d_min", c.ray.d_min},
                  {"d_step", c.ray.d_step},
                  {"d_max", c.ray.d_max},
                  {"sigma_alpha", c.sigma_alpha}};
  j["localization"] = {{"sigma_pos", c.sigma_pos}};
  j["mppi"] = {{"dt", c.mppi.dt},
               {"horizon_steps", c.mppi.horizon_steps},
               {"num_samples", c.mppi.num_samples},
               {"lambda", c.mppi.lambda},
               {"sigma_v", c.mppi.sigma_v},
               {"sigma_w", c.mppi.sigma_w},
               {"w_obst", c.mppi.w_obst},
               {"w_sg", c.mppi.w_sg},
               {"q_ctrl_v", c.mppi.q_ctrl_v},
               {"q_ctrl_w", c.mppi.q_ctrl_w},
               {"r_safe", c.mppi.r_safe},
               {"v_min", c.mppi.v_min},
               {"v_max", c.mppi.v_max},
               {"w_max", c.mppi.w_max}};
  j["record"] = {{"speed", c.record.speed},
                 {"dt", c.record.dt},
                 {"lookahead", c.record.lookahead},
                 {"goal_tol", c.record.goal_tol},
                 {"max_steps", c.record.max_steps}};
  j["episode"] = {{"world", c.world_file},       {"graph", c.graph_file},
                  {"goal_node", c.goal_node},    {"max_steps", c.max_steps},
                  {"reloc_period", c.reloc_period}, {"l_sg", c.l_sg},
                  {"v_freeze", c.v_freeze},      {"t_freeze", c.t_freeze},
                  {"d_goal", c.d_goal},          {"d_lost", c.d_lost}};
  j["episode"]["perturbation"] =
      c.perturbation ? detail::obstacle_to_json(*c.perturbation) : nlohmann::json(nullptr);
  j["suite"] = {{"trials_per_setting", c.trials_per_setting}};
  j["suite"]["perturbations"] = nlohmann::json::array();
  for (const Obstacle& obs : c.suite_perturbations) {
    j["suite"]["perturbations"].push_back(detail::obstacle_to_json(obs));
  }
  return j;
}

RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;  // defaults fill anything a partial file leaves out
  c.seed = j.value("seed", c.seed);
  c.world_scale = j.value("world_scale", c.world_scale);
  if (j.contains("camera")) {
    const auto& jc = j.at("camera");
    c.camera.fx = jc.value("fx", c.camera.fx);
    c.camera.fy = jc.value("fy", c.camera.fy);
    c.camera.cx = jc.value("cx", c.camera.cx);
    c.camera.cy = jc.value("cy", c.camera.cy);
    c.camera.h_cam = jc.value("h_cam", c.camera.h_cam);
    c.camera.width = jc.value("width", c.camera.width);
    c.camera.height = jc.value("height", c.camera.height);
  }
  if (j.contains("graph")) {
    const auto& jg = j.at("graph");
    c.graph_build.rho = jg.value("rho", c.graph_build.rho);
    c.graph_build.phi_max = jg.value("phi_max", c.graph_build.phi_max);
    c.graph_build.downsample_stride = jg.value("downsample_stride", c.graph_build.downsample_stride);
  }
  if (j.contains("traversability")) {
    c.traversability_threshold = j.at("traversability").value("threshold", c.traversability_threshold);
    c.n_per_contour = j.at("traversability").value("n_per_contour", c.n_per_contour);
  }
  if (j.contains("subgoal")) {
    const auto& js = j.at("subgoal");
    c.ray.d_min = js.value("d_min", c.ray.d_min);
    c.ray.d_step = js.value("d_step", c.ray.d_step);
    c.ray.d_max = js.value("d_max", c.ray.d_max);
    c.sigma_alpha = js.value("sigma_alpha", c.sigma_alpha);
  }
  if (j.contains("localization")) {
    c.sigma_pos = j.at("localization").value("sigma_pos", c.sigma_pos);
  }
  if (j.contains("mppi")) {
    const auto& jm = j.at("mppi");
    c.mppi.dt = jm.value("dt", c.mppi.dt);
    c.mppi.horizon_steps = jm.value("horizon_steps", c.mppi.horizon_steps);
    c.mppi.num_samples = jm.value("num_samples", c.mppi.num_samples);
    c.mppi.lambda = jm.value("lambda", c.mppi.lambda);
    c.mppi.sigma_v = jm.value("sigma_v", c.mppi.sigma_v);
    c.mppi.sigma_w = jm.value("sigma_w", c.mppi.sigma_w);
    c.mppi.w_obst = jm.value("w_obst", c.mppi.w_obst);
    c.mppi.w_sg = jm.value("w_sg", c.mppi.w_sg);
    c.mppi.q_ctrl_v = jm.value("q_ctrl_v", c.mppi.q_ctrl_v);
    c.mppi.q_ctrl_w = jm.value("q_ctrl_w", c.mppi.q_ctrl_w);
    c.mppi.r_safe = jm.value("r_safe", c.mppi.r_safe);
    c.mppi.v_min = jm.value("v_min", c.mppi.v_min);
    c.mppi.v_max = jm.value("v_max", c.mppi.v_max);
    c.mppi.w_max = jm.value("w_max", c.mppi.w_max);
  }
  if (j.contains("record")) {
    const auto& jr = j.at("record");
    c.record.speed = jr.value("speed", c.record.speed);
    c.record.dt = jr.value("dt", c.record.dt);
    c.record.lookahead = jr.value("lookahead", c.record.lookahead);
    c.record.goal_tol = jr.value("goal_tol", c.record.goal_tol);
    c.record.max_steps = jr.value("max_steps", c.record.max_steps);
  }
  if (j.contains("episode")) {
    const auto& je = j.at("episode");
    c.world_file = je.value("world", c.world_file);
    c.graph_file = je.value("graph", c.graph_file);
    c.goal_node = je.value("goal_node", c.goal_node);
    c.max_steps = je.value("max_steps", c.max_steps);
    c.reloc_period = je.value("reloc_period", c.reloc_period);
    c.l_sg = je.value("l_sg", c.l_sg);
    c.v_freeze = je.value("v_freeze", c.v_freeze);
    c.t_freeze = je.value("t_freeze", c.t_freeze);
    c.d_goal = je.value("d_goal", c.d_goal);
    c.d_lost = je.value("d_lost", c.d_lost);
    if (je.contains("perturbation") && !je.at("perturbation").is_null()) {
      c.perturbation = detail::obstacle_from_json(je.at("perturbation"));
    }
  }
  if (j.contains("suite")) {
    c.trials_per_setting = j.at("suite").value("trials_per_setting", c.trials_per_setting);
    if (j.at("suite").contains("perturbations")) {
      for (const auto& jo : j.at("suite").at("perturbations")) {
        c.suite_perturbations.push_back(detail::obstacle_from_json(jo));
      }
    }
  }
  return c;
}

}  // namespace

void RunConfig::validate() const {
  try {
    camera.validate();
    graph_build.validate();
    ray.validate();
    mppi.validate();
    record.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  if (!(traversability_threshold > 0.0 && traversability_threshold <= 1.0)) {
    fail("traversability.threshold must lie in (0, 1]");
  }
  if (trials_per_setting < 1) fail("suite.trials_per_setting must be >= 1");
  episode_config().validate();
}

EpisodeConfig RunConfig::episode_config() const {
  EpisodeConfig e;
  e.world_file = world_file;
  e.graph_file = graph_file;
  e.goal_node = goal_node;
  e.max_steps = max_steps;
  e.reloc_period = reloc_period;
  e.l_sg = l_sg;
  e.v_freeze = v_freeze;
  e.t_freeze = t_freeze;
  e.d_goal = d_goal;
  e.d_lost = d_lost;
  e.world_scale = world_scale;
  e.sigma_pos = sigma_pos;
  e.sigma_alpha = sigma_alpha;
  e.n_per_contour = n_per_contour;
  e.seed = seed;
  e.perturbation = perturbation;
  e.ray = ray;
  e.mppi = mppi;
  return e;
}

std::string dump_config(const RunConfig& cfg) { return config_to_json(cfg).dump(2); }

RunConfig parse_config(const std::string& text) {
  try {
    return config_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config parse: ") + e.what());
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config: " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

void apply_override(RunConfig& cfg, const std::string& key_value) {
  const auto eq = key_value.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override must be KEY=VALUE, got: " + key_value);
  }
  const std::string key = key_value.substr(0, eq);
  const std::string value = key_value.substr(eq + 1);

  nlohmann::json j = config_to_json(cfg);
  nlohmann::json* node = &j;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = key.find('.', start);
    const std::string part = key.substr(start, dot - start);
    if (!node->is_object() || !node->contains(part)) {
      throw ConfigError("unknown config key: " + key);
    }
    node = &(*node)[part];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  nlohmann::json parsed = nlohmann::json::parse(value, nullptr, /*allow_exceptions=*/false);
  *node = parsed.is_discarded() ? nlohmann::json(value) : parsed;
  try {
    cfg = config_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("override " + key + ": " + e.what());
  }
}

}  // namespace pixelnav
