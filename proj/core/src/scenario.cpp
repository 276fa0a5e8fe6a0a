#include "asyncexec/scenario.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "asyncexec/errors.hpp"

namespace asyncexec {

namespace {

using nlohmann::json;

Vec3 vec3(const json& j, std::string_view what) {
  if (!j.is_array() || j.size() != 3)
    throw ScenarioInvalid(fmt::format("{} must be an array of 3 numbers", what));
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

Eigen::VectorXd vecx(const json& j, std::string_view what) {
  if (!j.is_array()) throw ScenarioInvalid(fmt::format("{} must be an array", what));
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

Transform pose(const json& j) {
  if (j.is_null()) return Transform::Identity();
  return make_transform(j.contains("xyz") ? vec3(j["xyz"], "xyz") : Vec3::Zero(),
                        j.contains("rpy") ? vec3(j["rpy"], "rpy") : Vec3::Zero());
}

Shape shape(const json& j, std::string_view what) {
  const std::string kind = j.at("shape").get<std::string>();
  const double radius = j.at("radius").get<double>();
  if (kind == "sphere") return Sphere{vec3(j.at("center"), "center"), radius};
  if (kind == "capsule") return Capsule{vec3(j.at("p0"), "p0"), vec3(j.at("p1"), "p1"), radius};
  throw ScenarioInvalid(fmt::format("{}: unknown shape '{}'", what, kind));
}

RobotModel robot(const json& j) {
  const std::string group = j.at("group").get<std::string>();
  const Transform base = pose(j.value("base", json()));

  if (j.contains("planar")) {
    const json& p = j["planar"];
    return make_planar_arm(group, base, p.at("link_lengths").get<std::vector<double>>(),
                           p.at("radius").get<double>(), p.at("max_velocity").get<double>(),
                           p.at("joint_range").get<double>());
  }

  std::vector<JointSpec> joints;
  std::vector<double> limits;
  for (const json& jj : j.at("joints")) {
    JointSpec spec;
    spec.axis = vec3(jj.at("axis"), "axis");
    spec.origin = pose(jj.value("origin", json()));
    const auto lim = jj.at("limits").get<std::vector<double>>();
    if (lim.size() != 2) throw ScenarioInvalid(fmt::format("group '{}': limits need [lo, hi]", group));
    spec.lower = lim[0];
    spec.upper = lim[1];
    joints.push_back(spec);
    limits.push_back(jj.at("max_velocity").get<double>());
  }
  std::vector<LinkGeometry> links;
  for (const json& lj : j.at("links"))
    links.push_back({lj.at("frame").get<std::size_t>(), shape(lj, "link")});
  std::vector<LinkPair> allowed;
  for (const json& pj : j.value("allowed_pairs", json::array())) {
    const auto pair = pj.get<std::vector<std::size_t>>();
    if (pair.size() != 2) throw ScenarioInvalid("allowed pair needs two link indices");
    allowed.emplace_back(pair[0], pair[1]);
  }
  return RobotModel(group, base, std::move(joints), std::move(limits), std::move(links), allowed);
}

}  // namespace

void Scenario::validate() const {
  scene.validate();
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Task& t = tasks[i];
    const auto it = scene.robots.find(t.group_id);
    if (it == scene.robots.end())
      throw ScenarioInvalid(fmt::format("task {} references unknown group '{}'", i, t.group_id));
    if (static_cast<std::size_t>(t.goal.size()) != it->second.dof() ||
        !within_limits(it->second, it->second.state(t.goal)))
      throw ScenarioInvalid(fmt::format("task {} goal is malformed or outside joint limits", i));
    if (!(t.submit_time >= 0.0)) throw ScenarioInvalid(fmt::format("task {} submit_time < 0", i));
    if (t.timeout && !(*t.timeout > 0.0)) throw ScenarioInvalid(fmt::format("task {} timeout <= 0", i));
  }
  if (!(params.check.dt > 0.0) || !(params.check.margin >= 0.0) || !(params.tick > 0.0) ||
      params.monitor_period < 1 || !(params.default_timeout > 0.0))
    throw ScenarioInvalid("scenario params out of range");
}

Scenario parse_scenario(std::string_view json_text) {
  Scenario sc;
  try {
    const json doc = json::parse(json_text);
    sc.name = doc.value("name", std::string());
    sc.seed = doc.value("seed", std::uint64_t{0});
    if (doc.contains("params")) {
      const json& p = doc["params"];
      sc.params.check.dt = p.value("time_step", sc.params.check.dt);
      sc.params.check.margin = p.value("margin", sc.params.check.margin);
      sc.params.tick = p.value("tick", sc.params.tick);
      sc.params.monitor_period = p.value("monitor_period", sc.params.monitor_period);
      sc.params.default_timeout = p.value("backlog_timeout", sc.params.default_timeout);
      sc.params.check_static = p.value("check_static", sc.params.check_static);
    }
    for (const json& rj : doc.at("robots")) {
      RobotModel model = robot(rj);
      if (sc.scene.robots.count(model.group_id()))
        throw ScenarioInvalid(fmt::format("duplicate group '{}'", model.group_id()));
      Eigen::VectorXd idle = rj.contains("idle") ? vecx(rj["idle"], "idle")
                                                 : Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.dof()));
      sc.scene.add_robot(std::move(model), std::move(idle));
    }
    for (const json& oj : doc.value("obstacles", json::array())) sc.scene.add_obstacle(shape(oj, "obstacle"));
    for (const json& tj : doc.value("tasks", json::array())) {
      Task t;
      t.group_id = tj.at("group").get<std::string>();
      t.goal = vecx(tj.at("goal"), "goal");
      t.submit_time = tj.value("submit_time", 0.0);
      if (tj.contains("timeout")) t.timeout = tj["timeout"].get<double>();
      sc.tasks.push_back(std::move(t));
    }
  } catch (const json::exception& e) {
    throw ScenarioInvalid(fmt::format("scenario JSON: {}", e.what()));
  } catch (const ModelInvalid& e) {
    throw ScenarioInvalid(e.what());
  }
  sc.validate();
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure(fmt::format("cannot open scenario '{}'", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  Scenario sc = parse_scenario(buffer.str());
  if (sc.name.empty()) sc.name = path.stem().string();
  return sc;
}

}  // namespace asyncexec
