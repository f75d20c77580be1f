#include "poseplace/io.hpp"

#include <array>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "poseplace/errors.hpp"

namespace poseplace {

namespace {

using nlohmann::json;

json parse_document(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

void check_version(const json& j, const char* what) {
  if (!j.contains("schema_version")) {
    throw ParseError(std::string(what) + ": missing field 'schema_version'");
  }
  const int v = j.at("schema_version").get<int>();
  if (v != kSchemaVersion) {
    throw ParseError(std::string(what) + ": unsupported schema_version " + std::to_string(v) +
                     " (expected " + std::to_string(kSchemaVersion) + ")");
  }
}

Vec3 vec3_of(const json& j) {
  auto a = j.get<std::array<double, 3>>();
  return {a[0], a[1], a[2]};
}

json json_of(Vec3 v) { return json::array({v.x, v.y, v.z}); }

std::string hash_to_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (!in.good() && !in.eof()) throw Error("cannot read '" + path.string() + "'");
  return std::move(buf).str();
}

void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw Error("cannot replace '" + path.string() + "': " + ec.message());
  }
}

Scene scene_from_json(const std::string& text) {
  json j = parse_document(text, "scene");
  try {
    check_version(j, "scene");
    Scene s;
    const json& room = j.at("room");
    s.room_width = room.at("width").get<double>();
    s.room_depth = room.at("depth").get<double>();
    s.room_height = room.at("height").get<double>();
    s.grid_resolution = j.value("grid_resolution", 0.05);

    for (const auto& [name, size] : j.at("categories").items()) {
      s.categories[name] = vec3_of(size);
    }
    if (j.contains("furniture")) {
      for (const json& f : j.at("furniture")) {
        Furniture item;
        item.box = {vec3_of(f.at("center")), vec3_of(f.at("size")),
                    wrap_two_pi(f.value("yaw", 0.0))};
        item.name = f.value("name", std::string{});
        s.furniture.push_back(std::move(item));
      }
    }
    auto read_objects = [&](const char* key, std::vector<ObjectInstance>& out) {
      if (!j.contains(key)) return;
      for (const json& o : j.at(key)) {
        out.push_back(s.make_instance(o.at("category").get<std::string>(),
                                      vec3_of(o.at("base")), o.value("yaw", 0.0)));
      }
    };
    read_objects("objects", s.objects);
    read_objects("labeled_placements", s.labeled_placements);
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw ParseError(std::string("scene: ") + e.what());
  }
}

std::string scene_to_json(const Scene& scene) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["room"] = {{"width", scene.room_width},
               {"depth", scene.room_depth},
               {"height", scene.room_height}};
  j["grid_resolution"] = scene.grid_resolution;
  json categories = json::object();
  for (const auto& [name, size] : scene.categories) categories[name] = json_of(size);
  j["categories"] = std::move(categories);

  json furniture = json::array();
  for (const auto& f : scene.furniture) {
    json item = {{"center", json_of(f.box.center)},
                 {"size", json_of(f.box.size)},
                 {"yaw", f.box.yaw}};
    if (!f.name.empty()) item["name"] = f.name;
    furniture.push_back(std::move(item));
  }
  j["furniture"] = std::move(furniture);

  auto write_objects = [](std::span<const ObjectInstance> objects) {
    json arr = json::array();
    for (const auto& o : objects) {
      arr.push_back({{"category", o.category},
                     {"base", json_of(o.base_center())},
                     {"yaw", o.box.yaw}});
    }
    return arr;
  };
  j["objects"] = write_objects(scene.objects);
  if (!scene.labeled_placements.empty()) {
    j["labeled_placements"] = write_objects(scene.labeled_placements);
  }
  return j.dump(2) + "\n";
}

Scene load_scene(const std::filesystem::path& path) {
  return scene_from_json(read_text_file(path));
}

std::vector<SkeletonTemplate> skeletons_from_json(const std::string& text) {
  json j = parse_document(text, "skeletons");
  try {
    check_version(j, "skeletons");
    std::vector<SkeletonTemplate> out;
    for (const json& t : j.at("templates")) {
      SkeletonTemplate tmpl;
      tmpl.type = pose_type_from_string(t.at("type").get<std::string>());
      const json& joints = t.at("joints");
      for (int k = 0; k < kJointCount; ++k) {
        tmpl.joints[k] = vec3_of(joints.at(to_string(static_cast<Joint>(k))));
      }
      const json& bb = t.at("bounding_box");
      tmpl.bounding_box = {vec3_of(bb.at("center")), vec3_of(bb.at("size")), 0.0};
      tmpl.validate();
      out.push_back(tmpl);
    }
    return out;
  } catch (const json::exception& e) {
    throw ParseError(std::string("skeletons: ") + e.what());
  }
}

std::string skeletons_to_json(std::span<const SkeletonTemplate> templates) {
  json arr = json::array();
  for (const auto& t : templates) {
    json joints = json::object();
    for (int k = 0; k < kJointCount; ++k) {
      joints[to_string(static_cast<Joint>(k))] = json_of(t.joints[k]);
    }
    arr.push_back({{"type", to_string(t.type)},
                   {"joints", std::move(joints)},
                   {"bounding_box",
                    {{"center", json_of(t.bounding_box.center)},
                     {"size", json_of(t.bounding_box.size)}}}});
  }
  json j;
  j["schema_version"] = kSchemaVersion;
  j["templates"] = std::move(arr);
  return j.dump(2) + "\n";
}

std::vector<SkeletonTemplate> load_skeletons(const std::filesystem::path& path) {
  return skeletons_from_json(read_text_file(path));
}

namespace {

json params_to_json(const ModelParams& params) {
  json categories = json::object();
  for (const auto& [name, p] : params.categories) {
    categories[name] = {{"distance_joint", to_string(p.distance_joint)},
                        {"dist_mu", p.dist_mu},
                        {"dist_sigma", p.dist_sigma},
                        {"rel_mu", p.rel_mu},
                        {"rel_kappa", p.rel_kappa},
                        {"ori_mu", p.ori_mu},
                        {"ori_kappa", p.ori_kappa},
                        {"height_mu", p.height_mu},
                        {"height_sigma", p.height_sigma},
                        {"object_activity", p.object_activity}};
  }
  json pa = json::array();
  for (const auto& row : params.pose_activity.rows) pa.push_back(row);
  return {{"categories", std::move(categories)},
          {"pose_activity", std::move(pa)},
          {"pose_type_weights", params.pose_type_weights}};
}

ModelParams params_from_json(const json& j) {
  ModelParams params;
  for (const auto& [name, p] : j.at("categories").items()) {
    CategoryParams cp;
    cp.distance_joint = joint_from_string(p.at("distance_joint").get<std::string>());
    cp.dist_mu = p.at("dist_mu").get<double>();
    cp.dist_sigma = p.at("dist_sigma").get<double>();
    cp.rel_mu = p.at("rel_mu").get<double>();
    cp.rel_kappa = p.at("rel_kappa").get<double>();
    cp.ori_mu = p.at("ori_mu").get<double>();
    cp.ori_kappa = p.at("ori_kappa").get<double>();
    cp.height_mu = p.at("height_mu").get<double>();
    cp.height_sigma = p.at("height_sigma").get<double>();
    cp.object_activity = p.at("object_activity").get<std::array<double, kActivityCount>>();
    params.categories.emplace(name, cp);
  }
  const json& pa = j.at("pose_activity");
  for (int t = 0; t < kPoseTypeCount; ++t) {
    params.pose_activity.rows[t] = pa.at(t).get<std::array<double, kActivityCount>>();
  }
  params.pose_type_weights =
      j.at("pose_type_weights").get<std::array<double, kPoseTypeCount>>();
  params.validate();
  return params;
}

}  // namespace

ModelBundle bundle_from_json(const std::string& text) {
  json j = parse_document(text, "bundle");
  try {
    check_version(j, "bundle");
    ModelBundle bundle;
    bundle.human = params_from_json(j.at("human"));
    bundle.mixture = params_from_json(j.at("mixture"));
    bundle.mixture_k = j.at("mixture_k").get<int>();
    if (bundle.mixture_k < 1) throw ValidationError("bundle: mixture_k must be at least 1");

    for (const auto& [name, s] : j.at("stats").items()) {
      CategoryStats stats;
      stats.yaws = s.at("yaws").get<std::vector<double>>();
      stats.mean_height = s.at("mean_height").get<double>();
      stats.room_mean = vec3_of(s.at("room_mean"));
      stats.count = s.at("count").get<int>();
      bundle.stats.emplace(name, std::move(stats));
    }
    for (const json& p : j.at("pairs")) {
      PairStats stats;
      stats.mean_x = p.at("mean").at(0).get<double>();
      stats.mean_y = p.at("mean").at(1).get<double>();
      stats.cov_xx = p.at("cov").at(0).get<double>();
      stats.cov_xy = p.at("cov").at(1).get<double>();
      stats.cov_yy = p.at("cov").at(2).get<double>();
      stats.ori_mu = p.at("ori_mu").get<double>();
      stats.ori_kappa = p.at("ori_kappa").get<double>();
      stats.count = p.at("count").get<int>();
      bundle.pairs.emplace(
          PairKey{p.at("target").get<std::string>(), p.at("reference").get<std::string>()},
          stats);
    }
    for (const auto& [name, c] : j.at("classifiers").items()) {
      ClassifierModel model;
      model.weights = c.at("weights").get<std::vector<double>>();
      model.bias = c.at("bias").get<double>();
      model.context_categories = c.at("context_categories").get<std::vector<std::string>>();
      model.feature_version = c.at("feature_version").get<int>();
      if (model.feature_version != 1) {
        throw ParseError("bundle: unsupported feature_version " +
                         std::to_string(model.feature_version));
      }
      model.objective_trace = c.value("objective_trace", std::vector<double>{});
      bundle.classifiers.emplace(name, std::move(model));
    }
    if (j.contains("diagnostics")) {
      const json& d = j.at("diagnostics");
      bundle.learn_objective = d.value("learn_objective", std::vector<double>{});
      bundle.learn_skipped = d.value("learn_skipped", std::vector<std::string>{});
      bundle.mixture_loglik = d.value("mixture_loglik", std::vector<double>{});
    }
    return bundle;
  } catch (const json::exception& e) {
    throw ParseError(std::string("bundle: ") + e.what());
  }
}

std::string bundle_to_json(const ModelBundle& bundle) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["human"] = params_to_json(bundle.human);
  j["mixture"] = params_to_json(bundle.mixture);
  j["mixture_k"] = bundle.mixture_k;

  json stats = json::object();
  for (const auto& [name, s] : bundle.stats) {
    stats[name] = {{"yaws", s.yaws},
                   {"mean_height", s.mean_height},
                   {"room_mean", json_of(s.room_mean)},
                   {"count", s.count}};
  }
  j["stats"] = std::move(stats);

  json pairs = json::array();
  for (const auto& [key, p] : bundle.pairs) {
    pairs.push_back({{"target", key.first},
                     {"reference", key.second},
                     {"mean", json::array({p.mean_x, p.mean_y})},
                     {"cov", json::array({p.cov_xx, p.cov_xy, p.cov_yy})},
                     {"ori_mu", p.ori_mu},
                     {"ori_kappa", p.ori_kappa},
                     {"count", p.count}});
  }
  j["pairs"] = std::move(pairs);

  json classifiers = json::object();
  for (const auto& [name, c] : bundle.classifiers) {
    classifiers[name] = {{"weights", c.weights},
                         {"bias", c.bias},
                         {"context_categories", c.context_categories},
                         {"feature_version", c.feature_version},
                         {"objective_trace", c.objective_trace}};
  }
  j["classifiers"] = std::move(classifiers);

  j["diagnostics"] = {{"learn_objective", bundle.learn_objective},
                      {"learn_skipped", bundle.learn_skipped},
                      {"mixture_loglik", bundle.mixture_loglik}};
  return j.dump(2) + "\n";
}

ModelBundle load_bundle(const std::filesystem::path& path) {
  return bundle_from_json(read_text_file(path));
}

std::string arrangement_to_json(const std::string& method,
                                std::span<const ObjectInstance> objects,
                                const std::map<std::string, std::uint64_t>& candidate_hashes) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["method"] = method;
  json arr = json::array();
  for (const auto& o : objects) {
    arr.push_back({{"category", o.category},
                   {"base", json_of(o.base_center())},
                   {"yaw", o.box.yaw}});
  }
  j["objects"] = std::move(arr);
  json hashes = json::object();
  for (const auto& [category, h] : candidate_hashes) hashes[category] = hash_to_hex(h);
  j["candidate_hashes"] = std::move(hashes);
  return j.dump(2) + "\n";
}

std::string poses_to_json(std::span<const HumanPose> poses, std::span<const double> frequencies) {
  if (poses.size() != frequencies.size()) {
    throw ValidationError("pose and frequency counts differ");
  }
  json arr = json::array();
  for (std::size_t i = 0; i < poses.size(); ++i) {
    const auto& p = poses[i];
    arr.push_back({{"type", to_string(p.type)},
                   {"activity", to_string(p.activity)},
                   {"root", json_of(p.root)},
                   {"facing", p.facing},
                   {"frequency", frequencies[i]}});
  }
  json j;
  j["schema_version"] = kSchemaVersion;
  j["poses"] = std::move(arr);
  return j.dump(2) + "\n";
}

std::string heatmap_to_csv(const HeatmapGrid& grid) {
  std::string out = "x_index,y_index,count\n";
  for (int ix = 0; ix < grid.nx; ++ix) {
    for (int iy = 0; iy < grid.ny; ++iy) {
      const long c = grid.at(ix, iy);
      if (c == 0) continue;
      out += std::to_string(ix) + "," + std::to_string(iy) + "," + std::to_string(c) + "\n";
    }
  }
  return out;
}

std::string heatmap_to_pgm(const HeatmapGrid& grid) {
  long max_count = 0;
  for (long c : grid.counts) max_count = std::max(max_count, c);
  std::string out = "P2\n" + std::to_string(grid.nx) + " " + std::to_string(grid.ny) + "\n255\n";
  for (int iy = 0; iy < grid.ny; ++iy) {
    for (int ix = 0; ix < grid.nx; ++ix) {
      const long c = grid.at(ix, iy);
      const long v = max_count == 0 ? 0 : std::lround(255.0 * c / max_count);
      if (ix > 0) out += ' ';
      out += std::to_string(v);
    }
    out += '\n';
  }
  return out;
}

}  // namespace poseplace
