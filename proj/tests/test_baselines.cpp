#include <doctest.h>

#include <cmath>
#include <vector>

#include <poseplace/baselines.hpp>
#include <poseplace/errors.hpp>
#include <poseplace/fixtures.hpp>
#include <poseplace/learning.hpp>

#include "oracles.hpp"

using namespace poseplace;

namespace {

PlacementCandidate floor_candidate(double x, double y, int bin = 0) {
  return {{x, y, 0.0}, bin * kPi / 4.0, bin, SupportId{}};
}

}  // namespace

TEST_CASE("category statistics average normalized training placements") {
  Scene a = testsupport::simple_room(2.0, 2.0, 2.0, 0.1, "box", {0.2, 0.2, 0.2});
  a.objects.push_back(a.make_instance("box", {0.5, 1.0, 0.0}, 0.3));
  a.objects.push_back(a.make_instance("box", {1.5, 1.0, 0.5}, 1.1));

  Scene b = testsupport::simple_room(4.0, 1.0, 2.5, 0.1, "box", {0.2, 0.2, 0.2});
  b.labeled_placements.push_back(b.make_instance("box", {1.0, 0.25, 0.0}, 2.0));

  const std::vector<Scene> scenes = {a, b};
  const auto stats = fit_category_stats(scenes);
  REQUIRE(stats.count("box") == 1);
  const CategoryStats& s = stats.at("box");

  CHECK(s.count == 3);
  CHECK(s.yaws == std::vector<double>{0.3, 1.1, 2.0});
  CHECK(s.mean_height == doctest::Approx((0.0 + 0.5 + 0.0) / 3.0));
  CHECK(s.room_mean.x == doctest::Approx((0.5 / 2.0 + 1.5 / 2.0 + 1.0 / 4.0) / 3.0));
  CHECK(s.room_mean.y == doctest::Approx((1.0 / 2.0 + 1.0 / 2.0 + 0.25 / 1.0) / 3.0));
  CHECK(s.room_mean.z == doctest::Approx((0.0 + 0.5 / 2.0 + 0.0) / 3.0));
}

TEST_CASE("pair density follows the bivariate normal plus von Mises form") {
  PairStats stats;
  stats.mean_x = 0.3;
  stats.mean_y = -0.2;
  stats.cov_xx = 0.04;
  stats.cov_xy = 0.01;
  stats.cov_yy = 0.09;
  stats.ori_mu = 0.5;
  stats.ori_kappa = 2.0;

  const double dx = 0.45, dy = 0.05, ori = -0.3;
  const double det = 0.04 * 0.09 - 0.01 * 0.01;
  const double ux = dx - 0.3, uy = dy + 0.2;
  const double q = (0.09 * ux * ux - 2.0 * 0.01 * ux * uy + 0.04 * uy * uy) / det;
  const double expected = -std::log(kTwoPi) - 0.5 * std::log(det) - 0.5 * q +
                          vonmises_logpdf(ori, 0.5, 2.0);
  CHECK(stats.log_density(dx, dy, ori) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("pair statistics express offsets in the reference frame") {
  Scene scene = testsupport::simple_room(3.0, 3.0, 2.0, 0.1, "keyboard", {0.4, 0.15, 0.03});
  scene.categories["monitor"] = {0.5, 0.18, 0.4};
  scene.objects.push_back(scene.make_instance("monitor", {1.0, 1.0, 0.0}, 0.4));
  scene.objects.push_back(scene.make_instance("keyboard", {1.2, 1.4, 0.0}, 0.9));

  const std::vector<Scene> scenes = {scene};
  const auto pairs = fit_pair_stats(scenes);
  REQUIRE(pairs.count({"keyboard", "monitor"}) == 1);
  REQUIRE(pairs.count({"monitor", "keyboard"}) == 1);

  const PairStats& p = pairs.at({"keyboard", "monitor"});
  CHECK(p.count == 1);
  double dx = 0.2, dy = 0.4;
  rotate_xy(-0.4, dx, dy);
  CHECK(p.mean_x == doctest::Approx(dx));
  CHECK(p.mean_y == doctest::Approx(dy));
  // A single pair floors the covariance and pins the orientation.
  CHECK(p.cov_xx == doctest::Approx(kSigmaFloor * kSigmaFloor));
  CHECK(p.cov_yy == doctest::Approx(kSigmaFloor * kSigmaFloor));
  CHECK(p.cov_xy == 0.0);
  CHECK(p.ori_mu == doctest::Approx(0.5));
  CHECK(p.ori_kappa == kKappaMax);
}

TEST_CASE("office corpora put keyboards at a stable monitor offset") {
  std::vector<Scene> scenes;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) scenes.push_back(make_office_scene(seed));
  const auto pairs = fit_pair_stats(scenes);
  REQUIRE(pairs.count({"keyboard", "monitor"}) == 1);
  const PairStats& p = pairs.at({"keyboard", "monitor"});
  CHECK(p.count == 4);

  // Recompute the frame transform independently over the corpus.
  double sx = 0.0, sy = 0.0;
  for (const auto& scene : scenes) {
    const ObjectInstance *kb = nullptr, *mon = nullptr;
    for (const auto& obj : scene.objects) {
      if (obj.category == "keyboard") kb = &obj;
      if (obj.category == "monitor") mon = &obj;
    }
    REQUIRE(kb != nullptr);
    REQUIRE(mon != nullptr);
    Vec3 d = kb->base_center() - mon->base_center();
    rotate_xy(-mon->box.yaw, d.x, d.y);
    sx += d.x;
    sy += d.y;
  }
  CHECK(p.mean_x == doctest::Approx(sx / 4.0).epsilon(1e-12));
  CHECK(p.mean_y == doctest::Approx(sy / 4.0).epsilon(1e-12));
  CHECK(p.dispersion() < 0.05);  // the jitter is centimeters, not meters
}

TEST_CASE("the open-area pick maximizes clearance and keeps the first tie") {
  const std::vector<PlacementCandidate> candidates = {
      floor_candidate(0.25, 0.5), floor_candidate(0.75, 0.5), floor_candidate(1.25, 0.5)};
  Scene scene = testsupport::simple_room(2.0, 1.0, 1.0, 0.1, "box", {0.1, 0.1, 0.1});

  scene.objects.push_back(scene.make_instance("box", {0.25, 0.5, 0.0}, 0.0));
  CHECK(open_area_pick(candidates, scene.objects) == 2);

  scene.objects[0] = scene.make_instance("box", {0.75, 0.5, 0.0}, 0.0);
  CHECK(open_area_pick(candidates, scene.objects) == 0);  // 0 and 2 tie at 0.5 m

  CHECK(open_area_pick(candidates, {}) == 0);  // nothing to avoid
  CHECK_THROWS_AS(open_area_pick({}, scene.objects), EmptyCandidateSet);
}

TEST_CASE("height and room-context picks minimize distance to the training mean") {
  std::vector<PlacementCandidate> candidates = {
      floor_candidate(0.25, 0.25), floor_candidate(0.75, 0.75), floor_candidate(0.55, 0.45)};
  candidates[1].location.z = 0.4;
  candidates[2].location.z = 0.74;

  CHECK(height_pick(candidates, 0.5) == 1);
  CHECK(height_pick(candidates, 0.0) == 0);
  CHECK_THROWS_AS(height_pick({}, 0.5), EmptyCandidateSet);

  const Scene scene = testsupport::simple_room(2.0, 1.0, 1.0, 0.1, "box", {0.1, 0.1, 0.1});
  candidates[1].location.z = 0.0;
  candidates[2].location.z = 0.0;
  // Normalized mean (0.25, 0.5, 0) maps to the point (0.5, 0.5, 0).
  CHECK(room_context_pick(candidates, scene, {0.25, 0.5, 0.0}) == 2);
  CHECK_THROWS_AS(room_context_pick({}, scene, {0.5, 0.5, 0.0}), EmptyCandidateSet);
}

TEST_CASE("object-context scoring picks the tightest co-present reference") {
  PairStatsMap pairs;
  PairStats tight;
  tight.mean_x = 0.3;
  tight.cov_xx = 0.01;
  tight.cov_yy = 0.01;
  tight.ori_kappa = 1.0;
  PairStats loose = tight;
  loose.cov_xx = 1.0;
  loose.cov_yy = 1.0;
  pairs[{"box", "table"}] = tight;
  pairs[{"box", "shelf"}] = loose;

  Scene scene = testsupport::simple_room(3.0, 3.0, 1.0, 0.1, "box", {0.1, 0.1, 0.1});
  scene.categories["table"] = {0.5, 0.5, 0.4};
  scene.categories["shelf"] = {0.5, 0.3, 0.9};
  const std::vector<PlacementCandidate> candidates = {floor_candidate(1.0, 1.0, 2),
                                                      floor_candidate(2.0, 2.0, 5)};

  SUBCASE("both references present chooses the smaller dispersion") {
    scene.objects.push_back(scene.make_instance("table", {0.7, 1.0, 0.0}, 0.5));
    scene.objects.push_back(scene.make_instance("table", {2.2, 2.0, 0.0}, 1.2));
    scene.objects.push_back(scene.make_instance("shelf", {1.5, 2.5, 0.0}, 0.0));
    const auto scores = object_context_scores(candidates, scene.objects, "box", pairs);
    CHECK(scores.reference == "table");
    REQUIRE(scores.log_scores.size() == 2);

    // Each candidate scores against its best-matching reference instance.
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& obj : scene.objects) {
        if (obj.category != "table") continue;
        Vec3 d = candidates[i].location - obj.base_center();
        rotate_xy(-obj.box.yaw, d.x, d.y);
        best = std::max(best, tight.log_density(d.x, d.y,
                                                wrap_pi(candidates[i].orientation -
                                                        obj.box.yaw)));
      }
      CHECK(scores.log_scores[i] == doctest::Approx(best).epsilon(1e-12));
    }
  }

  SUBCASE("a missing preferred reference falls through to the present one") {
    scene.objects.push_back(scene.make_instance("shelf", {1.5, 2.5, 0.0}, 0.0));
    const auto scores = object_context_scores(candidates, scene.objects, "box", pairs);
    CHECK(scores.reference == "shelf");
  }

  SUBCASE("no trained reference present throws") {
    scene.objects.push_back(scene.make_instance("box", {1.5, 2.5, 0.0}, 0.0));
    CHECK_THROWS_WITH_AS(object_context_scores(candidates, scene.objects, "box", pairs),
                         doctest::Contains("box"), NoReference);
  }
}

TEST_CASE("picks copy the nearest training orientation and rebin") {
  PlacementCandidate pick = floor_candidate(1.0, 1.0, 1);  // orientation pi/4

  SUBCASE("nearest yaw wins") {
    const std::vector<double> yaws = {0.1, 3.0};
    const PlacementCandidate out = apply_training_orientation(pick, yaws);
    CHECK(out.orientation == doctest::Approx(0.1));
    CHECK(out.orientation_bin == 0);
    CHECK(out.location.x == pick.location.x);
  }

  SUBCASE("distance is circular") {
    const std::vector<double> yaws = {6.2, 2.0};  // 6.2 is 0.08 short of a full turn
    PlacementCandidate near_zero = floor_candidate(1.0, 1.0, 0);
    const PlacementCandidate out = apply_training_orientation(near_zero, yaws);
    CHECK(out.orientation == doctest::Approx(6.2));
    CHECK(out.orientation_bin == 0);  // rounds through the full turn back to bin 0
  }

  SUBCASE("no training yaws leaves the pick alone") {
    const PlacementCandidate out = apply_training_orientation(pick, {});
    CHECK(out.orientation == pick.orientation);
    CHECK(out.orientation_bin == 1);
  }
}

TEST_CASE("single-shot baselines return hashes over the scored candidate set") {
  const Scene scene = make_office_scene(5);
  std::vector<Scene> corpus;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) corpus.push_back(make_office_scene(seed));
  const auto stats = fit_category_stats(corpus);
  const auto pairs = fit_pair_stats(corpus);

  const std::uint64_t expected_hash = candidate_set_hash(feasible_candidates(scene, "mug"));
  const BaselinePick open = baseline_open_area(scene, "mug", stats.at("mug"));
  const BaselinePick height = baseline_height(scene, "mug", stats.at("mug"));
  const BaselinePick room = baseline_room_context(scene, "mug", stats.at("mug"));
  const BaselinePick object = baseline_object_context(scene, "mug", pairs);

  CHECK(open.candidate_hash == expected_hash);
  CHECK(height.candidate_hash == expected_hash);
  CHECK(room.candidate_hash == expected_hash);
  CHECK(object.candidate_hash == expected_hash);

  // Height training data puts mugs on the desk, so the pick lands at desk height.
  CHECK(height.candidate.location.z == doctest::Approx(0.74));
}

TEST_CASE("placement features follow the fixed schema") {
  Scene scene = testsupport::simple_room(2.0, 1.0, 1.0, 0.1, "box", {0.2, 0.2, 0.2});
  scene.objects.push_back(scene.make_instance("box", {0.9, 0.25, 0.0}, 0.0));

  PlacementCandidate candidate = floor_candidate(0.5, 0.25, 3);
  const std::vector<std::string> context_categories = {"box"};
  const auto f = extract_features(scene, scene.objects, candidate, "box", context_categories);
  REQUIRE(f.size() == 31);

  CHECK(f[0] == 0.0);                          // base height
  CHECK(f[1] == doctest::Approx(0.25));        // x / room width
  CHECK(f[2] == doctest::Approx(0.25));        // y / room depth
  CHECK(f[3] == doctest::Approx(0.25));        // nearest wall
  CHECK(f[4] == doctest::Approx(0.4));         // nearest object
  CHECK(f[5] == doctest::Approx(0.4));         // nearest box distance
  CHECK(f[6] == doctest::Approx(wrap_pi(0.0 - 3.0 * kPi / 4.0)));  // bearing to it
  for (int j = 7; j < 21; ++j) CHECK(f[j] == 0.0);  // unused context slots
  for (int b = 0; b < 8; ++b) CHECK(f[21 + b] == (b == 3 ? 1.0 : 0.0));
  CHECK(f[29] == doctest::Approx(0.04));       // footprint area
  CHECK(f[30] == doctest::Approx(2.0));        // floor support area

  SUBCASE("absent context categories contribute zeros") {
    const std::vector<std::string> ghost = {"ghost"};
    const auto g = extract_features(scene, scene.objects, candidate, "box", ghost);
    CHECK(g[5] == 0.0);
    CHECK(g[6] == 0.0);
  }

  SUBCASE("furniture support reports the top area") {
    testsupport::add_block(scene, "table", {1.5, 0.5, 0.2}, {0.8, 0.5, 0.4});
    PlacementCandidate on_top = floor_candidate(1.5, 0.5, 0);
    on_top.location.z = 0.4;
    on_top.support.furniture = 0;
    const auto g = extract_features(scene, scene.objects, on_top, "box", context_categories);
    CHECK(g[0] == doctest::Approx(0.4));
    CHECK(g[30] == doctest::Approx(0.4));
  }
}

TEST_CASE("the classifier separates elevated placements from the floor") {
  auto table_scene = [](double cx, double cy) {
    Scene scene = testsupport::simple_room(2.0, 2.0, 1.5, 0.1, "box", {0.2, 0.2, 0.1});
    testsupport::add_block(scene, "table", {cx, cy, 0.2}, {0.8, 0.8, 0.4});
    scene.objects.push_back(scene.make_instance("box", {cx, cy, 0.4}, 0.0));
    return scene;
  };
  const std::vector<Scene> scenes = {table_scene(0.6, 0.6), table_scene(1.3, 0.7),
                                     table_scene(1.0, 1.4)};

  ClassifierTrainConfig config;
  config.positive_radius = 0.3;
  config.max_iters = 200;
  config.grad_tol = 1e-4;
  config.seed = 3;

  const ClassifierModel model = train_category_classifier(scenes, "box", {}, config);
  CHECK(model.weights.size() == 31);
  CHECK(model.feature_version == 1);
  REQUIRE(model.objective_trace.size() >= 2);
  for (std::size_t i = 1; i < model.objective_trace.size(); ++i) {
    CHECK(model.objective_trace[i] >= model.objective_trace[i - 1]);
  }

  // A fresh room with the table elsewhere: the pick lands on the table top.
  Scene test = table_scene(1.2, 1.2);
  test.objects.clear();
  const auto candidates = feasible_candidates(test, "box");
  const int pick = classifier_pick(candidates, test, test.objects, "box", model);
  CHECK(candidates[pick].location.z == doctest::Approx(0.4));
  CHECK_FALSE(candidates[pick].support.is_floor());

  SUBCASE("training is deterministic in the seed") {
    const ClassifierModel again = train_category_classifier(scenes, "box", {}, config);
    CHECK(again.weights == model.weights);
    CHECK(again.bias == model.bias);
  }

  SUBCASE("the bundle trainer skips hopeless categories instead of failing") {
    ClassifierTrainConfig strict = config;
    strict.positive_radius = 1e-4;  // no candidate sits this close to a label
    CHECK_THROWS_AS(train_category_classifier(scenes, "box", {}, strict), InsufficientData);
    const ClassifierSet set = train_classifier(scenes, strict);
    CHECK(set.count("box") == 0);
  }

  SUBCASE("baseline wrapper hashes the scored set") {
    const BaselinePick pick_full = baseline_classifier(test, "box", model);
    CHECK(pick_full.candidate_hash == candidate_set_hash(candidates));
    CHECK(pick_full.candidate.location.z == doctest::Approx(0.4));
  }
}

TEST_CASE("classifier training requires scenes") {
  ClassifierTrainConfig config;
  const std::vector<Scene> none;
  CHECK_THROWS_AS(train_classifier(none, config), TooFewScenes);
}

TEST_CASE("mixture training raises the observed likelihood monotonically") {
  const std::vector<Scene> scenes = {make_office_scene(1), make_office_scene(2)};

  FMMConfig config;
  config.k = 2;
  config.em_iters = 8;
  config.em_tol = 0.0;
  config.seed = 5;

  const FMMTrainResult result = fmm_fit(scenes, config);
  REQUIRE(result.loglik.size() >= 2);
  for (std::size_t i = 1; i < result.loglik.size(); ++i) {
    CHECK(result.loglik[i] >= result.loglik[i - 1] - 1e-9);
  }
  CHECK(result.params.categories.size() == 5);
  CHECK_NOTHROW(result.params.validate());

  SUBCASE("training is deterministic in the seed") {
    const FMMTrainResult again = fmm_fit(scenes, config);
    CHECK(again.loglik == result.loglik);
    CHECK(again.params.categories.at("mug").dist_mu ==
          result.params.categories.at("mug").dist_mu);
  }

  SUBCASE("configuration bounds are enforced") {
    FMMConfig bad = config;
    bad.k = 0;
    CHECK_THROWS_AS(fmm_fit(scenes, bad), ValidationError);
    bad = config;
    bad.em_iters = 0;
    CHECK_THROWS_AS(fmm_fit(scenes, bad), ValidationError);
    bad = config;
    bad.em_tol = -1.0;
    CHECK_THROWS_AS(fmm_fit(scenes, bad), ValidationError);
    const std::vector<Scene> none;
    CHECK_THROWS_AS(fmm_fit(none, config), TooFewScenes);
  }
}

TEST_CASE("mixture placement fills targets from their candidate lists") {
  const std::vector<Scene> corpus = {make_office_scene(1), make_office_scene(2)};
  FMMConfig config;
  config.k = 2;
  config.em_iters = 5;
  config.seed = 4;
  const ModelParams params = fmm_fit(corpus, config).params;

  Scene scene = make_office_scene(9);
  std::erase_if(scene.objects, [](const ObjectInstance& o) { return o.category == "mug"; });
  const std::vector<TargetSpec> targets = {{"mug-0", "mug"}, {"lamp-1", "lamp"}};

  const FMMPredictResult result = fmm_predict(scene, targets, params, config);
  REQUIRE(result.objects.size() == 2);
  CHECK(result.objects[0].category == "mug");
  CHECK(result.objects[1].category == "lamp");
  for (std::size_t i = 1; i < result.loglik.size(); ++i) {
    CHECK(result.loglik[i] >= result.loglik[i - 1] - 1e-9);
  }

  // Every prediction sits on an actual candidate of its category.
  for (const auto& [category, hash] : result.candidate_hashes) {
    CHECK(hash == candidate_set_hash(feasible_candidates(scene, category)));
  }
  for (const auto& obj : result.objects) {
    const auto candidates = feasible_candidates(scene, obj.category);
    bool found = false;
    for (const auto& c : candidates) {
      if (std::abs(c.location.x - obj.base_center().x) < 1e-12 &&
          std::abs(c.location.y - obj.base_center().y) < 1e-12 &&
          std::abs(wrap_pi(c.orientation - obj.box.yaw)) < 1e-12) {
        found = true;
        break;
      }
    }
    CHECK_MESSAGE(found, "prediction off the candidate list for ", obj.category);
  }

  SUBCASE("prediction is deterministic in the seed") {
    const FMMPredictResult again = fmm_predict(scene, targets, params, config);
    REQUIRE(again.objects.size() == 2);
    CHECK(again.objects[0].base_center().x == result.objects[0].base_center().x);
    CHECK(again.loglik == result.loglik);
  }

  SUBCASE("unlearned fixed objects are ignored, unlearned targets rejected") {
    ModelParams partial = params;
    partial.categories.erase("trash_bin");  // fixed object only
    CHECK_NOTHROW(fmm_predict(scene, targets, partial, config));
    partial.categories.erase("mug");
    CHECK_THROWS_AS(fmm_predict(scene, targets, partial, config), ValidationError);
  }
}

TEST_CASE("score distributions are cellwise softmax histograms") {
  const std::vector<PlacementCandidate> candidates = {
      floor_candidate(0.10, 0.10), floor_candidate(0.13, 0.10),
      floor_candidate(0.30, 0.10)};
  const std::vector<double> scores = {std::log(0.2), std::log(0.3), std::log(0.5)};

  const PlacementDistribution dist = score_distribution(candidates, scores, 77);
  CHECK(dist.candidate_hash == 77);
  REQUIRE(dist.cells.size() == 2);
  const CellKey near{0, 0, 0, 0};
  const CellKey far{1, 0, 0, 0};
  CHECK(dist.cells.at(near).freq == doctest::Approx(0.5));
  CHECK(dist.cells.at(near).representative == 1);  // 0.3 beats 0.2
  CHECK(dist.cells.at(far).freq == doctest::Approx(0.5));
  CHECK(dist.cells.at(far).representative == 2);

  SUBCASE("impossible candidates drop out of the histogram") {
    const std::vector<double> partial = {-std::numeric_limits<double>::infinity(),
                                         -std::numeric_limits<double>::infinity(),
                                         0.0};
    const PlacementDistribution d = score_distribution(candidates, partial, 77);
    REQUIRE(d.cells.size() == 1);
    CHECK(d.cells.at(far).freq == doctest::Approx(1.0));
  }

  SUBCASE("all-impossible scores spread mass uniformly") {
    const std::vector<double> none(3, -std::numeric_limits<double>::infinity());
    const PlacementDistribution d = score_distribution(candidates, none, 77);
    CHECK(d.cells.at(near).freq == doctest::Approx(2.0 / 3.0));
    CHECK(d.cells.at(far).freq == doctest::Approx(1.0 / 3.0));
  }

  SUBCASE("input sizes must agree") {
    const std::vector<double> short_scores = {0.0};
    CHECK_THROWS_AS(score_distribution(candidates, short_scores, 77), ValidationError);
    CHECK_THROWS_AS(score_distribution({}, {}, 77), EmptyCandidateSet);
  }
}

TEST_CASE("combining human and object scores mixes cell masses linearly") {
  auto stat = [](double freq, double x) {
    CellStat s;
    s.freq = freq;
    s.representative = 0;
    s.candidate = floor_candidate(x, 0.1);
    return s;
  };
  const CellKey a{0, 0, 0, 0}, b{1, 0, 0, 0}, c{2, 0, 0, 0};

  PlacementDistribution human;
  human.candidate_hash = 9;
  human.samples = 100;
  human.cells[a] = stat(0.6, 0.1);
  human.cells[b] = stat(0.4, 0.3);

  PlacementDistribution object;
  object.candidate_hash = 9;
  object.samples = 40;
  object.cells[b] = stat(0.3, 0.35);
  object.cells[c] = stat(0.7, 0.6);

  const PlacementDistribution mixed = combine_human_object(human, object, 0.25);
  REQUIRE(mixed.cells.size() == 3);
  CHECK(mixed.cells.at(a).freq == doctest::Approx(0.25 * 0.6));
  CHECK(mixed.cells.at(b).freq == doctest::Approx(0.25 * 0.4 + 0.75 * 0.3));
  CHECK(mixed.cells.at(c).freq == doctest::Approx(0.75 * 0.7));
  CHECK(mixed.samples == 100);

  // Cell b's representative comes from the larger weighted contribution.
  CHECK(mixed.cells.at(b).candidate.location.x == doctest::Approx(0.35));

  double total = 0.0;
  for (const auto& [key, s] : mixed.cells) total += s.freq;
  CHECK(total == doctest::Approx(1.0));

  SUBCASE("the endpoints reproduce their inputs exactly") {
    const PlacementDistribution at_one = combine_human_object(human, object, 1.0);
    CHECK(at_one.cells.size() == human.cells.size());
    for (const auto& [key, s] : human.cells) {
      CHECK(at_one.cells.at(key).freq == s.freq);
      CHECK(at_one.cells.at(key).candidate.location.x == s.candidate.location.x);
    }
    CHECK(at_one.samples == human.samples);

    const PlacementDistribution at_zero = combine_human_object(human, object, 0.0);
    CHECK(at_zero.cells.size() == object.cells.size());
    for (const auto& [key, s] : object.cells) {
      CHECK(at_zero.cells.at(key).freq == s.freq);
    }
    CHECK(at_zero.samples == object.samples);
  }

  SUBCASE("mismatched candidate sets are rejected") {
    PlacementDistribution other = object;
    other.candidate_hash = 10;
    CHECK_THROWS_AS(combine_human_object(human, other, 0.5), MismatchedCandidates);
  }

  SUBCASE("omega is range-checked") {
    CHECK_THROWS_AS(combine_human_object(human, object, -0.1), DomainError);
    CHECK_THROWS_AS(combine_human_object(human, object, 1.1), DomainError);
  }
}
