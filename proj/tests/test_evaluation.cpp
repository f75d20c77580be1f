#include <doctest.h>

#include <cmath>
#include <map>
#include <tuple>
#include <vector>

#include <poseplace/errors.hpp>
#include <poseplace/evaluation.hpp>
#include <poseplace/fixtures.hpp>

#include "oracles.hpp"

using namespace poseplace;

namespace {

// Four floor-box rooms tall enough to admit poses; scene 3 adds a one-off
// category so one fold must evaluate a category its training never saw.
std::vector<Scene> eval_corpus() {
  std::vector<Scene> scenes;
  for (int i = 0; i < 4; ++i) {
    Scene scene = testsupport::simple_room(3.0, 3.0, 2.6, 0.1, "box", {0.2, 0.2, 0.1});
    scene.categories["vase"] = {0.1, 0.1, 0.2};
    scene.objects.push_back(scene.make_instance("box", {0.55, 0.15, 0.0}, 0.0));
    scene.objects.push_back(scene.make_instance("box", {2.0, 1.5, 0.0}, 0.0));
    if (i == 3) scene.objects.push_back(scene.make_instance("vase", {1.5, 2.5, 0.0}, 0.0));
    scenes.push_back(std::move(scene));
  }
  return scenes;
}

EvalOptions quick_eval_options() {
  EvalOptions options;
  options.methods = {"height", "oracle"};
  options.folds = 2;
  options.seed = 3;
  options.train.learn.samples_per_scene = 2;
  options.train.learn.max_outer_iters = 1;
  options.train.learn.min_pairs = 1;
  options.train.learn.dp.burn_in = 4;
  options.train.learn.dp.thinning = 1;
  options.train.learn.dp.seed = 17;
  options.train.fmm.k = 1;
  options.train.fmm.em_iters = 1;
  options.train.classifier.max_iters = 25;
  return options;
}

}  // namespace

TEST_CASE("location error is horizontal, height error is vertical") {
  CHECK(location_error({1.0, 2.0, 3.0}, {4.0, 6.0, 0.0}) == doctest::Approx(5.0));
  CHECK(location_error({1.0, 2.0, 3.0}, {1.0, 2.0, 9.0}) == 0.0);
  CHECK(height_error({1.0, 2.0, 3.0}, {4.0, 6.0, 0.5}) == doctest::Approx(2.5));
}

TEST_CASE("fold assignment is a balanced seeded partition") {
  const auto fold = fold_assignment(10, 3, 5);
  REQUIRE(fold.size() == 10);
  std::vector<int> counts(3, 0);
  for (int f : fold) {
    REQUIRE(f >= 0);
    REQUIRE(f < 3);
    counts[f]++;
  }
  const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
  CHECK(*hi - *lo <= 1);

  CHECK(fold_assignment(10, 3, 5) == fold);
  // Different seeds shuffle scenes into different folds.
  bool any_different = false;
  for (std::uint64_t seed = 6; seed < 12 && !any_different; ++seed) {
    any_different = fold_assignment(10, 3, seed) != fold;
  }
  CHECK(any_different);

  CHECK_THROWS_AS(fold_assignment(10, 1, 5), ValidationError);
  CHECK(fold_assignment(0, 2, 5).empty());
}

TEST_CASE("cross-validation scores held-out scenes against removed objects") {
  const std::vector<Scene> scenes = eval_corpus();
  const std::vector<std::string> names = {"s0", "s1", "s2", "s3"};
  const EvalOptions options = quick_eval_options();

  const auto records = cross_validate(scenes, names, options);

  // One record per held-out (scene, category, method).
  CHECK(records.size() == 10);  // 4 scenes x box x 2 methods + s3 vase x 2
  std::map<std::tuple<std::string, std::string, std::string>, const EvalRecord*> index;
  for (const auto& r : records) {
    const auto key = std::make_tuple(r.scene, r.category, r.method);
    CHECK(index.count(key) == 0);
    index[key] = &r;
    CHECK(r.scenario == "new_objects");
  }

  // Every scene is evaluated in its assigned fold.
  const auto fold = fold_assignment(scenes.size(), options.folds, options.seed);
  for (const auto& r : records) {
    const int scene_index = r.scene[1] - '0';
    CHECK(r.fold == fold[scene_index]);
  }

  // The oracle replays the ground truth, so its errors vanish.
  for (const auto& name : names) {
    const EvalRecord& r = *index.at({name, "box", "oracle"});
    CHECK(r.matched == 2);
    CHECK(r.location_error == 0.0);
    CHECK(r.height_error == 0.0);
  }
  CHECK(index.at({"s3", "vase", "oracle"})->matched == 1);

  // The height baseline stacks both boxes on the first floor cell; greedy
  // matching then pairs nearest-first and averages the two distances.
  const double near = std::hypot(0.55 - 0.15, 0.0);
  const double far = std::hypot(2.0 - 0.15, 1.5 - 0.15);
  for (const auto& name : names) {
    const EvalRecord& r = *index.at({name, "box", "height"});
    CHECK(r.matched == 2);
    CHECK(r.location_error == doctest::Approx((near + far) / 2.0));
    CHECK(r.height_error == doctest::Approx(0.0));
  }

  // s3's vase was never seen by its training fold: the failure is recorded
  // by name and the run stays out of the averages.
  const EvalRecord& failed = *index.at({"s3", "vase", "height"});
  CHECK(failed.matched == 0);
  CHECK(failed.note.find("vase") != std::string::npos);

  const std::string report = render_report(records);
  CHECK(report.find("height,") != std::string::npos);
  // The vase column for the height row is empty: no successful run backs it.
  const std::size_t row = report.find("\nheight,");
  REQUIRE(row != std::string::npos);
  const std::size_t eol = report.find('\n', row + 1);
  const std::string height_row = report.substr(row + 1, eol - row - 1);
  CHECK(height_row.find(",,") != std::string::npos);
}

TEST_CASE("the empty-room scenario slices one joint prediction per category") {
  const std::vector<Scene> scenes = eval_corpus();
  const std::vector<std::string> names = {"s0", "s1", "s2", "s3"};
  EvalOptions options = quick_eval_options();
  options.methods = {"oracle"};
  options.scenario = "empty_room";

  const auto records = cross_validate(scenes, names, options);
  CHECK(records.size() == 5);  // 4 x box + s3 vase
  for (const auto& r : records) {
    CAPTURE(r.scene);
    CAPTURE(r.category);
    CHECK(r.scenario == "empty_room");
    CHECK(r.matched == (r.category == "box" ? 2 : 1));
    CHECK(r.location_error == 0.0);
    CHECK(r.height_error == 0.0);
  }
}

TEST_CASE("cross-validation rejects malformed requests") {
  const std::vector<Scene> scenes = eval_corpus();
  const std::vector<std::string> names = {"s0", "s1", "s2", "s3"};
  EvalOptions options = quick_eval_options();

  const std::vector<std::string> short_names = {"s0"};
  CHECK_THROWS_AS(cross_validate(scenes, short_names, options), ValidationError);

  EvalOptions bad = options;
  bad.methods.clear();
  CHECK_THROWS_AS(cross_validate(scenes, names, bad), ValidationError);

  bad = options;
  bad.methods = {"teleport"};
  CHECK_THROWS_WITH_AS(cross_validate(scenes, names, bad), doctest::Contains("teleport"),
                       ValidationError);

  bad = options;
  bad.scenario = "haunted_room";
  CHECK_THROWS_WITH_AS(cross_validate(scenes, names, bad), doctest::Contains("haunted_room"),
                       ValidationError);

  bad = options;
  bad.folds = 9;
  CHECK_THROWS_AS(cross_validate(scenes, names, bad), TooFewScenes);

  bad = options;
  bad.folds = 1;
  CHECK_THROWS_AS(cross_validate(scenes, names, bad), ValidationError);
}

TEST_CASE("the report renders per-category means and a standard-error summary") {
  std::vector<EvalRecord> records;
  records.push_back({"s0", "a", "DP", "new_objects", 0, 2, 1.30, 0.10, ""});
  records.push_back({"s1", "b", "DP", "new_objects", 1, 1, 1.66, 0.30, ""});
  // A failed run contributes nothing, not even a zero.
  records.push_back({"s2", "a", "DP", "new_objects", 0, 0, 99.0, 99.0, "blocked"});

  const std::string expected =
      "location (m)\n"
      "method,a,b,AVG\n"
      "DP,1.30,1.66,1.48±.18\n"
      "\n"
      "height (m)\n"
      "method,a,b,AVG\n"
      "DP,0.10,0.30,0.20±.10\n";
  CHECK(render_report(records) == expected);
}

TEST_CASE("report cells stay empty for categories a method never placed") {
  std::vector<EvalRecord> records;
  records.push_back({"s0", "a", "DP", "new_objects", 0, 1, 1.0, 0.0, ""});
  records.push_back({"s0", "c", "X", "new_objects", 0, 1, 2.0, 0.0, ""});

  const std::string expected =
      "location (m)\n"
      "method,a,c,AVG\n"
      "DP,1.00,,1.00±.00\n"
      "X,,2.00,2.00±.00\n"
      "\n"
      "height (m)\n"
      "method,a,c,AVG\n"
      "DP,0.00,,0.00±.00\n"
      "X,,0.00,0.00±.00\n";
  CHECK(render_report(records) == expected);
}

TEST_CASE("record CSV is stable and quotes awkward notes") {
  std::vector<EvalRecord> records;
  records.push_back({"scene one", "mug", "dp", "new_objects", 2, 3, 0.5, 0.25, ""});
  records.push_back({"s1", "mug", "dp", "empty_room", 0, 0, 0.0, 0.0, "no room, \"sorry\""});

  const std::string expected =
      "scene,category,method,scenario,fold,matched,location_error,height_error,note\n"
      "scene one,mug,dp,new_objects,2,3,0.500000,0.250000,\n"
      "s1,mug,dp,empty_room,0,0,,,\"no room, \"\"sorry\"\"\"\n";
  CHECK(records_to_csv(records) == expected);
}
