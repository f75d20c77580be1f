#include <doctest.h>

#include <cmath>
#include <vector>

#include <poseplace/errors.hpp>
#include <poseplace/fixtures.hpp>
#include <poseplace/learning.hpp>
#include <poseplace/numerics.hpp>

#include "oracles.hpp"

using namespace poseplace;

namespace {

HumanPose manual_pose(Vec3 root, double facing, Activity activity, PoseType type) {
  HumanPose pose;
  pose.type = type;
  pose.root = root;
  pose.facing = facing;
  pose.activity = activity;
  for (auto& j : pose.joints) j = root;
  pose.joints[static_cast<int>(Joint::torso)] = root + Vec3{0.0, 0.0, 1.0};
  pose.joints[static_cast<int>(Joint::head)] = root + Vec3{0.0, 0.0, 1.6};
  pose.joints[static_cast<int>(Joint::left_hand)] = root + rotate_z(facing, {0.3, 0.2, 0.9});
  pose.joints[static_cast<int>(Joint::right_hand)] = root + rotate_z(facing, {0.3, -0.2, 0.9});
  return pose;
}

}  // namespace

TEST_CASE("gaussian fit reproduces weighted sufficient statistics") {
  const std::vector<double> values = {1.0, 2.0, 3.0, 6.0};
  const GaussianFit fit = fit_gaussian_mle(values);
  CHECK(fit.mu == doctest::Approx(3.0));
  CHECK(fit.sigma == doctest::Approx(std::sqrt(3.5)));

  const std::vector<double> two = {0.0, 10.0};
  const std::vector<double> weights = {3.0, 1.0};
  const GaussianFit weighted = fit_gaussian_mle(two, weights);
  CHECK(weighted.mu == doctest::Approx(2.5));
  CHECK(weighted.sigma == doctest::Approx(std::sqrt(18.75)));

  SUBCASE("an integer weight equals repeating the value") {
    const std::vector<double> expanded = {0.0, 0.0, 0.0, 10.0};
    const GaussianFit rep = fit_gaussian_mle(expanded);
    CHECK(rep.mu == doctest::Approx(weighted.mu).epsilon(1e-12));
    CHECK(rep.sigma == doctest::Approx(weighted.sigma).epsilon(1e-12));
  }

  SUBCASE("degenerate spread floors at two centimeters") {
    const std::vector<double> flat = {5.0, 5.0, 5.0};
    const GaussianFit floored = fit_gaussian_mle(flat);
    CHECK(floored.mu == doctest::Approx(5.0));
    CHECK(floored.sigma == kSigmaFloor);
  }

  SUBCASE("too little data throws") {
    const std::vector<double> one = {1.0};
    CHECK_THROWS_AS(fit_gaussian_mle(one), InsufficientData);
    const std::vector<double> zeros = {0.0, 0.0};
    CHECK_THROWS_AS(fit_gaussian_mle(two, zeros), InsufficientData);
  }
}

TEST_CASE("lognormal fit is the gaussian fit of the logs") {
  const std::vector<double> values = {std::exp(1.0), std::exp(2.0), std::exp(3.0)};
  const GaussianFit fit = fit_lognormal_mle(values);
  CHECK(fit.mu == doctest::Approx(2.0));
  CHECK(fit.sigma == doctest::Approx(std::sqrt(2.0 / 3.0)));

  std::vector<double> logs(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) logs[i] = std::log(values[i]);
  const GaussianFit of_logs = fit_gaussian_mle(logs);
  CHECK(fit.mu == of_logs.mu);
  CHECK(fit.sigma == of_logs.sigma);

  const std::vector<double> bad = {1.0, 0.0};
  CHECK_THROWS_AS(fit_lognormal_mle(bad), DomainError);
}

TEST_CASE("von Mises fit recovers direction and concentration") {
  SUBCASE("two perpendicular angles by hand") {
    const std::vector<double> angles = {0.0, kPi / 2.0};
    const VonMisesFit fit = fit_vonmises_mle(angles);
    CHECK(fit.mu == doctest::Approx(kPi / 4.0));
    CHECK(fit.rbar == doctest::Approx(std::sqrt(0.5)));
    CHECK(bessel_i1_i0_ratio(fit.kappa) == doctest::Approx(fit.rbar).epsilon(1e-5));
  }

  SUBCASE("draws from a reference sampler") {
    Rng rng(314);
    std::vector<double> angles(20000);
    for (double& a : angles) a = testsupport::vonmises_sample(rng, 0.7, 4.0);
    const VonMisesFit fit = fit_vonmises_mle(angles);
    CHECK(fit.mu == doctest::Approx(0.7).epsilon(0.03));
    CHECK(fit.kappa == doctest::Approx(4.0).epsilon(0.08));
  }

  SUBCASE("coincident angles clamp at the concentration cap") {
    const std::vector<double> same = {1.2, 1.2, 1.2};
    const VonMisesFit fit = fit_vonmises_mle(same);
    CHECK(fit.rbar == doctest::Approx(1.0));
    CHECK(fit.kappa == 700.0);
  }

  SUBCASE("balanced opposite angles give zero concentration") {
    const std::vector<double> opposed = {0.0, kPi};
    const VonMisesFit fit = fit_vonmises_mle(opposed);
    CHECK(fit.rbar == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(fit.kappa == doctest::Approx(0.0));
  }

  SUBCASE("weights steer the mean direction") {
    const std::vector<double> angles = {0.0, kPi / 2.0};
    const std::vector<double> weights = {3.0, 1.0};
    const VonMisesFit fit = fit_vonmises_mle(angles, weights);
    CHECK(fit.mu == doctest::Approx(std::atan2(1.0, 3.0)));
  }

  const std::vector<double> one = {0.3};
  CHECK_THROWS_AS(fit_vonmises_mle(one), InsufficientData);
}

TEST_CASE("activity rows smooth every cell before normalizing") {
  const std::vector<double> counts = {2.0, 1.0, 0.0, 0.0, 0.0};
  const auto row = fit_activity_row(counts);
  const double total = 3.0 + 5.0 * kTableSmoothing;
  CHECK(row[0] == doctest::Approx((2.0 + kTableSmoothing) / total).epsilon(1e-12));
  CHECK(row[1] == doctest::Approx((1.0 + kTableSmoothing) / total).epsilon(1e-12));
  CHECK(row[2] == doctest::Approx(kTableSmoothing / total).epsilon(1e-12));

  double sum = 0.0;
  for (double v : row) {
    CHECK(v > 0.0);
    sum += v;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("training pairs record the geometry against every anchor joint") {
  const HumanPose pose = manual_pose({1.0, 2.0, 0.0}, 0.8, Activity::writing,
                                     PoseType::leaning_forward);
  const Vec3 loc{1.9, 2.4, 0.74};
  const double ori = 2.1;
  const TrainingPair pair = make_training_pair(pose, loc, ori, 1.5);

  const RelativeGeometry g = relative_geometry(pose, loc, ori, Joint::torso);
  CHECK(pair.rel_bearing == doctest::Approx(g.rel_bearing));
  CHECK(pair.ori_diff == doctest::Approx(g.ori_diff));
  CHECK(pair.rel_height == doctest::Approx(g.rel_height));
  for (std::size_t j = 0; j < kDistanceJointCandidates.size(); ++j) {
    const Vec3 d = loc - pose.joint(kDistanceJointCandidates[j]);
    CHECK(pair.joint_distance[j] ==
          doctest::Approx(std::max(norm(d), kMinDistance)));
  }
  CHECK(pair.pose_type == PoseType::leaning_forward);
  CHECK(pair.activity == Activity::writing);
  CHECK(pair.weight == 1.5);
}

TEST_CASE("the anchor joint with the tightest log-distance wins") {
  Rng rng(88);
  std::vector<TrainingPair> pairs(60);
  for (auto& pair : pairs) {
    pair.joint_distance[0] = std::exp(rng.normal(0.0, 1.4));   // head, diffuse
    pair.joint_distance[1] = std::exp(rng.normal(0.5, 1.2));   // torso, diffuse
    pair.joint_distance[2] = std::exp(rng.normal(-0.3, 1.5));  // left hand, diffuse
    pair.joint_distance[3] = std::exp(rng.normal(-1.2, 0.1));  // right hand, tight
  }
  CHECK(select_distance_joint(pairs) == Joint::right_hand);

  SUBCASE("the torso wins exact ties") {
    for (auto& pair : pairs) {
      pair.joint_distance = {pair.joint_distance[3], pair.joint_distance[3],
                             pair.joint_distance[3], pair.joint_distance[3]};
    }
    CHECK(select_distance_joint(pairs) == Joint::torso);
  }

  const std::vector<TrainingPair> one(1);
  CHECK_THROWS_AS(select_distance_joint(one), InsufficientData);
}

TEST_CASE("category fitting recovers synthetic relation parameters") {
  Rng rng(2718);
  std::vector<TrainingPair> pairs(5000);
  for (auto& pair : pairs) {
    pair.joint_distance[0] = std::exp(rng.normal(0.3, 1.5));
    pair.joint_distance[1] = std::exp(rng.normal(-0.5, 0.3));  // torso, the generator
    pair.joint_distance[2] = std::exp(rng.normal(0.1, 1.4));
    pair.joint_distance[3] = std::exp(rng.normal(0.4, 1.6));
    pair.rel_bearing = wrap_pi(testsupport::vonmises_sample(rng, 0.4, 3.0));
    pair.ori_diff = wrap_pi(testsupport::vonmises_sample(rng, -0.8, 6.0));
    pair.rel_height = rng.normal(-0.2, 0.15);
    const double u = rng.uniform();
    pair.activity = u < 0.5 ? Activity::reading : (u < 0.8 ? Activity::working
                                                           : Activity::talking);
  }

  const CategoryParams params = fit_category_params(pairs);
  CHECK(params.distance_joint == Joint::torso);
  CHECK(params.dist_mu == doctest::Approx(-0.5).epsilon(0.04));
  CHECK(params.dist_sigma == doctest::Approx(0.3).epsilon(0.04));
  CHECK(params.rel_mu == doctest::Approx(0.4).epsilon(0.06));
  CHECK(params.rel_kappa == doctest::Approx(3.0).epsilon(0.08));
  CHECK(params.ori_mu == doctest::Approx(-0.8).epsilon(0.05));
  CHECK(params.ori_kappa == doctest::Approx(6.0).epsilon(0.08));
  CHECK(params.height_mu == doctest::Approx(-0.2).epsilon(0.05));
  CHECK(params.height_sigma == doctest::Approx(0.15).epsilon(0.05));
  CHECK(params.object_activity[0] == doctest::Approx(0.5).epsilon(0.05));
  CHECK(params.object_activity[1] == doctest::Approx(0.3).epsilon(0.05));
  CHECK(params.object_activity[2] == doctest::Approx(0.2).epsilon(0.08));
  CHECK(params.object_activity[3] < 0.01);
  CHECK_NOTHROW(params.validate());

  SUBCASE("pair weights scale like repetition") {
    std::vector<TrainingPair> weighted(pairs.begin(), pairs.begin() + 40);
    weighted[0].weight = 3.0;
    std::vector<TrainingPair> expanded = weighted;
    expanded[0].weight = 1.0;
    expanded.push_back(expanded[0]);
    expanded.push_back(expanded[0]);
    const CategoryParams a = fit_category_params(weighted);
    const CategoryParams b = fit_category_params(expanded);
    CHECK(a.dist_mu == doctest::Approx(b.dist_mu).epsilon(1e-10));
    CHECK(a.rel_kappa == doctest::Approx(b.rel_kappa).epsilon(1e-6));
    CHECK(a.height_sigma == doctest::Approx(b.height_sigma).epsilon(1e-10));
    CHECK(a.object_activity[0] == doctest::Approx(b.object_activity[0]).epsilon(1e-10));
  }
}

TEST_CASE("learning alternates sampling and fitting on a small corpus") {
  std::vector<Scene> scenes = {make_office_scene(1), make_office_scene(2)};

  LearnConfig config;
  config.samples_per_scene = 10;
  config.max_outer_iters = 3;
  config.tol = 0.0;  // run every outer iteration
  config.min_pairs = 10;
  config.dp.burn_in = 20;
  config.dp.thinning = 2;
  config.dp.seed = 7;

  const LearnResult result = learn_parameters(scenes, config);
  CHECK(result.iterations == 3);
  CHECK(result.objective.size() == 3);
  CHECK(result.skipped.empty());
  CHECK(result.params.categories.size() == 5);
  CHECK_NOTHROW(result.params.validate());

  // Twenty pairs per category moved every spread off its default.
  for (const auto& [category, params] : result.params.categories) {
    CHECK(params.dist_sigma != doctest::Approx(1.0));
  }
  for (int t = 0; t < kPoseTypeCount; ++t) {
    double sum = 0.0;
    for (double v : result.params.pose_activity.rows[t]) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("the same seed reproduces the same parameters") {
    const LearnResult again = learn_parameters(scenes, config);
    CHECK(again.params.categories.at("keyboard").dist_mu ==
          result.params.categories.at("keyboard").dist_mu);
    CHECK(again.objective == result.objective);
  }

  SUBCASE("a loose tolerance stops after the second iteration") {
    LearnConfig lax = config;
    lax.tol = 1e9;
    const LearnResult early = learn_parameters(scenes, lax);
    CHECK(early.iterations == 2);
  }
}

TEST_CASE("categories below the pair threshold keep default parameters") {
  Scene scene = testsupport::simple_room(2.0, 2.0, 3.0, 0.1, "box", {0.2, 0.2, 0.2});
  scene.objects.push_back(scene.make_instance("box", {1.0, 1.0, 0.0}, 0.0));

  LearnConfig config;
  config.samples_per_scene = 10;
  config.max_outer_iters = 1;
  config.min_pairs = 15;  // 10 snapshots x 1 object falls short
  config.dp.burn_in = 10;
  config.dp.thinning = 1;

  const std::vector<Scene> scenes = {scene};
  const LearnResult sparse = learn_parameters(scenes, config);
  REQUIRE(sparse.skipped.size() == 1);
  CHECK(sparse.skipped[0].find("box") != std::string::npos);
  CHECK(sparse.params.categories.at("box").dist_mu == default_category_params().dist_mu);
  CHECK(sparse.params.categories.at("box").dist_sigma ==
        default_category_params().dist_sigma);

  SUBCASE("labeled placements count as observations") {
    Scene labeled = scene;
    labeled.labeled_placements.push_back(labeled.make_instance("box", {0.5, 0.5, 0.0}, 0.0));
    const std::vector<Scene> more = {labeled};
    const LearnResult fit = learn_parameters(more, config);
    CHECK(fit.skipped.empty());
    CHECK(fit.params.categories.at("box").dist_sigma != doctest::Approx(1.0));
  }
}

TEST_CASE("learning rejects impossible configurations") {
  const std::vector<Scene> none;
  LearnConfig config;
  CHECK_THROWS_AS(learn_parameters(none, config), TooFewScenes);

  const std::vector<Scene> one = {make_office_scene(1)};
  config.samples_per_scene = 0;
  CHECK_THROWS_AS(learn_parameters(one, config), ValidationError);
}
