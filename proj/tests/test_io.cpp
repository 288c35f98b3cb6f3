#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "ipp/io.hpp"
#include "ipp/synth.hpp"

using namespace ipp;

TEST_CASE("csv parse: well-formed input") {
  std::istringstream in(
      "id,x,y,value\n"
      "0,0.5,1.5,3.25\n"
      "1,2.0,0.0,-1.0\n"
      "2,4.0,1.0,0.125\n");
  const Dataset ds = parse_csv(in, "test");
  CHECK(ds.rows.size() == 3);
  CHECK(ds.value_columns == 1);
  CHECK(ds.rows[1].x == 2.0);
  CHECK(ds.rows[2].values[0] == 0.125);
}

TEST_CASE("csv parse errors name the line") {
  std::istringstream bad_number(
      "id,x,y,value\n"
      "0,0.5,1.5,1.0\n"
      "1,oops,0.0,2.0\n");
  CHECK_THROWS_WITH_AS(parse_csv(bad_number, "f"),
                       doctest::Contains("line 3"), IoError);

  std::istringstream dup(
      "id,x,y,value\n"
      "0,0.5,1.5,1.0\n"
      "0,1.0,0.0,2.0\n");
  CHECK_THROWS_WITH_AS(parse_csv(dup, "f"), doctest::Contains("duplicate"),
                       IoError);

  std::istringstream bad_header("id,x,value\n0,0.5,1.5\n");
  CHECK_THROWS_AS(parse_csv(bad_header, "f"), IoError);
}

TEST_CASE("csv round trip preserves the dataset exactly") {
  const Dataset ds = gen_synth(berkeley_preset(3));
  std::ostringstream out;
  write_csv(ds, out);
  std::istringstream in(out.str());
  const Dataset back = parse_csv(in, "roundtrip");
  CHECK(back == ds);
}

TEST_CASE("synthetic generation is deterministic and preset-shaped") {
  const Dataset a = gen_synth(lake_preset(11));
  const Dataset b = gen_synth(lake_preset(11));
  CHECK(a == b);
  CHECK(a.rows.size() == 218);

  const Dataset berkeley = gen_synth(berkeley_preset(11));
  CHECK(berkeley.rows.size() == 52);
  double max_x = 0.0, max_y = 0.0;
  for (const auto& row : berkeley.rows) {
    max_x = std::max(max_x, row.x);
    max_y = std::max(max_y, row.y);
  }
  CHECK(max_x <= 45.0);
  CHECK(max_y <= 40.0);

  const Dataset precip = gen_synth(precip_preset(11));
  CHECK(precip.rows.size() == 167);
}

TEST_CASE("sampled values have a sane variance") {
  const SynthSpec spec = lake_preset(19);
  const Dataset ds = gen_synth(spec);
  const double expected =
      spec.kernel.signal_variance + spec.kernel.noise_variance;
  double mean = 0.0;
  for (const auto& row : ds.rows) mean += row.values[0];
  mean /= static_cast<double>(ds.rows.size());
  double var = 0.0;
  for (const auto& row : ds.rows) {
    var += (row.values[0] - mean) * (row.values[0] - mean);
  }
  var /= static_cast<double>(ds.rows.size() - 1);
  CHECK(var <= 3.0 * expected);
  CHECK(var >= expected / 3.0);
}

TEST_CASE("build_model subtracts the training mean and fits on a grid") {
  Dataset ds = gen_synth(berkeley_preset(5));
  const ModelBuild mb = build_model(ds, 0, std::nullopt);
  double mean = 0.0;
  for (const auto& row : ds.rows) mean += row.values[0];
  mean /= static_cast<double>(ds.rows.size());
  CHECK(mb.train_mean == doctest::Approx(mean));
  CHECK(mb.model->size() == ds.rows.size());

  const SEKernelParams explicit_params{2.0, 12.0, 0.1};
  const ModelBuild fixed = build_model(ds, 0, explicit_params);
  CHECK(fixed.params.lengthscale == 12.0);
}

TEST_CASE("eval_rmse edge cases") {
  const Dataset ds = gen_synth(berkeley_preset(6));
  const ModelBuild mb = build_model(ds, 0, SEKernelParams{4.0, 9.0, 0.1});

  std::vector<LocationId> all;
  for (const auto& row : ds.rows) all.push_back(row.id);

  SUBCASE("observing everything gives zero error") {
    CHECK(eval_rmse(ds, 1, IdSet(all), mb) == 0.0);
  }

  SUBCASE("observing nothing scores the prior mean") {
    const double rmse = eval_rmse(ds, 1, {}, mb);
    double expect = 0.0;
    for (const auto& row : ds.rows) {
      const double err = mb.train_mean - row.values[1];
      expect += err * err;
    }
    expect = std::sqrt(expect / static_cast<double>(ds.rows.size()));
    CHECK(rmse == doctest::Approx(expect).epsilon(1e-12));
  }

  SUBCASE("observations reduce the error on held-out data") {
    IdSet some(std::vector<LocationId>(all.begin(), all.begin() + 20));
    const double with_obs = eval_rmse(ds, 1, some, mb);
    const double without = eval_rmse(ds, 1, {}, mb);
    CHECK(with_obs <= without + 1e-9);
  }

  SUBCASE("missing column") {
    CHECK_THROWS_AS(eval_rmse(ds, 5, {}, mb), IoError);
  }
}

TEST_CASE("plan report round trip") {
  PlanReport report;
  report.algorithm = "esip";
  report.seed = 42;
  report.config_hash = config_hash("algo=esip;budget=50");
  ReportRobot robot;
  robot.query = {0, 7, 50.0};
  robot.path = {0, 3, 5, 7};
  robot.coordinates = {{0, 0}, {1, 2}, {3, 4}, {5, 6}};
  robot.travel_cost = 12.5;
  robot.sensing_cost = 21.0;
  robot.reward = 3.75;
  robot.iterations.push_back({2, 4.0, 46.0, true, 3.5, 30.0, 3});
  report.robots.push_back(robot);
  report.joint_reward = 3.75;
  report.trace_nodes = 100;
  report.trace_pruned = 40;
  report.wall_time_seconds = 0.25;

  std::ostringstream out;
  write_report(report, out);
  const std::string text = out.str();
  CHECK(text.find("### MACHINE") != std::string::npos);

  std::istringstream in(text);
  const PlanReport back = parse_report(in);
  CHECK(back.algorithm == "esip");
  CHECK(back.seed == 42);
  CHECK(back.robots.size() == 1);
  CHECK(back.robots[0].path == robot.path);
  CHECK(back.robots[0].reward == robot.reward);
  CHECK(back.joint_reward == report.joint_reward);
  CHECK(back.trace_pruned == 40);
}

TEST_CASE("curves: header plus one row per entry") {
  std::ostringstream out;
  emit_curves({}, out);
  CHECK(out.str() == "algorithm,budget,metric,value\n");

  std::ostringstream out2;
  emit_curves({{"esip", 50.0, "reward", 1.5}, {"esip", 60.0, "reward", 1.75}},
              out2);
  CHECK(std::count(out2.str().begin(), out2.str().end(), '\n') == 3);
}

TEST_CASE("config hash is stable and input-sensitive") {
  CHECK(config_hash("a") == config_hash("a"));
  CHECK(config_hash("a") != config_hash("b"));
  CHECK(config_hash("algo=esip").size() == 16);
}
