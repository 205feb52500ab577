// Copyright Contributors to the mpi-forge Project
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>

#include "mpi_forge/cli.hpp"
#include "mpi_forge/io.hpp"

using namespace mpi_forge;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "mpi-forge");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  ::testing::internal::CaptureStderr();
  ::testing::internal::CaptureStdout();
  const int code = cli::run(static_cast<int>(argv.size()), argv.data());
  (void)::testing::internal::GetCapturedStdout();
  return {code, ::testing::internal::GetCapturedStderr()};
}

class CliTest : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("mpi_forge_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    write_file(path("recipe.json"), R"({"grid": {"dims": [60, 60, 16], "origin": [-12, -12, -3], "resolution": 0.4},
      "placement_radius": 10,
      "objects": [{"class": 4, "count": 4, "shape": "box", "min_size": [3, 1.6, 1.4], "max_size": [4, 2, 1.8]},
                  {"class": 7, "count": 4, "shape": "cylinder", "min_size": [0.5, 0.5, 1.6], "max_size": [0.6, 0.6, 1.9]}],
      "rig": {"width": 160, "height": 90, "focal": 126, "mount_height": 0}})");
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void synth_and_build(const std::string& threads = "1") {
    ASSERT_EQ(run({"synth", "--seed", "3", "--recipe", path("recipe.json"), "--out", path("scene.occ")}).code, 0);
    ASSERT_EQ(run({"--threads", threads, "build", "--grid", path("scene.occ"), "--rig", path("scene.rig.json"),
                   "--planes", "16", "--dmax", "12", "--size", "80x45", "--out", path("scene.mpit")})
                  .code,
              0);
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, PipelineProducesDecodableArtifacts) {
  synth_and_build();
  const auto stack = decode_stack(read_file(path("scene.mpit")));
  EXPECT_EQ(stack.views(), 6);
  EXPECT_EQ(stack.config().planes, 16);
  EXPECT_EQ(stack.config().width, 80);
  EXPECT_EQ(stack.config().height, 45);
  ASSERT_TRUE(stack.grid_spec().has_value());

  EXPECT_EQ(run({"composite", "--stack", path("scene.mpit"), "--view", "0", "--semantic", path("sem.ppm"), "--depth",
                 path("depth.pgm")})
                .code,
            0);
  EXPECT_EQ(read_file(path("sem.ppm")).substr(0, 10), "P6\n80 45\n2");
  EXPECT_EQ(read_file(path("depth.pgm")).size(), std::string("P5\n80 45\n255\n").size() + 80 * 45);

  EXPECT_EQ(run({"weights", "--stack", path("scene.mpit"), "--step", "100", "--total-steps", "400", "--downsample",
                 "5", "--out", path("w.wmap")})
                .code,
            0);
  const auto w = decode_weight_map(read_file(path("w.wmap")));
  EXPECT_EQ(w.values.rows(), 9);
  EXPECT_EQ(w.values.cols(), 16);
  EXPECT_EQ(w.step_fraction, 0.25);

  EXPECT_EQ(run({"stats", "--stack", path("scene.mpit"), "--out", path("stats.json")}).code, 0);
  EXPECT_NE(read_file(path("stats.json")).find("\"fill_rate\""), std::string::npos);
}

TEST_F(CliTest, EditAndCbgs) {
  ASSERT_EQ(run({"synth", "--seed", "1", "--recipe", path("recipe.json"), "--out", path("a.occ")}).code, 0);
  ASSERT_EQ(run({"synth", "--seed", "2", "--recipe", path("recipe.json"), "--out", path("b.occ")}).code, 0);
  write_file(path("cone.json"), R"({"ops": [{"type": "fill_cylinder", "center": [2, 6, 0], "radius": 0.4,
      "z_min": -1, "z_max": 0, "class": 8}]})");
  ASSERT_EQ(run({"edit", "--grid", path("a.occ"), "--script", path("cone.json"), "--out", path("c.occ"), "--report",
                 path("diff.json")})
                .code,
            0);
  EXPECT_NE(read_file(path("diff.json")).find("\"changed\""), std::string::npos);

  write_file(path("index.json"),
             R"({"frames": [{"id": "a", "grid": "a.occ"}, {"id": "b", "grid": "b.occ"}, {"id": "c", "grid": "c.occ"}]})");
  ASSERT_EQ(run({"cbgs", "--index", path("index.json"), "--target-len", "30", "--seed", "4", "--out",
                 path("plan.json"), "--report", path("balance.json")})
                .code,
            0);
  const auto plan = decode_plan(read_file(path("plan.json")));
  EXPECT_EQ(plan.seed, 4u);
  EXPECT_GE(plan.entries.size(), 30u);
  EXPECT_NE(read_file(path("balance.json")).find("traffic cone"), std::string::npos);
}

TEST_F(CliTest, ExitCodes) {
  // Missing required flag: validation error with usage text.
  const auto missing = run({"build", "--grid", path("x.occ")});
  EXPECT_EQ(missing.code, 1);
  EXPECT_NE(missing.err.find("--rig"), std::string::npos);
  EXPECT_NE(missing.err.find("Usage"), std::string::npos);
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"build", "--threads", "0"}).code, 1);

  // Unreadable and malformed inputs.
  EXPECT_EQ(run({"stats", "--grid", path("nope.occ"), "--out", path("s.json")}).code, 2);
  write_file(path("junk.occ"), "OCCV1");
  const auto junk = run({"stats", "--grid", path("junk.occ"), "--out", path("s.json")});
  EXPECT_EQ(junk.code, 2);
  EXPECT_NE(junk.err.find("truncated"), std::string::npos);
  EXPECT_EQ(run({"--config", path("missing.json"), "gradcheck"}).code, 2);

  // Semantic problems.
  ASSERT_EQ(run({"synth", "--seed", "1", "--recipe", path("recipe.json"), "--out", path("a.occ")}).code, 0);
  write_file(path("bad.json"), R"({"ops": [{"type": "fill_box", "min": [1, 0, 0], "max": [0, 1, 1], "class": 40}]})");
  const auto bad = run({"edit", "--grid", path("a.occ"), "--script", path("bad.json"), "--out", path("b.occ")});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("op 0"), std::string::npos) << bad.err;
  EXPECT_FALSE(fs::exists(path("b.occ")));
  EXPECT_EQ(run({"stats", "--grid", path("a.occ"), "--stack", path("a.occ"), "--out", path("s.json")}).code, 1);

  // Gradient checks pass at the default tolerance and fail at an impossible one.
  EXPECT_EQ(run({"gradcheck", "--cases", "3"}).code, 0);
  EXPECT_EQ(run({"gradcheck", "--cases", "3", "--tol", "1e-30"}).code, 3);
}

TEST_F(CliTest, ConfigFileFillsOptionsAndFlagsWin) {
  ASSERT_EQ(run({"synth", "--seed", "1", "--recipe", path("recipe.json"), "--out", path("a.occ")}).code, 0);
  write_file(path("cfg.json"), R"({"threads": 2, "build": {"planes": 8, "size": "40x20", "dmax": 9}})");
  ASSERT_EQ(run({"--config", path("cfg.json"), "build", "--grid", path("a.occ"), "--rig", path("a.rig.json"), "--out",
                 path("cfg.mpit")})
                .code,
            0);
  const auto from_cfg = decode_stack(read_file(path("cfg.mpit")));
  EXPECT_EQ(from_cfg.config().planes, 8);
  EXPECT_EQ(from_cfg.config().width, 40);
  EXPECT_EQ(from_cfg.config().d_max, 9.0);

  ASSERT_EQ(run({"--config", path("cfg.json"), "build", "--grid", path("a.occ"), "--rig", path("a.rig.json"),
                 "--planes", "12", "--out", path("flag.mpit")})
                .code,
            0);
  const auto flagged = decode_stack(read_file(path("flag.mpit")));
  EXPECT_EQ(flagged.config().planes, 12);
  EXPECT_EQ(flagged.config().width, 40);
}

TEST_F(CliTest, ThreadCountDoesNotChangeBytes) {
  synth_and_build("1");
  fs::rename(path("scene.mpit"), path("one.mpit"));
  synth_and_build("8");
  EXPECT_EQ(read_file(path("one.mpit")), read_file(path("scene.mpit")));
  for (const std::string t : {"1", "8"}) {
    ASSERT_EQ(run({"--threads", t, "composite", "--stack", path("scene.mpit"), "--view", "2", "--semantic",
                   path("sem" + t + ".ppm"), "--depth", path("depth" + t + ".pgm")})
                  .code,
              0);
    ASSERT_EQ(run({"--threads", t, "weights", "--stack", path("scene.mpit"), "--view", "2", "--step", "7",
                   "--total-steps", "10", "--out", path("w" + t + ".wmap")})
                  .code,
              0);
  }
  EXPECT_EQ(read_file(path("sem1.ppm")), read_file(path("sem8.ppm")));
  EXPECT_EQ(read_file(path("depth1.pgm")), read_file(path("depth8.pgm")));
  EXPECT_EQ(read_file(path("w1.wmap")), read_file(path("w8.wmap")));
}
