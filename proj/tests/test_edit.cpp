// Copyright Contributors to the mpi-forge Project
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "mpi_forge/edit.hpp"
#include "support/oracles.hpp"

using namespace mpi_forge;
using namespace mpi_forge::testing;

namespace {

GridSpec small_spec() { return GridSpec::create({8, 6, 5}, {-2, -1.5, -1}, 0.5); }

std::int64_t count_occupied(const OccupancyGrid& g) {
  return std::count_if(g.labels().begin(), g.labels().end(), [](Label l) { return l != Label::Free; });
}

Vec3 random_point(Rng& rng, const GridSpec& s) {
  Vec3 p;
  for (int a = 0; a < 3; ++a) p[a] = uniform(rng, s.origin[a] - 0.5, s.extent_max()[a] + 0.5);
  return p;
}

EditOp random_idempotent_op(Rng& rng, const GridSpec& s) {
  Vec3 a = random_point(rng, s), b = random_point(rng, s);
  const Vec3 lo = a.cwiseMin(b), hi = a.cwiseMax(b);
  switch (uniform_int(rng, 0, 3)) {
    case 0: return FillBox{lo, hi, to_id(random_class(rng))};
    case 1: return EraseRegion{lo, hi};
    case 2: return Repaint{lo, hi, to_id(random_class(rng)), to_id(random_class(rng))};
    default: return FillCylinder{a, uniform(rng, 0.1, 2.0), lo.z(), hi.z(), to_id(random_class(rng))};
  }
}

bool center_in(const Vec3& c, const Vec3& lo, const Vec3& hi) {
  return (c.array() >= lo.array()).all() && (c.array() <= hi.array()).all();
}

}  // namespace

TEST(ApplyEditScript, EmptyScriptIsIdentity) {
  Rng rng(1);
  const auto g = random_grid(rng, small_spec(), 0.4);
  EXPECT_EQ(apply_edit_script(g, {}), g);
}

TEST(ApplyEditScript, OneVoxelBox) {
  const auto spec = small_spec();
  const OccupancyGrid g(spec);
  const Vec3 c = spec.voxel_center({3, 2, 1});
  // The box spans less than one voxel around a single center.
  const EditScript s{{FillBox{c - Vec3::Constant(0.2), c + Vec3::Constant(0.2), to_id(Label::TrafficCone)}}};
  const auto out = apply_edit_script(g, s);
  EXPECT_EQ(diff_grids(g, out).changed, 1);
  EXPECT_EQ(out.at({3, 2, 1}), Label::TrafficCone);
}

TEST(ApplyEditScript, BoxBoundsAreInclusiveOnCenters) {
  const auto spec = small_spec();
  const Vec3 lo = spec.voxel_center({1, 1, 1}), hi = spec.voxel_center({2, 3, 1});
  const auto out = apply_edit_script(OccupancyGrid(spec), {{FillBox{lo, hi, to_id(Label::Car)}}});
  EXPECT_EQ(count_occupied(out), 2 * 3 * 1);
}

TEST(ApplyEditScript, EraseWholeExtent) {
  Rng rng(2);
  const auto spec = small_spec();
  const auto g = random_grid(rng, spec, 0.5);
  const auto out = apply_edit_script(g, {{EraseRegion{spec.origin, spec.extent_max()}}});
  EXPECT_EQ(out, OccupancyGrid(spec));
  EXPECT_EQ(diff_grids(g, out).changed, count_occupied(g));
}

TEST(ApplyEditScript, InputIsNotMutated) {
  Rng rng(3);
  const auto spec = small_spec();
  auto g = random_grid(rng, spec, 0.5);
  const auto copy = g;
  EditScript s;
  for (int i = 0; i < 10; ++i) s.ops.push_back(random_idempotent_op(rng, spec));
  (void)apply_edit_script(g, s);
  EXPECT_EQ(g, copy);
}

TEST(ApplyEditScript, FillEraseAndRepaintAreIdempotent) {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const auto spec = random_spec(rng, 10);
    const auto g = random_grid(rng, spec, 0.4);
    const EditOp op = random_idempotent_op(rng, spec);
    const auto once = apply_edit_script(g, {{op}});
    EXPECT_EQ(apply_edit_script(g, {{op, op}}), once);
  }
}

TEST(ApplyEditScript, FillThenEraseLeavesRegionFree) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto spec = random_spec(rng, 10);
    const auto g = random_grid(rng, spec, 0.4);
    Vec3 a = random_point(rng, spec), b = random_point(rng, spec);
    const Vec3 lo = a.cwiseMin(b), hi = a.cwiseMax(b);
    const auto out = apply_edit_script(g, {{FillBox{lo, hi, to_id(Label::Bus)}, EraseRegion{lo, hi}}});
    for (std::int64_t k = 0; k < spec.voxel_count(); ++k) {
      const auto i = spec.unlinear_index(k);
      EXPECT_EQ(out.at(i), center_in(spec.voxel_center(i), lo, hi) ? Label::Free : g.at(i));
    }
  }
}

TEST(ApplyEditScript, CylinderMatchesBruteForceCenterTest) {
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const auto spec = random_spec(rng, 14);
    const auto g = random_grid(rng, spec, 0.2);
    const FillCylinder cyl{random_point(rng, spec), uniform(rng, 0.05, 3.0), uniform(rng, -4, 0), uniform(rng, 0, 4),
                           to_id(Label::TrafficCone)};
    const auto out = apply_edit_script(g, {{cyl}});
    for (std::int64_t k = 0; k < spec.voxel_count(); ++k) {
      const auto i = spec.unlinear_index(k);
      const Vec3 c = spec.voxel_center(i);
      const double dx = c.x() - cyl.center.x(), dy = c.y() - cyl.center.y();
      const bool in = dx * dx + dy * dy <= cyl.radius * cyl.radius && c.z() >= cyl.z_min && c.z() <= cyl.z_max;
      ASSERT_EQ(out.at(i), in ? Label::TrafficCone : g.at(i));
    }
  }
}

TEST(ApplyEditScript, TrafficConeOnBenchmarkGrid) {
  const auto spec = GridSpec::create({500, 500, 40}, {-50, -50, -5}, 0.2);
  const OccupancyGrid g(spec);
  const FillCylinder cone{{2.0, 6.0, -1.0}, 0.2, -1.0, -0.2, to_id(Label::TrafficCone)};
  const auto out = apply_edit_script(g, {{cone}});
  // Column centers at x, y = 2 +- 0.1, 6 +- 0.1 are within 0.2 of the axis;
  // layer centers -0.9, -0.7, -0.5, -0.3 lie in [-1, -0.2].
  EXPECT_EQ(count_occupied(out), 16);
  for (std::int64_t k = 0; k < spec.voxel_count(); ++k) {
    if (out.labels()[k] == Label::Free) continue;
    const Vec3 c = spec.voxel_center(spec.unlinear_index(k));
    EXPECT_NEAR(std::abs(c.x() - 2.0), 0.1, 1e-9);
    EXPECT_NEAR(std::abs(c.y() - 6.0), 0.1, 1e-9);
  }
}

TEST(ApplyEditScript, RepaintOnlyTouchesSourceClass) {
  const auto spec = small_spec();
  OccupancyGrid g(spec);
  g.set({0, 0, 0}, Label::Car);
  g.set({1, 0, 0}, Label::Bus);
  const auto out =
      apply_edit_script(g, {{Repaint{spec.origin, spec.extent_max(), to_id(Label::Car), to_id(Label::Truck)}}});
  EXPECT_EQ(out.at({0, 0, 0}), Label::Truck);
  EXPECT_EQ(out.at({1, 0, 0}), Label::Bus);
  EXPECT_EQ(diff_grids(g, out).changed, 1);
}

TEST(ApplyEditScript, CopyTranslateRoundsOffsetAndReadsSnapshot) {
  const auto spec = GridSpec::create({6, 1, 1}, {0, 0, 0}, 1.0);
  OccupancyGrid g(spec);
  for (int x = 0; x < 4; ++x) g.set({x, 0, 0}, static_cast<Label>(x + 1));
  // 1.4 m rounds to one voxel; source x centers 0.5 .. 3.5.
  const auto out = apply_edit_script(g, {{CopyTranslate{{0, 0, 0}, {4, 1, 1}, {1.4, 0, 0}}}});
  EXPECT_EQ(out.at({0, 0, 0}), Label::Barrier);
  for (int x = 1; x <= 4; ++x) EXPECT_EQ(out.at({x, 0, 0}), static_cast<Label>(x));
  EXPECT_EQ(out.at({5, 0, 0}), Label::Free);
  // Shifted off the grid: destinations outside the extent are dropped.
  const auto gone = apply_edit_script(g, {{CopyTranslate{{0, 0, 0}, {4, 1, 1}, {10, 0, 0}}}});
  EXPECT_EQ(gone, g);
}

TEST(ValidateScript, ReportsOpIndexAndField) {
  EXPECT_TRUE(validate_script({{FillBox{{0, 0, 0}, {1, 1, 1}, 4}}}).empty());

  const auto flipped = validate_script({{EraseRegion{{0, 0, 0}, {1, 1, 1}}, FillBox{{2, 0, 0}, {1, 1, 1}, 4}}});
  ASSERT_EQ(flipped.size(), 1u);
  EXPECT_EQ(flipped[0].op_index, 1u);
  EXPECT_EQ(flipped[0].field, "min");

  const auto bad_class = validate_script({{FillBox{{0, 0, 0}, {1, 1, 1}, 99}}});
  ASSERT_EQ(bad_class.size(), 1u);
  EXPECT_EQ(bad_class[0].field, "class");

  const auto cyl = validate_script({{FillCylinder{{0, 0, 0}, -1, 1, 0, 4}}});
  EXPECT_EQ(cyl.size(), 2u);
  const auto rep = validate_script({{Repaint{{0, 0, 0}, {1, 1, 1}, 17, -3}}});
  EXPECT_EQ(rep.size(), 2u);
  EXPECT_FALSE(validate_script({{CopyTranslate{{0, 0, 0}, {1, 1, 1}, {NAN, 0, 0}}}}).empty());
}

TEST(ValidateScript, ApplyRejectsBeforeTouchingVoxels) {
  const OccupancyGrid g(small_spec());
  try {
    (void)apply_edit_script(g, {{EraseRegion{{0, 0, 0}, {1, 1, 1}}, FillBox{{0, 0, 0}, {1, 1, 1}, 99}}});
    FAIL() << "expected ScriptError";
  } catch (const ScriptError& e) {
    ASSERT_EQ(e.diagnostics().size(), 1u);
    EXPECT_EQ(e.diagnostics()[0].op_index, 1u);
  }
}

TEST(DiffGrids, CountsAndLabels) {
  Rng rng(7);
  const auto spec = small_spec();
  const auto g = random_grid(rng, spec, 0.3);
  EXPECT_EQ(diff_grids(g, g).changed, 0);
  auto h = g;
  h.set({0, 0, 0}, g.at({0, 0, 0}) == Label::Car ? Label::Bus : Label::Car);
  const auto d = diff_grids(g, h);
  EXPECT_EQ(d.changed, 1);
  EXPECT_EQ(d.removed_by_label[to_id(g.at({0, 0, 0}))], 1);
  EXPECT_EQ(d.added_by_label[to_id(h.at({0, 0, 0}))], 1);
  EXPECT_THROW(diff_grids(g, OccupancyGrid(GridSpec::create({1, 1, 1}, Vec3::Zero(), 1))), ConfigError);
}
