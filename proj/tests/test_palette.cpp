#include <doctest.h>

#include <cstdlib>
#include <set>

#include "ggi/error.hpp"
#include "ggi/palette.hpp"

using namespace ggi;

TEST_CASE("stitch colors are injective over the id range and never background") {
  std::set<uint32_t> seen;
  for (int id = 0; id < 255; ++id) {
    const Rgb8 c = stitch_color(id);
    CHECK(c != kBackground);
    CHECK(seen.insert(c.packed()).second);
  }
}

TEST_CASE("stitch color reverse lookup inverts the palette") {
  for (int id = 0; id < 255; ++id) {
    const auto back = stitch_id_of_color(stitch_color(id));
    REQUIRE(back.has_value());
    CHECK(*back == id);
  }
  CHECK_FALSE(stitch_id_of_color(kBackground).has_value());
  CHECK_FALSE(stitch_id_of_color({1, 2, 3}).has_value());
}

TEST_CASE("consecutive stitch ids receive distant hues") {
  // The stride ordering should separate neighbors by far more than one
  // wheel step; compare raw channel distance as a cheap proxy.
  const Rgb8 a = stitch_color(0);
  const Rgb8 b = stitch_color(1);
  const int d = std::abs(int(a.r) - b.r) + std::abs(int(a.g) - b.g) + std::abs(int(a.b) - b.b);
  CHECK(d > 64);
}

TEST_CASE("known panel types use the fixed table") {
  CHECK(panel_type_known("torso_front"));
  CHECK(panel_type_known("skirt_back"));
  CHECK(panel_type_known("panel"));
  CHECK_FALSE(panel_type_known("warp_drive_cover"));
  // Table colors are stable and distinct for a few core types.
  const Rgb8 a = panel_type_color("torso_front", true);
  const Rgb8 b = panel_type_color("torso_back", true);
  CHECK(a != b);
  CHECK(a != kBackground);
  CHECK(panel_type_color("torso_front", false) == a);
}

TEST_CASE("unknown panel types: strict throws, lax hashes deterministically") {
  try {
    panel_type_color("warp_drive_cover", true);
    FAIL("expected UnknownPanelType");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnknownPanelType);
  }
  const Rgb8 c1 = panel_type_color("warp_drive_cover", false);
  const Rgb8 c2 = panel_type_color("warp_drive_cover", false);
  CHECK(c1 == c2);
  CHECK(c1 != kBackground);
}

TEST_CASE("palette hashes are stable within a build") {
  CHECK(panel_palette_hash() == panel_palette_hash());
  CHECK(stitch_palette_hash() == stitch_palette_hash());
  CHECK(panel_palette_hash() != stitch_palette_hash());
  CHECK(panel_palette_hash() != 0);
}
