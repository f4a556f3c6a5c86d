#include <doctest.h>

#include "helpers.hpp"

using namespace chamber;

namespace {

int count_genus(const ChamberComplex& cx, int genus)
{
  int n = 0;
  for (const auto& c : cx.components)
    n += c.genus == genus;
  return n;
}

}  // namespace

TEST_CASE("surgery along no disks changes nothing")
{
  const auto cx = testing_support::closed_scene(2);
  const auto raw = surger(cx, {});
  CHECK(raw.complex == cx);
  CHECK(raw.scars.empty());
  CHECK(raw.raw_remnants(ChamberId{0}).size() == 1);
  CHECK(raw.raw_remnants(ChamberId{1}).size() == 1);
}

TEST_CASE("a separating disk on a genus-2 surface leaves two tori")
{
  SceneBuilder b;
  const auto outside = b.chamber(), inside = b.chamber();
  const auto s = b.surface(SurfaceShape{1, 0, 0, {1}}, outside, inside);
  const auto d = b.disk(inside, s, s.separating.front(), {s.side_pieces.front()});
  const auto flagged = b.build();
  const auto raw = surger(flagged.complex, {d});
  CHECK(raw.complex.components.size() == 2);
  CHECK(count_genus(raw.complex, 1) == 2);
  CHECK(raw.complex.chambers.size() == 3);
  CHECK(raw.raw_remnants(inside).size() == 2);
  CHECK(raw.raw_remnants(outside).size() == 1);
  CHECK(raw.complex.total_euler_characteristic() == flagged.complex.total_euler_characteristic() + 2);
  REQUIRE(raw.scars.size() == 1);
  CHECK(raw.scars.front().host_a != raw.scars.front().host_b);
  CHECK_FALSE(oracle::check_euler(flagged.complex, {d}, raw).has_value());
}

TEST_CASE("a meridian disk in a solid torus leaves a sphere around a ball")
{
  SceneBuilder b;
  const auto outside = b.chamber();
  const auto inside = b.chamber(Flag::Occupied, solid_torus_annotation());
  const auto t = b.torus(outside, inside);
  const auto d = b.disk(inside, t, t.loops.front());
  const auto flagged = b.build();
  const auto raw = surger(flagged.complex, {d});
  REQUIRE(raw.complex.components.size() == 1);
  CHECK(raw.complex.components.front().genus == 0);
  const auto remnants = raw.raw_remnants(inside);
  REQUIRE(remnants.size() == 1);
  CHECK(chamber_is_disky(raw, remnants.front()));
  CHECK(effective_annotation(raw.complex, remnants.front()).is_ball == Tri::Yes);
  // The slab between the two scars joins the far side, so the scars are internal there.
  const auto far = raw.raw_remnants(outside).front();
  CHECK(raw.scars.front().handle_chamber == far);
  CHECK(classify_scar(raw, far, raw.scars.front()) == ScarSide::Internal);
  CHECK(classify_scar(raw, remnants.front(), raw.scars.front()) == ScarSide::External);
  CHECK_FALSE(chamber_is_disky(raw, far));
}

TEST_CASE("diskiness")
{
  SUBCASE("a chamber meeting no surface in its interior is disky")
  {
    SceneBuilder b;
    const auto outside = b.chamber(), inside = b.chamber();
    b.torus(outside, inside);
    const auto raw = surger(b.build().complex, {});
    CHECK(chamber_is_disky(raw, inside));
    CHECK(chamber_is_disky(raw, outside));
  }
  SUBCASE("both sides of a compressed sphere from a torus")
  {
    SceneBuilder b;
    const auto outside = b.chamber(), inside = b.chamber();
    const auto t = b.torus(outside, inside);
    const auto d = b.disk(outside, t, t.loops.front());
    const auto raw = surger(b.build().complex, {d});
    // The disk sits outside, so the sphere bounds a disky region on that side only.
    const auto out = raw.raw_remnants(outside);
    REQUIRE(out.size() == 1);
    CHECK(chamber_is_disky(raw, out.front()));
    CHECK_FALSE(chamber_is_disky(raw, raw.raw_remnants(inside).front()));
    CHECK_FALSE(oracle::check_disky(raw).has_value());
  }
  SUBCASE("a separating disk leaves disky remnants on its side and an annulus on the other")
  {
    SceneBuilder b;
    const auto outside = b.chamber(), inside = b.chamber();
    const auto s = b.surface(SurfaceShape{1, 0, 0, {1}}, outside, inside);
    const auto d = b.disk(inside, s, s.separating.front(), {s.side_pieces.front()});
    const auto raw = surger(b.build().complex, {d});
    for (auto c : raw.raw_remnants(inside))
      CHECK(chamber_is_disky(raw, c));
    CHECK_FALSE(chamber_is_disky(raw, raw.raw_remnants(outside).front()));
    CHECK_FALSE(oracle::check_disky(raw).has_value());
  }
}

TEST_CASE("goneball candidates are the disky balls cut off by spheres")
{
  SceneBuilder b;
  const auto outside = b.chamber();
  const auto inside = b.chamber(Flag::Occupied, solid_torus_annotation());
  const auto t = b.torus(outside, inside);
  const auto d = b.disk(inside, t, t.loops.front());
  const auto raw = surger(b.build().complex, {d});
  const auto cands = goneball_candidates(raw);
  REQUIRE(cands.chambers.size() == 1);
  CHECK(cands.chambers.front() == raw.raw_remnants(inside).front());
  const auto pruned = prune(raw, cands.chambers);
  CHECK(pruned.complex.components.empty());
  CHECK(pruned.complex.chambers.size() == 1);
  CHECK(pruned.gone.size() == 1);
}

TEST_CASE("random surgeries keep the Euler count and diskiness")
{
  for (std::size_t i = 0; i < 300; ++i) {
    auto rng = instance_rng(21, i);
    const auto cx = random_complex(rng, FuzzBounds{4, 3, 4, 1}, AmbientMode::Sphere, true);
    const auto disks = random_disk_set(cx, rng, 4);
    const auto raw = surger(cx, disks);
    CHECK(raw.complex.total_euler_characteristic() ==
          cx.total_euler_characteristic() + 2 * static_cast<int>(disks.size()));
    const auto euler = oracle::check_euler(cx, disks, raw);
    CHECK_MESSAGE(!euler.has_value(), euler.value_or(""));
    const auto disky = oracle::check_disky(raw);
    CHECK_MESSAGE(!disky.has_value(), disky.value_or(""));
    CHECK(validate_complex(raw.complex).ok());
  }
}
