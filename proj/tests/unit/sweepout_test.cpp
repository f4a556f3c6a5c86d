#include <doctest.h>

#include "helpers.hpp"

using namespace chamber;

namespace {

LevelProfile torus_profile()
{
  LevelProfile p;
  p.events = {LevelEvent{100'000, EventKind::Birth, DigitEffect::None, {}},
              LevelEvent{300'000, EventKind::Saddle, DigitEffect::Below, {}},
              LevelEvent{700'000, EventKind::Saddle, DigitEffect::Above, {}},
              LevelEvent{900'000, EventKind::Death, DigitEffect::None, {}}};
  return p;
}

LevelProfile random_profile(std::mt19937_64& rng)
{
  std::uniform_int_distribution<std::int64_t> level(1, kLevelScale - 1);
  std::set<std::int64_t> levels;
  const int n = std::uniform_int_distribution<int>(2, 8)(rng);
  while (static_cast<int>(levels.size()) < n)
    levels.insert(level(rng));
  std::vector<std::int64_t> sorted(levels.begin(), levels.end());
  std::vector<std::size_t> idx(sorted.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  LevelProfile p;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    LevelEvent e{sorted[i], EventKind::Birth, DigitEffect::None, {}};
    if (i == idx[0] || i == idx[1]) {
      e.kind = EventKind::Saddle;
      e.effect = i == idx[0] ? DigitEffect::Above : DigitEffect::Below;
    }
    p.events.push_back(e);
  }
  return p;
}

// Label just above level `s` by replaying events up to it.
Label replay(const LevelProfile& p, std::int64_t s)
{
  Label l{true, false};
  for (const auto& e : p.events)
    if (e.s <= s) {
      if (e.effect == DigitEffect::Above)
        l.above = false;
      if (e.effect == DigitEffect::Below)
        l.below = true;
    }
  return l;
}

Graphic stacked_graphic(int columns)
{
  Graphic g;
  for (int c = 0; c < columns; ++c)
    g.regions.push_back({Label{true, false}, Label{true, true}, Label{false, true}});
  return g;
}

}  // namespace

TEST_CASE("labels at the ends of the sweep")
{
  const auto p = torus_profile();
  CHECK(label_at(p, kLevelScale - 1).str() == "01");
  CHECK(label_at(p, 1).str() == "10");
  CHECK(label_at(p, 500'000).str() == "11");
  CHECK_THROWS_AS(label_at(p, 300'000), InputError);
}

TEST_CASE("a torus profile is balanced between its two essential saddles")
{
  const auto levels = balanced_levels(torus_profile());
  REQUIRE(levels.size() == 1);
  CHECK(levels.front().lo == 300'000);
  CHECK(levels.front().hi == 700'000);
  CHECK(levels.front().label.str() == "11");
}

TEST_CASE("profiles that flip a digit twice are rejected")
{
  auto p = torus_profile();
  p.events[2].effect = DigitEffect::Below;
  CHECK(validate_profile(p).has("profile-monotonicity"));
  CHECK_THROWS_AS(balanced_levels(p), InputError);
}

TEST_CASE("random profiles agree with a replay of their events")
{
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto p = random_profile(rng);
    REQUIRE(validate_profile(p).ok());
    const auto levels = balanced_levels(p);
    CHECK_FALSE(levels.empty());
    std::vector<std::int64_t> cuts{0};
    for (const auto& e : p.events)
      cuts.push_back(e.s);
    cuts.push_back(kLevelScale);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      if (cuts[i + 1] - cuts[i] < 2)
        continue;
      const auto mid = cuts[i] + (cuts[i + 1] - cuts[i]) / 2;
      const auto truth = replay(p, mid);
      CHECK(label_at(p, mid) == truth);
      const bool listed = std::any_of(levels.begin(), levels.end(),
                                      [&](const LevelInterval& iv) { return iv.lo < mid && mid < iv.hi; });
      CHECK(listed == truth.balanced());
    }
  }
}

TEST_CASE("guided runs from balanced levels certify")
{
  for (std::size_t i = 0; i < 100; ++i) {
    auto rng = instance_rng(31, i);
    const auto inst = random_guided_instance(rng, FuzzBounds{3, 3, 3, 4});
    REQUIRE(validate_guide(inst.start.complex, inst.guide).ok());
    CHECK(guide_label(inst.start.complex, inst.guide).balanced());
    CHECK_FALSE(balanced_levels(inst.profile).empty());
    if (is_tiny(inst.start) != TinyVerdict::NotTiny)
      continue;
    const auto run = guided_run(inst.start, inst.profile, inst.guide.level, inst.guide);
    CHECK(run.status == RunStatus::Complete);
    CHECK_FALSE(run.certificates.empty());
    for (const auto& l : run.labels)
      CHECK(l == run.labels.front());
  }
}

TEST_CASE("a birth or death tangency is always equivalent")
{
  auto rng = instance_rng(2, 0);
  const auto inst = random_guided_instance(rng, FuzzBounds{2, 2, 2, 4});
  const auto rep = classify_saddle(inst.start, Transition{TangencyKind::MaxMin, inst.guide, inst.guide});
  CHECK(rep.verdict == SaddleVerdict::Equivalent);
}

TEST_CASE("vertex shapes")
{
  SUBCASE("the engine's quadrants match the block count")
  {
    for (auto shape : kVertexShapes)
      for (const auto& c : enumerate_vertex_configs(shape, 1)) {
        const auto rep = classify_vertex(c);
        const auto truth = oracle::quadrants(c);
        for (int q = 0; q < 4; ++q) {
          CHECK(rep.labels[q] == truth.labels[q]);
          CHECK(rep.circles[q] == truth.circles[q]);
        }
      }
  }
  SUBCASE("only the crossed shape has both side quadrants non-planar balanced with the others unbalanced")
  {
    for (auto shape : kVertexShapes) {
      int hits = 0;
      for (const auto& c : enumerate_vertex_configs(shape, 1)) {
        const auto rep = classify_vertex(c);
        const auto& l = rep.labels;
        hits += l[1].str() == "11" && l[2].str() == "11" && !l[0].balanced() && !l[3].balanced();
      }
      CHECK_MESSAGE((hits > 0) == (shape == VertexShape::Crossed), shape_name(shape));
    }
  }
  SUBCASE("a three-circle resolution rules out two non-planar balanced side quadrants between unbalanced ones")
  {
    for (auto shape : kVertexShapes) {
      const bool three = resolution_circles(shape, true, true) == 3 || resolution_circles(shape, true, false) == 3 ||
                         resolution_circles(shape, false, true) == 3 || resolution_circles(shape, false, false) == 3;
      if (!three)
        continue;
      for (const auto& c : enumerate_vertex_configs(shape, 1)) {
        const auto rep = classify_vertex(c);
        const auto& l = rep.labels;
        CHECK_FALSE((l[1].str() == "11" && l[2].str() == "11" && !l[0].balanced() && !l[3].balanced()));
      }
    }
  }
  SUBCASE("names round-trip")
  {
    for (auto shape : kVertexShapes)
      CHECK(parse_shape(shape_name(shape)) == shape);
    CHECK_FALSE(parse_shape("triangle").has_value());
  }
}

TEST_CASE("balanced bands")
{
  SUBCASE("identical columns give one straight band")
  {
    const auto g = stacked_graphic(5);
    REQUIRE(validate_graphic(g).ok());
    const auto rep = balanced_band(g);
    CHECK(rep.band.size() == 5);
    CHECK(rep.column_intervals);
    CHECK(rep.connected);
    CHECK(rep.path.size() == 5);
  }
  SUBCASE("an annulus of identical columns has an essential loop")
  {
    auto g = stacked_graphic(4);
    g.annulus = true;
    CHECK(balanced_band(g).essential_loop);
  }
  SUBCASE("a column skipping a digit is rejected")
  {
    auto g = stacked_graphic(2);
    g.regions[1] = {Label{true, false}, Label{false, true}, Label{false, true}};
    CHECK(validate_graphic(g).has("graphic-jump"));
  }
  SUBCASE("random graphics agree with the column scan")
  {
    for (std::size_t i = 0; i < 500; ++i) {
      auto rng = instance_rng(8, i);
      const bool annulus = i % 2 == 1;
      const auto g = random_graphic(rng, 12, 12, annulus);
      REQUIRE(validate_graphic(g).ok());
      const auto rep = balanced_band(g);
      const auto truth = oracle::band(g);
      CHECK(rep.column_intervals == truth.column_intervals);
      CHECK(rep.connected == truth.connected);
      CHECK(truth.column_intervals);
      CHECK(truth.connected);
      if (annulus)
        CHECK(rep.essential_loop);
    }
  }
}
