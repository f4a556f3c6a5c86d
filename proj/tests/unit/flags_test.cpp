#include <doctest.h>

#include "helpers.hpp"

using namespace chamber;

namespace {

// Some chamber whose every other chamber is a known handlebody flagged empty.
bool tiny_by_search(const FlaggedComplex& f)
{
  const auto& cx = f.complex;
  if (cx.components.empty())
    return true;
  for (const auto& c : cx.chambers) {
    bool all = true;
    for (const auto& o : cx.chambers) {
      if (o.id == c.id)
        continue;
      all = all && f.flag(o.id) == Flag::Empty && effective_annotation(cx, o.id).is_handlebody == Tri::Yes;
    }
    if (all)
      return true;
  }
  return false;
}

RemnantView remnant(int id, bool disky, bool handlebody, bool ball, std::optional<Flag> flag, bool gone = false)
{
  RemnantView v;
  v.id = ChamberId{id};
  v.disky = disky;
  v.handlebody = handlebody || ball;
  v.ball = ball;
  v.known_nonball = !ball && handlebody;
  v.flag = gone ? std::nullopt : flag;
  v.gone = gone;
  return v;
}

// Every combination of remnant states used by the exhaustive split checks.
std::vector<RemnantView> remnant_states(int id)
{
  std::vector<RemnantView> out;
  for (int kind = 0; kind < 4; ++kind)  // other, handlebody, ball, unknown-ball handlebody
    for (bool disky : {false, true})
      for (int f = 0; f < 3; ++f) {
        RemnantView v;
        v.id = ChamberId{id};
        v.disky = disky;
        v.handlebody = kind != 0;
        v.ball = kind == 2;
        v.known_nonball = kind == 1 || kind == 0;
        if (f == 2) {
          if (!(v.ball && v.disky))
            continue;
          v.gone = true;
        } else {
          v.flag = f == 0 ? Flag::Empty : Flag::Occupied;
        }
        out.push_back(v);
      }
  return out;
}

}  // namespace

TEST_CASE("no surgery and unchanged flags are consistent")
{
  SceneBuilder b;
  const auto outside = b.chamber(), inside = b.chamber(Flag::Empty, handlebody_annotation());
  b.surface(SurfaceShape{2, 0, 0, {}}, outside, inside);
  const auto f = b.build();
  const auto raw = surger(f.complex, {});
  CHECK(check_succession(f, raw, f).ok());
  const auto d = decompose(f, {});
  CHECK(d.result == f);
}

TEST_CASE("an empty ball breaks the ball rule")
{
  SplitView v;
  v.old = ChamberId{0};
  v.remnants = {remnant(1, true, true, true, Flag::Empty), remnant(2, false, false, false, Flag::Occupied)};
  const auto r = check_split(v);
  CHECK_FALSE(r.rule_ok(2));
  CHECK_FALSE(oracle::six_rules(v).rules[1]);
}

TEST_CASE("a remnant that is not a disky handlebody must be occupied")
{
  SplitView v;
  v.old = ChamberId{0};
  v.remnants = {remnant(1, false, true, false, Flag::Empty), remnant(2, true, true, false, Flag::Occupied)};
  CHECK_FALSE(check_split(v).rule_ok(1));
  v.remnants[0].flag = Flag::Occupied;
  CHECK(check_split(v).rule_ok(1));
}

TEST_CASE("all remnants disky balls leave exactly one occupied survivor")
{
  SplitView v;
  v.old = ChamberId{0};
  v.stabilized = true;
  v.remnants = {remnant(1, true, true, true, Flag::Occupied), remnant(2, true, true, true, Flag::Occupied)};
  CHECK_FALSE(check_split(v).rule_ok(6));
  v.remnants[1] = remnant(2, true, true, true, std::nullopt, true);
  CHECK(check_split(v).ok());
  const auto choice = default_split_choice(v);
  CHECK(choice.gone.size() == 1);
  CHECK(choice.flags.size() == 1);
}

TEST_CASE("exhaustive splits of up to two remnants agree with the literal rules")
{
  int checked = 0;
  for (bool stabilized : {false, true})
    for (Flag old_flag : {Flag::Empty, Flag::Occupied})
      for (const auto& a : remnant_states(1)) {
        SplitView one{ChamberId{0}, old_flag, stabilized, {a}};
        const auto o1 = oracle::six_rules(one);
        const auto e1 = check_split(one);
        for (int r = 1; r <= 6; ++r)
          CHECK(e1.rule_ok(r) == o1.rules[r - 1]);
        ++checked;
        for (const auto& b : remnant_states(2)) {
          SplitView two{ChamberId{0}, old_flag, stabilized, {a, b}};
          const auto o = oracle::six_rules(two);
          const auto e = check_split(two);
          for (int r = 1; r <= 6; ++r)
            CHECK(e.rule_ok(r) == o.rules[r - 1]);
          CHECK(e.invalid_empty.empty() == o.flags_valid);
          ++checked;
        }
      }
  CHECK(checked > 1000);
}

TEST_CASE("tinyness")
{
  SUBCASE("no surface at all is tiny")
  {
    FlaggedComplex f;
    f.complex.chambers = {Chamber{ChamberId{0}, {}, {}, {}}};
    f.flags[ChamberId{0}] = Flag::Occupied;
    CHECK(is_tiny(f) == TinyVerdict::Tiny);
  }
  SUBCASE("a genus-2 surface with both sides occupied is not tiny")
  {
    SceneBuilder b;
    const auto outside = b.chamber(), inside = b.chamber();
    b.surface(SurfaceShape{2, 0, 0, {}}, outside, inside);
    CHECK(is_tiny(b.build()) == TinyVerdict::NotTiny);
  }
  SUBCASE("an empty handlebody beside an occupied chamber is tiny")
  {
    SceneBuilder b;
    const auto outside = b.chamber(), inside = b.chamber(Flag::Empty, handlebody_annotation());
    b.surface(SurfaceShape{2, 0, 0, {}}, outside, inside);
    CHECK(is_tiny(b.build()) == TinyVerdict::Tiny);
  }
  SUBCASE("random flagged scenes agree with a search over chambers")
  {
    int tiny = 0;
    for (std::size_t i = 0; i < 500; ++i) {
      auto rng = instance_rng(3, i);
      const auto cx = random_complex(rng, FuzzBounds{4, 2, 0, 1}, AmbientMode::Annotated, true);
      const FlaggedComplex f{cx, random_flags(cx, rng, false)};
      const auto verdict = is_tiny(f);
      if (verdict == TinyVerdict::Unknown)
        continue;
      CHECK((verdict == TinyVerdict::Tiny) == tiny_by_search(f));
      tiny += verdict == TinyVerdict::Tiny;
    }
    CHECK(tiny > 0);
  }
}

TEST_CASE("a three-step decomposition stays consistent and not tiny")
{
  SceneBuilder b;
  const auto outside = b.chamber(), inside = b.chamber(Flag::Occupied, handlebody_annotation());
  const auto s = b.surface(SurfaceShape{1, 1, 0, {1}}, outside, inside);
  const auto cur = b.build();
  REQUIRE(is_tiny(cur) == TinyVerdict::NotTiny);
  // Compress the loop, then the separating curve, from the handlebody side.
  const auto d1 = b.disk(inside, s, s.loops.front());
  const auto step1 = decompose(cur, {d1});
  CHECK(check_succession(cur, step1.raw, step1.result).ok());
  CHECK(is_tiny(step1.result) == TinyVerdict::NotTiny);
  const auto carried = transport_disk(step1.raw, b.disk(inside, s, s.separating.front(), {s.side_pieces.front()}));
  REQUIRE(carried.has_value());
  const auto step2 = decompose(step1.result, {*carried});
  CHECK(check_succession(step1.result, step2.raw, step2.result).ok());
  CHECK(is_tiny(step2.result) == TinyVerdict::NotTiny);
  const auto step3 = decompose(step2.result, {});
  CHECK(step3.result == step2.result);
}

TEST_CASE("enumerated successions are all consistent")
{
  for (std::size_t i = 0; i < 100; ++i) {
    FuzzConfig config;
    config.seed = 17;
    config.property = "succession";
    config.bounds = FuzzBounds{3, 2, 3, 1};
    const auto s = generate_instance(config, i);
    const auto before = flagged_of(s);
    const auto raw = surger(before.complex, s.disk_sets.empty() ? DiskSet{} : s.disk_sets.front());
    for (const auto& d : enumerate_successions(before, raw, 256))
      CHECK(check_succession(before, d.raw, d.result).ok());
  }
}
