#include <doctest.h>

#include "helpers.hpp"

using namespace chamber;

namespace {

Scenario tiny_scenario()
{
  SceneBuilder b(AmbientMode::Annotated);
  const auto outside = b.chamber(), inside = b.chamber(Flag::Empty, handlebody_annotation());
  b.surface(SurfaceShape{2, 0, 0, {}}, outside, inside);
  const auto f = b.build();
  Scenario s;
  s.complex = f.complex;
  s.flags = f.flags;
  return s;
}

}  // namespace

TEST_CASE("the smallest bounds give one scene")
{
  FuzzConfig config;
  config.bounds = FuzzBounds{1, 1, 0, 1};
  config.samples = 20;
  // Samples may list the two sides in either order; they are all one scene.
  const auto first = canonical_form(flagged_of(generate_instance(config, 0)));
  for (std::size_t i = 1; i < config.samples; ++i)
    CHECK(canonical_form(flagged_of(generate_instance(config, i))) == first);
  const auto s = generate_instance(config, 0);
  REQUIRE(s.complex.components.size() == 1);
  CHECK(s.complex.components.front().genus == 1);
  CHECK(s.disk_sets.empty());
}

TEST_CASE("instances are reproducible from seed and index")
{
  FuzzConfig config;
  config.seed = 7;
  const auto a = serialize_scenario(generate_instance(config, 0));
  const auto b = serialize_scenario(generate_instance(config, 0));
  CHECK(a == b);
  config.seed = 8;
  CHECK(serialize_scenario(generate_instance(config, 0)) != a);
}

TEST_CASE("bounds that admit no scene are rejected")
{
  FuzzConfig config;
  config.bounds = FuzzBounds{0, 1, 0, 1};
  CHECK_THROWS_AS(generate_instance(config, 0), InputError);
  config.bounds = FuzzBounds{1, 1, 0, 1};
  CHECK_THROWS_AS(generate_instance(config, config.samples), InputError);
}

TEST_CASE("generated instances validate and serialize canonically")
{
  FuzzConfig config;
  config.seed = 1;
  config.samples = 1000;
  for (std::size_t i = 0; i < config.samples; ++i) {
    const auto s = generate_instance(config, i);
    const auto r = validate_full(s);
    CHECK_MESSAGE(r.ok(), (r.ok() ? std::string{} : r.issues.front().code));
    const auto text = serialize_scenario(s);
    const auto back = parse_scenario(text);
    CHECK(back == s);
    CHECK(serialize_scenario(back) == text);
  }
}

TEST_CASE("malformed scenario text is an input error")
{
  CHECK_THROWS_AS(parse_scenario("{"), InputError);
  CHECK_THROWS_AS(parse_scenario("[]"), InputError);
  auto text = serialize_scenario(tiny_scenario());
  text.insert(text.find('{') + 1, "\n  \"surprise\": 1,");
  CHECK_THROWS_AS(parse_scenario(text), InputError);
}

TEST_CASE("unknown properties are input errors")
{
  CHECK_FALSE(known_property("nonsense"));
  FuzzConfig config;
  config.property = "nonsense";
  CHECK_THROWS_AS(check_sample(config, 0), InputError);
  CHECK_THROWS_AS(run_fuzz(config), InputError);
  for (const auto& name : property_names())
    CHECK(known_property(name));
}

TEST_CASE("a counterexample replays after a round trip")
{
  const auto text = serialize_scenario(tiny_scenario());
  const auto r = replay("tiny-pullback", parse_scenario(text));
  CHECK_FALSE(r.pass);
  REQUIRE(r.counterexample.has_value());
  CHECK(serialize_scenario(*r.counterexample) == text);
  CHECK_FALSE(replay("tiny-pullback", *r.counterexample).pass);
}

TEST_CASE("campaigns count every sample")
{
  FuzzConfig config;
  config.property = "euler";
  config.seed = 3;
  config.samples = 200;
  config.threads = 2;
  const auto rep = run_fuzz(config);
  CHECK(rep.passes == 200);
  CHECK(rep.failures == 0);
  CHECK_FALSE(rep.first_failure.has_value());
}
