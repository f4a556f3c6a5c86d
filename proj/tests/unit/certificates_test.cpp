#include <doctest.h>

#include "helpers.hpp"
#include "chamber/catalog.hpp"

using namespace chamber;

namespace {

FlaggedComplex torus_scene()
{
  SceneBuilder b;
  const auto outside = b.chamber(), inside = b.chamber();
  b.torus(outside, inside);
  return b.build();
}

DecompositionSequence single_stage(int id, FlaggedComplex stage)
{
  DecompositionSequence seq;
  seq.id = id;
  seq.stages = {std::move(stage)};
  return seq;
}

}  // namespace

TEST_CASE("an occupied ball certifies")
{
  SceneBuilder b;
  const auto outside = b.chamber(), inside = b.chamber();
  b.sphere(outside, inside);
  const auto f = b.build();
  const auto certs = certificates(f);
  REQUIRE_FALSE(certs.empty());
  CHECK(certs.front().kind == CertificateKind::OccupiedBallBoundary);
  CHECK(certifies(f));
}

TEST_CASE("a torus between occupied chambers does not certify")
{
  CHECK_FALSE(certifies(torus_scene()));
}

TEST_CASE("a solid torus certifies only when asked to")
{
  SceneBuilder b;
  const auto outside = b.chamber(), inside = b.chamber(Flag::Occupied, solid_torus_annotation());
  b.torus(outside, inside);
  const auto f = b.build();
  CHECK_FALSE(certifies(f));
  CertificateOptions opt;
  opt.solid_torus_certifies = true;
  CHECK(certifies(f, opt));
}

TEST_CASE("bullseye insertion")
{
  const auto base = torus_scene();
  Bullseye eye;
  eye.host = base.complex.chambers.front().id;
  eye.k = 3;
  const auto ins = insert_bullseye(base, eye);
  CHECK(ins.bullseye.spheres.size() == 3);
  REQUIRE(ins.bullseye.torus.has_value());
  CHECK(ins.complex.complex.components.size() == base.complex.components.size() + 4);
  CHECK(ins.bullseye.sphere_curves.size() == 3);
  CHECK(ins.bullseye.torus_meridian.has_value());
  CHECK(validate_complex(ins.complex.complex).ok());
  CHECK(ins.complex.flag(ins.bullseye.chambers.back()) == Flag::Empty);

  const auto diff = bullseye_difference(ins.complex, base);
  REQUIRE(diff.has_value());
  CHECK(diff->k == 3);
  CHECK_FALSE(diff->blank);
}

TEST_CASE("a bullseye no disk touches persists unchanged")
{
  SceneBuilder b;
  const auto outside = b.chamber(), inside = b.chamber();
  const auto s = b.surface(SurfaceShape{1, 1, 0, {}}, outside, inside);
  const auto d = b.disk(inside, s, s.loops.front());
  const auto base = b.build();
  for (int k : {1, 2, 3}) {
    Bullseye eye;
    eye.host = outside;
    eye.k = k;
    const auto out = propagate_bullseye(base, {}, eye);
    CHECK(out.kind == BullseyeOutcome::Persists);
    CHECK(out.k == k);
    const auto with_disk = propagate_bullseye(base, {d}, eye);
    CHECK(with_disk.kind == BullseyeOutcome::Persists);
    CHECK(with_disk.k >= k);
  }
}

TEST_CASE("random bullseyes never shrink")
{
  for (std::size_t i = 0; i < 200; ++i) {
    auto rng = instance_rng(9, i);
    const auto inst = random_bullseye_instance(rng, FuzzBounds{3, 2, 3, 1});
    const auto out = propagate_bullseye(inst.base, inst.disks, inst.bullseye);
    if (out.kind == BullseyeOutcome::Persists)
      CHECK(out.k >= inst.bullseye.k);
  }
}

TEST_CASE("a disk on a different surface commutes with the set")
{
  SceneBuilder b;
  const auto outside = b.chamber(), a = b.chamber(), c = b.chamber();
  const auto s = b.surface(SurfaceShape{1, 1, 0, {}}, outside, a);
  const auto t = b.surface(SurfaceShape{1, 1, 0, {}}, outside, c);
  const auto d = b.disk(a, s, s.loops.front());
  const auto e = b.disk(c, t, t.loops.front());
  const auto rep = classify_added_disk(b.build(), {d}, e);
  CHECK(rep.outcome == AddDiskOutcome::Same);
  CHECK(isomorphic(rep.c_ed, rep.c_de));
  CHECK(rep.case_consistent);
  CHECK_FALSE(rep.simultaneous_blank_left);
}

TEST_CASE("the two-surface add-disk catalog is consistent")
{
  const auto cases = add_disk_catalog(2);
  REQUIRE(cases.size() > 1000);
  std::map<AddDiskOutcome, int> seen;
  for (const auto& c : cases) {
    const auto rep = classify_added_disk(c.base, c.disks, c.extra);
    CHECK_MESSAGE((rep.outcome == AddDiskOutcome::Same) == isomorphic(rep.c_ed, rep.c_de), c.name);
    CHECK_MESSAGE(rep.case_consistent, c.name);
    CHECK_MESSAGE(!rep.simultaneous_blank_left, c.name);
    ++seen[rep.outcome];
  }
  CHECK(seen[AddDiskOutcome::Same] > 0);
  CHECK(seen[AddDiskOutcome::Reduces] + seen[AddDiskOutcome::BullseyeRight] +
            seen[AddDiskOutcome::BlankBullseyeLeft] >
        0);
}

TEST_CASE("canonical forms ignore ids")
{
  const auto a = torus_scene();
  auto b = a;
  for (auto& c : b.complex.components)
    c.id = ComponentId{c.id.value + 10};
  for (auto& inc : b.complex.incidence)
    inc.component = ComponentId{inc.component.value + 10};
  for (auto& ch : b.complex.chambers)
    for (auto& x : ch.boundary)
      x = ComponentId{x.value + 10};
  CHECK(canonical_form(a) == canonical_form(b));
  CHECK(isomorphic(a, b));
  auto c = a;
  c.flags.begin()->second = Flag::Empty;
  CHECK_FALSE(isomorphic(a, c));
}

TEST_CASE("equivalence ledger")
{
  SUBCASE("fresh sequences are not equivalent")
  {
    EquivalenceLedger ledger;
    ledger.register_sequence(single_stage(1, torus_scene()));
    ledger.register_sequence(single_stage(2, torus_scene()));
    CHECK_FALSE(are_equivalent(ledger, 1, 2).equivalent);
    CHECK(are_equivalent(ledger, 1, 1).equivalent);
  }
  SUBCASE("relations are transitive")
  {
    SceneBuilder b;
    const auto outside = b.chamber(), inside = b.chamber();
    b.sphere(outside, inside);
    const auto ball = b.build();
    EquivalenceLedger ledger;
    ledger.register_sequence(single_stage(3, torus_scene()));
    ledger = relate_sequences(single_stage(1, ball), single_stage(2, ball), ledger);
    CHECK(are_equivalent(ledger, 1, 2).equivalent);
    CHECK_FALSE(are_equivalent(ledger, 1, 3).equivalent);
    ledger = relate_sequences(ledger.sequence(2), single_stage(4, ball), ledger);
    CHECK(ledger.find(1) == ledger.find(4));
    const auto ans = are_equivalent(ledger, 1, 4);
    CHECK(ans.equivalent);
    CHECK(ans.chain.size() == 2);
    CHECK(replay_chain(ledger, ans.chain, 1, 4));
  }
  SUBCASE("the scripted cycle links its ends by a replayable chain")
  {
    const auto cycle = scripted_cycle(5);
    REQUIRE(cycle.primary.size() == 6);
    const auto ans = are_equivalent(cycle.ledger, cycle.primary.front(), cycle.primary.back());
    CHECK(ans.equivalent);
    CHECK(ans.chain.size() == 10);
    CHECK(replay_chain(cycle.ledger, ans.chain, cycle.primary.front(), cycle.primary.back()));
    CHECK(oracle::ledger_connected(cycle.ledger, cycle.primary.front(), cycle.primary.back()));
  }
  SUBCASE("random ledgers agree with union-find")
  {
    for (std::size_t i = 0; i < 200; ++i) {
      FuzzConfig config;
      config.property = "ledger";
      config.seed = 4;
      CHECK(check_sample(config, i).pass);
    }
  }
}
