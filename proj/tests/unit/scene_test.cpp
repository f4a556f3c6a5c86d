#include <doctest.h>

#include <deque>

#include "helpers.hpp"

using namespace chamber;
using testing_support::closed_scene;

namespace {

// Genus of a connected cut complex by summing piece Euler characteristics.
int genus_by_euler(const CutComplex& cut)
{
  int chi = 0;
  for (const auto& p : cut.pieces)
    chi += 2 - 2 * p.genus - p.slots;
  return (2 - chi) / 2;
}

bool connected_by_bfs(const CutComplex& cut)
{
  if (cut.pieces.empty())
    return false;
  std::set<int> seen{cut.pieces.front().id.value};
  std::deque<int> queue{cut.pieces.front().id.value};
  while (!queue.empty()) {
    const int p = queue.front();
    queue.pop_front();
    for (const auto& c : cut.curves)
      for (auto [x, y] : {std::pair{c.a.piece.value, c.b.piece.value}, std::pair{c.b.piece.value, c.a.piece.value}})
        if (x == p && seen.insert(y).second)
          queue.push_back(y);
  }
  return seen.size() == cut.pieces.size();
}

CutComplex random_cut(std::mt19937_64& rng, int pieces)
{
  std::uniform_int_distribution<int> genus(0, 2), slots(1, 3);
  CutComplex cut;
  std::vector<Slot> open;
  for (int i = 0; i < pieces; ++i) {
    Piece p{PieceId{i}, genus(rng), slots(rng)};
    for (int s = 0; s < p.slots; ++s)
      open.push_back(Slot{p.id, s});
    cut.pieces.push_back(p);
  }
  if (open.size() % 2 == 1) {
    cut.pieces.back().slots += 1;
    open.push_back(Slot{cut.pieces.back().id, cut.pieces.back().slots - 1});
  }
  std::shuffle(open.begin(), open.end(), rng);
  for (std::size_t i = 0; i + 1 < open.size(); i += 2)
    cut.curves.push_back(Curve{CurveId{static_cast<int>(i / 2)}, open[i], open[i + 1]});
  return cut;
}

}  // namespace

TEST_CASE("a closed genus-2 surface between two chambers is valid")
{
  const auto cx = closed_scene(2);
  CHECK(validate_complex(cx).ok());
}

TEST_CASE("three surfaces with three chambers break the tree law")
{
  ChamberComplex cx;
  for (int i = 0; i < 3; ++i)
    cx.components.push_back(closed_component(ComponentId{i}, PieceId{i}, 1));
  cx.chambers = {Chamber{ChamberId{0}, {ComponentId{0}, ComponentId{1}}, {}, {}},
                 Chamber{ChamberId{1}, {ComponentId{0}, ComponentId{2}}, {}, {}},
                 Chamber{ChamberId{2}, {ComponentId{1}, ComponentId{2}}, {}, {}}};
  cx.incidence = {Incidence{ComponentId{0}, ChamberId{0}, ChamberId{1}},
                  Incidence{ComponentId{1}, ChamberId{0}, ChamberId{2}},
                  Incidence{ComponentId{2}, ChamberId{1}, ChamberId{2}}};
  CHECK(validate_complex(cx).has("tree-violation"));
}

TEST_CASE("a cycle of two pieces claiming genus 1 is rejected with the true genus")
{
  auto cx = closed_scene(1);
  auto& comp = cx.components.front();
  comp.genus = 1;
  comp.cut.pieces = {Piece{PieceId{0}, 1, 2}, Piece{PieceId{1}, 0, 2}};
  comp.cut.curves = {Curve{CurveId{0}, Slot{PieceId{0}, 0}, Slot{PieceId{1}, 0}},
                     Curve{CurveId{1}, Slot{PieceId{0}, 1}, Slot{PieceId{1}, 1}}};
  CHECK(genus_by_euler(comp.cut) == 2);
  CHECK(component_genus(comp.cut) == 2);
  CHECK(validate_complex(cx).has("genus-mismatch"));
}

TEST_CASE("curve classification")
{
  SUBCASE("a loop on a genus-2 surface is nonseparating")
  {
    SceneBuilder b;
    const auto c0 = b.chamber(), c1 = b.chamber();
    const auto s = b.surface(SurfaceShape{1, 1, 0, {}}, c0, c1);
    const auto cx = b.build().complex;
    CHECK(classify_curve(cx.component(s.id), s.loops.front()).kind == CurveKind::EssentialNonseparating);
  }
  SUBCASE("a genus-2 surface split into genus 1 and 1")
  {
    SceneBuilder b;
    const auto c0 = b.chamber(), c1 = b.chamber();
    const auto s = b.surface(SurfaceShape{1, 0, 0, {1}}, c0, c1);
    const auto cx = b.build().complex;
    const auto k = classify_curve(cx.component(s.id), s.separating.front());
    CHECK(k.kind == CurveKind::EssentialSeparating);
    CHECK(k.genus_a + k.genus_b == 2);
    CHECK(k.genus_a == 1);
  }
  SUBCASE("a cap on a torus is inessential")
  {
    SceneBuilder b;
    const auto c0 = b.chamber(), c1 = b.chamber();
    const auto s = b.torus(c0, c1);
    const auto cx = b.build().complex;
    const auto& comp = cx.component(s.id);
    const auto k = classify_curve(comp, s.caps.front());
    CHECK(k.kind == CurveKind::Inessential);
    // The disk side holds the genus-0 one-slot cap piece.
    const auto side = side_a_pieces(comp.cut, s.caps.front());
    REQUIRE(side.has_value());
    const bool cap_on_a = side->contains(s.cap_pieces.front());
    CHECK(k.disk_side == (cap_on_a ? DiskSide::A : DiskSide::B));
  }
}

TEST_CASE("component genus")
{
  CHECK(component_genus(closed_component(ComponentId{0}, PieceId{0}, 3).cut) == 3);
  CutComplex annulus_pair;
  annulus_pair.pieces = {Piece{PieceId{0}, 0, 2}, Piece{PieceId{1}, 0, 2}};
  annulus_pair.curves = {Curve{CurveId{0}, Slot{PieceId{0}, 0}, Slot{PieceId{1}, 0}},
                         Curve{CurveId{1}, Slot{PieceId{0}, 1}, Slot{PieceId{1}, 1}}};
  CHECK(component_genus(annulus_pair) == 1);

  std::mt19937_64 rng(11);
  int checked = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const auto cut = random_cut(rng, 6);
    if (!connected_by_bfs(cut))
      continue;
    CHECK(is_connected(cut));
    CHECK(component_genus(cut) == genus_by_euler(cut));
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("chamber tree")
{
  SUBCASE("one surface gives a single edge")
  {
    const auto tree = derive_chamber_tree(closed_scene(1));
    CHECK(tree.preorder.size() == 2);
    CHECK(tree.parent_edge.size() == 1);
  }
  SUBCASE("a bullseye of two spheres around a torus is a path of four chambers")
  {
    SceneBuilder b;
    const auto outer = b.chamber(), inner = b.chamber();
    b.torus(outer, inner);
    const auto base = b.build();
    Bullseye eye;
    eye.host = base.complex.chambers.front().id;
    eye.k = 2;
    const auto ins = insert_bullseye(base, eye);
    const auto& cx = ins.complex.complex;
    CHECK(ins.bullseye.spheres.size() == 2);
    REQUIRE(ins.bullseye.chambers.size() == 3);
    // host, between the spheres, inside the inner sphere, inside the torus
    std::vector<ChamberId> path{eye.host};
    path.insert(path.end(), ins.bullseye.chambers.begin(), ins.bullseye.chambers.end());
    for (std::size_t i = 1; i < path.size(); ++i) {
      const auto& a = cx.chamber(path[i - 1]).boundary;
      const auto& c = cx.chamber(path[i]).boundary;
      bool shared = false;
      for (auto x : a)
        shared = shared || std::find(c.begin(), c.end(), x) != c.end();
      CHECK(shared);
    }
    CHECK(cx.chamber(path.back()).boundary.size() == 1);
    CHECK(cx.component(cx.chamber(path.back()).boundary.front()).genus == 1);
  }
  SUBCASE("random scenes: every tree edge is an incidence")
  {
    for (std::size_t i = 0; i < 200; ++i) {
      auto rng = instance_rng(5, i);
      const auto cx = random_complex(rng, FuzzBounds{5, 2, 2, 1}, AmbientMode::Sphere, false);
      CHECK(cx.chambers.size() == cx.components.size() + 1);
      const auto tree = derive_chamber_tree(cx);
      CHECK(tree.preorder.size() == cx.chambers.size());
      for (const auto& [child, edge] : tree.parent_edge) {
        const auto& inc = cx.incidence_of(edge);
        const ChamberId parent = *tree.parent.at(child);
        CHECK(((inc.side_a == child && inc.side_b == parent) || (inc.side_b == child && inc.side_a == parent)));
      }
    }
  }
}

TEST_CASE("sphere mode makes single-sphere leaves balls")
{
  const auto cx = closed_scene(0);
  const auto a = effective_annotation(cx, ChamberId{0});
  CHECK(a.is_ball == Tri::Yes);
  CHECK(a.is_handlebody == Tri::Yes);
  auto annotated = cx;
  annotated.mode = AmbientMode::Annotated;
  CHECK(effective_annotation(annotated, ChamberId{0}).is_ball == Tri::Unknown);
}

TEST_CASE("a surface declared a sphere with an essential curve is rejected")
{
  auto cx = closed_scene(0);
  auto& comp = cx.components.front();
  comp.cut.pieces = {Piece{PieceId{0}, 0, 2}};
  comp.cut.curves = {Curve{CurveId{0}, Slot{PieceId{0}, 0}, Slot{PieceId{0}, 1}}};
  const auto r = validate_complex(cx);
  CHECK(r.has("genus-mismatch"));
  CHECK(r.has("essential-curve-on-sphere"));
}

TEST_CASE("a handlebody bounded by a sphere is a ball")
{
  auto cx = closed_scene(0);
  cx.mode = AmbientMode::Annotated;
  cx.chamber(ChamberId{0}).annotation.is_handlebody = Tri::Yes;
  CHECK(effective_annotation(cx, ChamberId{0}).is_ball == Tri::Yes);
  CHECK(validate_complex(cx).ok());
  cx.chamber(ChamberId{0}).annotation.is_ball = Tri::No;
  CHECK(validate_complex(cx).has("annotation-inconsistent"));
}
