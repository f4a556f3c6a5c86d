#include "chamber/builders.hpp"

#include <fmt/format.h>

namespace chamber {

TopAnnotation ball_annotation_value() { return {Tri::Yes, Tri::Yes, Tri::No, Tri::No}; }
TopAnnotation solid_torus_annotation() { return {Tri::No, Tri::Yes, Tri::Yes, Tri::No}; }
TopAnnotation handlebody_annotation() { return {Tri::No, Tri::Yes, Tri::Unknown, Tri::No}; }

ChamberId SceneBuilder::chamber(Flag flag, TopAnnotation annotation)
{
  const ChamberId id{static_cast<int>(complex_.chambers.size())};
  complex_.chambers.push_back(Chamber{id, {}, annotation, {}});
  flags_[id] = flag;
  return id;
}

BuiltSurface SceneBuilder::surface(const SurfaceShape& shape, ChamberId side_a, ChamberId side_b)
{
  if (shape.body_genus < 0 || shape.loops < 0 || shape.caps < 0)
    throw InputError("surface shape counts must be non-negative");
  BuiltSurface out;
  out.id = ComponentId{static_cast<int>(complex_.components.size())};
  SurfaceComponent s{out.id, 0, {}};
  const int slots = 2 * shape.loops + shape.caps + static_cast<int>(shape.separating_sides.size());
  out.body = PieceId{next_piece_++};
  s.cut.pieces.push_back(Piece{out.body, shape.body_genus, slots});
  int slot = 0;
  for (int i = 0; i < shape.loops; ++i) {
    const CurveId k{next_curve_++};
    s.cut.curves.push_back(Curve{k, Slot{out.body, slot}, Slot{out.body, slot + 1}});
    slot += 2;
    out.loops.push_back(k);
  }
  for (int i = 0; i < shape.caps; ++i) {
    const PieceId p{next_piece_++};
    const CurveId k{next_curve_++};
    s.cut.pieces.push_back(Piece{p, 0, 1});
    s.cut.curves.push_back(Curve{k, Slot{out.body, slot++}, Slot{p, 0}});
    out.caps.push_back(k);
    out.cap_pieces.push_back(p);
  }
  for (int g : shape.separating_sides) {
    if (g < 1)
      throw InputError("an essential separating curve needs genus on both sides");
    const PieceId p{next_piece_++};
    const CurveId k{next_curve_++};
    s.cut.pieces.push_back(Piece{p, g, 1});
    s.cut.curves.push_back(Curve{k, Slot{out.body, slot++}, Slot{p, 0}});
    out.separating.push_back(k);
    out.side_pieces.push_back(p);
  }
  if (slots == 0 && s.cut.pieces.size() == 1)
    s.cut.pieces.front().slots = 0;
  s.genus = component_genus(s.cut);
  complex_.components.push_back(s);
  complex_.incidence.push_back(Incidence{out.id, side_a, side_b});
  complex_.chamber(side_a).boundary.push_back(out.id);
  complex_.chamber(side_b).boundary.push_back(out.id);
  return out;
}

DiskAttachment SceneBuilder::disk(ChamberId chamber, const BuiltSurface& s, CurveId curve, std::vector<PieceId> carries)
{
  return DiskAttachment{DiskId{next_disk_++}, chamber, s.id, curve, std::nullopt, std::move(carries)};
}

FlaggedComplex SceneBuilder::build() const
{
  FlaggedComplex out{complex_, flags_};
  out.complex.sort_canonical();
  if (auto r = validate_complex(out.complex); !r.ok())
    throw InputError(fmt::format("built complex is invalid: {} ({})", r.issues.front().code, r.issues.front().detail));
  if (auto r = validate_flags(out.complex, out.flags); !r.ok())
    throw InputError(fmt::format("built flags are invalid: {} ({})", r.issues.front().code, r.issues.front().detail));
  return out;
}

}  // namespace chamber
