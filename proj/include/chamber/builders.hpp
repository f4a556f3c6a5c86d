#pragma once

#include "chamber/flags.hpp"

namespace chamber {

// A closed surface assembled from one body piece plus attachments, each
// carrying one curve of a known kind.
struct SurfaceShape {
  int body_genus = 0;
  int loops = 0;                      // nonseparating curves, each adds a handle
  int caps = 0;                       // inessential curves, each bounding a disk piece
  std::vector<int> separating_sides;  // genus of the far side of each essential separating curve
};

struct BuiltSurface {
  ComponentId id;
  PieceId body;
  std::vector<CurveId> loops;
  std::vector<CurveId> caps;
  std::vector<PieceId> cap_pieces;
  std::vector<CurveId> separating;
  std::vector<PieceId> side_pieces;
};

class SceneBuilder {
 public:
  explicit SceneBuilder(AmbientMode mode = AmbientMode::Sphere) { complex_.mode = mode; }

  ChamberId chamber(Flag flag = Flag::Occupied, TopAnnotation annotation = {});
  BuiltSurface surface(const SurfaceShape& shape, ChamberId side_a, ChamberId side_b);
  BuiltSurface sphere(ChamberId side_a, ChamberId side_b, int caps = 1)
  {
    return surface(SurfaceShape{0, 0, caps, {}}, side_a, side_b);
  }
  // A torus with one meridian loop and one inessential cap.
  BuiltSurface torus(ChamberId side_a, ChamberId side_b) { return surface(SurfaceShape{0, 1, 1, {}}, side_a, side_b); }

  void annotate(ChamberId c, TopAnnotation a) { complex_.chamber(c).annotation = a; }
  void puncture(ChamberId c, std::vector<ComponentId> group) { complex_.chamber(c).punctures.push_back(std::move(group)); }
  void flag(ChamberId c, Flag f) { flags_[c] = f; }

  DiskAttachment disk(ChamberId chamber, const BuiltSurface& s, CurveId curve, std::vector<PieceId> carries = {});

  const ChamberComplex& complex() const { return complex_; }
  // Canonically sorted and validated.
  FlaggedComplex build() const;

 private:
  ChamberComplex complex_;
  FlagMap flags_;
  int next_piece_ = 0;
  int next_curve_ = 0;
  int next_disk_ = 0;
};

TopAnnotation ball_annotation_value();
TopAnnotation solid_torus_annotation();
TopAnnotation handlebody_annotation();

}  // namespace chamber
