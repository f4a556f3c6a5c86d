#pragma once

#include "chamber/scene.hpp"

namespace chamber {

enum class ScarSide { Internal, External };

struct ScarRecord {
  DiskId disk;
  PieceId scar_a;
  PieceId scar_b;
  ComponentId host_a;
  ComponentId host_b;
  // Raw chamber that absorbed the 2-handle; the disk lies inside it.
  ChamberId handle_chamber;
  bool operator==(const ScarRecord&) const = default;
};

struct PanelNode {
  PieceId piece;
  int genus = 0;
  ComponentId original_component;
  ComponentId host;  // raw component now containing the piece
};

struct PanelEdge {
  PieceId a;
  PieceId b;
  std::optional<DiskId> disk;  // set for the annulus removed by a surgery
  ChamberId annulus_chamber;   // raw chamber holding that annulus
};

struct PanelGraph {
  std::vector<PanelNode> nodes;
  std::vector<PanelEdge> edges;
  const PanelNode& node(PieceId id) const;
};

// Result of surgery, optionally followed by pruning. `raw` never changes after
// surgery; `complex` is the current (possibly pruned) view.
struct RawComplex {
  ChamberComplex before;
  ChamberComplex raw;
  ChamberComplex complex;
  std::vector<ScarRecord> scars;
  std::map<ChamberId, ChamberId> remnant;        // raw chamber -> chamber of `before`
  std::map<ChamberId, std::set<ChamberId>> region;  // current chamber -> raw chambers merged into it
  std::set<ChamberId> gone;                       // raw chambers absorbed as goneballs
  PanelGraph panels;
  int disk_count = 0;

  ChamberId remnant_of(ChamberId current) const { return remnant.at(current); }
  std::vector<ChamberId> raw_remnants(ChamberId old_chamber) const;
};

RawComplex surger(const ChamberComplex& complex, const DiskSet& disks);

ScarSide classify_scar(const RawComplex& raw, ChamberId chamber, const ScarRecord& scar);

// Diskiness of a union of raw chambers.
bool region_is_disky(const RawComplex& raw, const std::set<ChamberId>& raw_chambers);
// Diskiness of the side of a current component containing `side_chamber`.
bool is_disky(const RawComplex& raw, ComponentId component, ChamberId side_chamber);
// Diskiness of one current chamber (with everything merged into it).
bool chamber_is_disky(const RawComplex& raw, ChamberId current);

struct GoneballCandidates {
  std::vector<ChamberId> chambers;
  std::vector<ChamberId> needs_annotation;
};

GoneballCandidates goneball_candidates(const RawComplex& raw);

RawComplex prune(const RawComplex& raw, const std::vector<ChamberId>& chosen);

// Identity decomposition: no disks, nothing pruned.
RawComplex trivial_raw(const ChamberComplex& complex);

}  // namespace chamber
