#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace chamber {

template <class Tag>
struct Id {
  int value = -1;
  constexpr Id() = default;
  constexpr explicit Id(int v) : value(v) {}
  auto operator<=>(const Id&) const = default;
};

struct PieceTag {};
struct CurveTag {};
struct ComponentTag {};
struct ChamberTag {};
struct DiskTag {};

using PieceId = Id<PieceTag>;
using CurveId = Id<CurveTag>;
using ComponentId = Id<ComponentTag>;
using ChamberId = Id<ChamberTag>;
using DiskId = Id<DiskTag>;

// Raised when an engine precondition is broken by its caller.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when an engine reaches a state its own invariants rule out.
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

enum class Tri { No, Yes, Unknown };

struct TopAnnotation {
  Tri is_ball = Tri::Unknown;
  Tri is_handlebody = Tri::Unknown;
  Tri is_solid_torus = Tri::Unknown;
  Tri is_reducible = Tri::Unknown;
  bool operator==(const TopAnnotation&) const = default;
};

enum class AmbientMode { Sphere, Annotated };
enum class Flag { Empty, Occupied };

struct Piece {
  PieceId id;
  int genus = 0;
  int slots = 0;
  bool operator==(const Piece&) const = default;
};

struct Slot {
  PieceId piece;
  int index = 0;
  auto operator<=>(const Slot&) const = default;
};

struct Curve {
  CurveId id;
  Slot a;
  Slot b;
  bool operator==(const Curve&) const = default;
};

struct CutComplex {
  std::vector<Piece> pieces;
  std::vector<Curve> curves;
  bool operator==(const CutComplex&) const = default;

  const Piece* find_piece(PieceId id) const;
  const Curve* find_curve(CurveId id) const;
};

struct SurfaceComponent {
  ComponentId id;
  int genus = 0;
  CutComplex cut;
  bool operator==(const SurfaceComponent&) const = default;
};

struct Chamber {
  ChamberId id;
  std::vector<ComponentId> boundary;
  TopAnnotation annotation;
  // Each group is a set of sphere components, any one of which may be capped
  // by a ball to recover the chamber described by `annotation`.
  std::vector<std::vector<ComponentId>> punctures;
  bool operator==(const Chamber&) const = default;
};

struct Incidence {
  ComponentId component;
  ChamberId side_a;
  ChamberId side_b;
  bool operator==(const Incidence&) const = default;
};

struct ChamberComplex {
  AmbientMode mode = AmbientMode::Sphere;
  std::vector<SurfaceComponent> components;
  std::vector<Chamber> chambers;
  std::vector<Incidence> incidence;
  bool operator==(const ChamberComplex&) const = default;

  const SurfaceComponent* find_component(ComponentId id) const;
  const Chamber* find_chamber(ChamberId id) const;
  const Incidence* find_incidence(ComponentId id) const;
  SurfaceComponent& component(ComponentId id);
  const SurfaceComponent& component(ComponentId id) const;
  Chamber& chamber(ChamberId id);
  const Chamber& chamber(ChamberId id) const;
  Incidence& incidence_of(ComponentId id);
  const Incidence& incidence_of(ComponentId id) const;
  // The chamber across `component` from `from`.
  ChamberId across(ComponentId component, ChamberId from) const;
  // Component owning the given curve id, if any.
  std::optional<ComponentId> component_of_curve(CurveId curve) const;
  std::optional<ComponentId> component_of_piece(PieceId piece) const;
  int total_euler_characteristic() const;
  void sort_canonical();
};

struct DiskAttachment {
  DiskId id;
  ChamberId chamber;
  ComponentId component;
  CurveId curve;
  std::optional<DiskId> nesting_parent;
  // Pieces whose components end up on the slot-a side of a separating cut.
  std::vector<PieceId> carries;
  bool operator==(const DiskAttachment&) const = default;
};

using DiskSet = std::vector<DiskAttachment>;
using FlagMap = std::map<ChamberId, Flag>;

// Cut-complex bookkeeping.
int component_genus(const CutComplex& cut);
int euler_characteristic(const CutComplex& cut);
bool is_connected(const CutComplex& cut);

enum class CurveKind { Inessential, EssentialSeparating, EssentialNonseparating };
enum class DiskSide { A, B, Both };

struct CurveClass {
  CurveKind kind = CurveKind::EssentialNonseparating;
  DiskSide disk_side = DiskSide::A;  // meaningful for Inessential
  int genus_a = 0;                   // meaningful for separating curves
  int genus_b = 0;
  bool operator==(const CurveClass&) const = default;
};

CurveClass classify_curve(const SurfaceComponent& component, CurveId curve);

// Pieces reachable from the slot-a end of `curve` once it is cut. Empty
// optional when the curve does not separate.
std::optional<std::set<PieceId>> side_a_pieces(const CutComplex& cut, CurveId curve);

// Annotation after applying everything the boundary shape forces.
TopAnnotation effective_annotation(const ChamberComplex& complex, const Chamber& chamber);
TopAnnotation effective_annotation(const ChamberComplex& complex, ChamberId chamber);

struct Issue {
  std::string code;
  std::string detail;
  bool operator==(const Issue&) const = default;
};

struct ValidationReport {
  std::vector<Issue> issues;
  bool ok() const { return issues.empty(); }
  bool has(const std::string& code) const;
};

ValidationReport validate_complex(const ChamberComplex& complex);
ValidationReport validate_disk_set(const ChamberComplex& complex, const DiskSet& disks);
ValidationReport validate_flags(const ChamberComplex& complex, const FlagMap& flags);
ValidationReport validate_scenario(const ChamberComplex& complex, const std::vector<DiskSet>& disk_sets,
                                   const std::optional<FlagMap>& flags = std::nullopt);

// Nesting parent of every separating disk curve, computed from piece sides.
std::map<DiskId, std::optional<DiskId>> compute_nesting(const ChamberComplex& complex, const DiskSet& disks);

struct ChamberTree {
  ChamberId root;
  std::map<ChamberId, std::optional<ChamberId>> parent;
  std::map<ChamberId, ComponentId> parent_edge;
  std::map<ChamberId, std::vector<ChamberId>> children;
  std::vector<ChamberId> preorder;
  std::map<ChamberId, int> depth;

  std::vector<ChamberId> path(ChamberId from, ChamberId to) const;
};

ChamberTree derive_chamber_tree(const ChamberComplex& complex);

// Chambers reachable from `start` without crossing `cut`.
std::set<ChamberId> side_of(const ChamberComplex& complex, ComponentId cut, ChamberId start);

// One past the largest piece or curve id in use.
int next_piece_id(const ChamberComplex& complex);
int next_curve_id(const ChamberComplex& complex);

// Small builders used by tests, generators and the CLI.
SurfaceComponent closed_component(ComponentId id, PieceId piece, int genus);

}  // namespace chamber
