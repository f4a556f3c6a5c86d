#pragma once

#include <array>
#include <cstdint>

#include "chamber/certificates.hpp"

namespace chamber {

// Levels are integers in (0, kLevelScale); the sweep runs from 0 up to kLevelScale.
constexpr std::int64_t kLevelScale = 1'000'000;

enum class EventKind { Birth, Death, Saddle };
enum class DigitEffect { None, Above, Below };

struct LevelEvent {
  std::int64_t s = 0;
  EventKind kind = EventKind::Saddle;
  DigitEffect effect = DigitEffect::None;
  std::optional<CurveId> curve;
  bool operator==(const LevelEvent&) const = default;
};

// Digit 1 means the part of the surface on that side has positive genus.
struct Label {
  bool above = true;
  bool below = false;
  bool balanced() const { return above == below; }
  std::string str() const { return std::string{above ? '1' : '0', below ? '1' : '0'}; }
  bool operator==(const Label&) const = default;
};

std::optional<Label> parse_label(const std::string& text);

struct LevelProfile {
  std::vector<LevelEvent> events;
  bool operator==(const LevelProfile&) const = default;
};

ValidationReport validate_profile(const LevelProfile& profile);
Label label_at(const LevelProfile& profile, std::int64_t s);

struct LevelInterval {
  std::int64_t lo = 0;  // open interval (lo, hi)
  std::int64_t hi = 0;
  Label label;
  bool operator==(const LevelInterval&) const = default;
};

std::vector<LevelInterval> balanced_levels(const LevelProfile& profile);

enum class Side { Above, Below };

struct GuideFace {
  int id = 0;
  ChamberId chamber;
  bool operator==(const GuideFace&) const = default;
};

// One circle of the sphere meeting the surface, lying on a curve of the cut complex.
struct GuideCircle {
  CurveId curve;
  int face_a = 0;
  int face_b = 0;
  std::vector<PieceId> carries;  // passed to the disk when a face bounded by it is surgered
  bool operator==(const GuideCircle&) const = default;
};

// A level sphere: its faces form a tree whose edges are the circles.
struct GuideSphere {
  int id = 0;
  std::int64_t level = 0;
  std::vector<GuideFace> faces;
  std::vector<GuideCircle> circles;
  std::map<PieceId, Side> sides;
  bool operator==(const GuideSphere&) const = default;

  const GuideFace& face(int id) const;
  int degree(int face) const;
};

ValidationReport validate_guide(const ChamberComplex& complex, const GuideSphere& guide);
Label guide_label(const ChamberComplex& complex, const GuideSphere& guide);
// Faces bounded by a single circle, as disks; only one when two faces remain.
DiskSet guided_disks(const ChamberComplex& complex, const GuideSphere& guide);
// The guide after the decomposition step: surgered and vanished circles are gone.
GuideSphere transport_guide(const GuideSphere& guide, const RawComplex& step);

enum class RunStatus { Complete, Stuck };

struct GuidedRun {
  DecompositionSequence sequence;
  RunStatus status = RunStatus::Complete;
  std::vector<Certificate> certificates;  // of the terminal stage
  std::vector<Label> labels;              // guide label at every stage
  std::vector<GuideSphere> guides;
};

GuidedRun guided_run(const FlaggedComplex& flagged, const LevelProfile& profile, std::int64_t s_star,
                     const GuideSphere& guide, const CertificateOptions& options = {});
// Same walk without the balance precondition; used to examine unbalanced positions.
GuidedRun guided_walk(const FlaggedComplex& flagged, const GuideSphere& guide, const CertificateOptions& options = {});

enum class DelayedOutcome { StepwiseE, BullseyeLeft, BlankBullseyeRight, Interact, Unresolved };

struct DelayedDiskReport {
  DelayedOutcome outcome = DelayedOutcome::Unresolved;
  std::size_t stage = 0;  // first stage where the ladder stops commuting
  int k = 0;
  GuidedRun plain;
  GuidedRun with_extra;
  std::optional<InteractionWitness> witness;
};

DelayedDiskReport classify_delayed_disk(const FlaggedComplex& start, const DiskAttachment& extra,
                                        const GuideSphere& guide, EquivalenceLedger* ledger = nullptr);

enum class TangencyKind { MaxMin, Saddle };

struct Transition {
  TangencyKind kind = TangencyKind::Saddle;
  GuideSphere before;
  GuideSphere after;
};

enum class SaddleVerdict { Equivalent, TerminalTorusBothOccupied, TerminalUnlinkedTori, Unresolved };

struct SaddleReport {
  SaddleVerdict verdict = SaddleVerdict::Unresolved;
  int k = 0;
  std::string reason;
};

SaddleReport classify_saddle(const FlaggedComplex& flagged, const Transition& transition);

// Double-saddle vertices. The six shapes of a two-vertex four-valent graph on
// the sphere; shapes with equal abstract graphs behave alike in the model.
enum class VertexShape { SeparateLobeLobe, SeparateLobeOuter, SeparateOuterOuter, ChainInside, ChainOutside, Crossed };
constexpr std::array<VertexShape, 6> kVertexShapes{VertexShape::SeparateLobeLobe, VertexShape::SeparateLobeOuter,
                                                   VertexShape::SeparateOuterOuter, VertexShape::ChainInside,
                                                   VertexShape::ChainOutside, VertexShape::Crossed};
std::string shape_name(VertexShape shape);
std::optional<VertexShape> parse_shape(const std::string& name);

// Surface on one side of the sphere in its base resolution: the circle of each
// index belongs to component block[i], whose genus is genus[block[i]].
struct SidePartition {
  std::vector<int> block;
  std::vector<int> genus;
  bool operator==(const SidePartition&) const = default;
};

struct QuadrantConfig {
  VertexShape shape = VertexShape::Crossed;
  // Whether pushing up at each vertex takes the first smoothing.
  std::array<bool, 2> up_first{true, true};
  SidePartition above;  // over the circles of N (both vertices pushed up)
  SidePartition below;  // over the circles of R (both pushed down)
  bool operator==(const QuadrantConfig&) const = default;
};

enum class Quadrant { N, P, Q, R };

struct VertexReport {
  std::array<Label, 4> labels;  // indexed by Quadrant
  std::array<int, 4> circles{};
  bool equivalent = false;  // P and Q issue equivalent certificates by the quadrant analysis
  std::string reason;
};

// Number of circles of the resolution with the given smoothing at each vertex.
int resolution_circles(VertexShape shape, bool first_at_v1, bool first_at_v2);
VertexReport classify_vertex(const QuadrantConfig& config);
// Every configuration of one shape with component genus at most `max_genus`.
std::vector<QuadrantConfig> enumerate_vertex_configs(VertexShape shape, int max_genus = 1);

// Two-parameter graphic sampled on a grid: regions[column][row], rows ascending in s.
struct Graphic {
  bool annulus = false;
  std::vector<std::vector<Label>> regions;
  bool operator==(const Graphic&) const = default;
  int columns() const { return static_cast<int>(regions.size()); }
  int rows() const { return regions.empty() ? 0 : static_cast<int>(regions.front().size()); }
};

ValidationReport validate_graphic(const Graphic& graphic);

struct Cell {
  int column = 0;
  int row = 0;
  auto operator<=>(const Cell&) const = default;
};

struct BandReport {
  std::vector<Cell> band;
  bool column_intervals = false;  // every column meets the band in one interval
  bool connected = false;         // closure connected
  std::vector<Cell> path;         // first column to last, or a loop around the annulus
  bool essential_loop = false;    // annulus only
};

BandReport balanced_band(const Graphic& graphic);

enum class CompressVerdict { Equivalent, TerminalTorusPair, Unresolved };

struct CompressReport {
  CompressVerdict verdict = CompressVerdict::Unresolved;
  std::string reason;
};

CompressReport level_compress_check(const FlaggedComplex& flagged, const LevelProfile& profile,
                                    const GuideSphere& at_e, int face, const GuideSphere& balanced);

}  // namespace chamber
