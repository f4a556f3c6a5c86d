#pragma once

#include <climits>

#include "chamber/flags.hpp"

namespace chamber {

enum class CertificateKind { OccupiedBallBoundary, ReducingSphere, AnnotatedReducible, OccupiedSolidTorus };

struct Certificate {
  CertificateKind kind = CertificateKind::OccupiedBallBoundary;
  ChamberId chamber;
  std::optional<ComponentId> sphere;
  std::optional<int> guide;
  // Identity of the witnessing surface, stable across stages sharing pieces.
  std::string key;
  bool operator==(const Certificate&) const = default;
};

struct CertificateOptions {
  bool solid_torus_certifies = false;
  // Pieces with ids at or above this bound are treated as scars in keys.
  int piece_bound = INT_MAX;
};

// A guiding sphere lying inside one chamber at a terminal stage.
struct GuideWitness {
  int guide_id = 0;
  ChamberId chamber;
  std::vector<ComponentId> above;
  std::vector<ComponentId> below;
};

std::vector<Certificate> certificates(const FlaggedComplex& flagged, const CertificateOptions& options = {},
                                      const std::optional<GuideWitness>& guide = std::nullopt);
bool certifies(const FlaggedComplex& flagged, const CertificateOptions& options = {},
               const std::optional<GuideWitness>& guide = std::nullopt);

// Key describing a component by its original pieces.
std::string piece_signature(const SurfaceComponent& component, int piece_bound = INT_MAX);

struct CanonicalOptions {
  std::optional<ChamberId> ignore;  // chamber whose flag and annotation are not compared
  bool annotations = true;
};

std::string canonical_form(const FlaggedComplex& flagged, const CanonicalOptions& options = {});
bool isomorphic(const FlaggedComplex& a, const FlaggedComplex& b);

struct Bullseye {
  ChamberId host;
  int k = 0;
  bool blank = false;
  TopAnnotation torus_side{Tri::No, Tri::Yes, Tri::Yes, Tri::No};
  Flag torus_side_flag = Flag::Empty;
  // Filled in by insert_bullseye.
  std::vector<ComponentId> spheres;      // outermost first
  std::optional<ComponentId> torus;
  std::vector<ChamberId> chambers;       // host side inward; last one is the torus side or the inner ball
  std::optional<CurveId> torus_meridian;  // nonseparating curve on the torus
  std::optional<CurveId> torus_trivial;   // inessential curve on the torus
  std::vector<CurveId> sphere_curves;     // one inessential curve per sphere, outermost first
  bool operator==(const Bullseye&) const = default;
};

struct InsertedBullseye {
  FlaggedComplex complex;
  Bullseye bullseye;
};

InsertedBullseye insert_bullseye(const FlaggedComplex& flagged, const Bullseye& eye);

struct BullseyeMatch {
  int k = 0;
  bool blank = false;
  ChamberId host;               // in the larger complex
  std::vector<ChamberId> chain;  // removed chambers, innermost first
};

// A bullseye whose removal from `larger` yields `smaller`; `blank` restricts the
// kind when set. An empty blank insertion (k = 0) matches isomorphic pairs.
std::optional<BullseyeMatch> bullseye_difference(const FlaggedComplex& larger, const FlaggedComplex& smaller,
                                                 std::optional<bool> blank = std::nullopt);

struct BullseyeOutcome {
  enum Kind { HostReducible, Persists, Unresolved } kind = Unresolved;
  int k = 0;
  bool blank = false;
  int crossings = 0;  // bullseye surfaces met on the tree path from the host to the torus-side point
};

BullseyeOutcome propagate_bullseye(const FlaggedComplex& base, const DiskSet& disks, const Bullseye& bullseye);

// Moves a disk of one complex to the complex obtained by decomposing it.
std::optional<DiskAttachment> transport_disk(const RawComplex& step, const DiskAttachment& disk);
DiskSet transport_disks(const RawComplex& step, const DiskSet& disks);

// Pieces of the chamber's boundary on the slot-a side of a separating disk;
// empty when the curve does not separate its surface.
std::optional<std::set<PieceId>> disk_side_a(const ChamberComplex& complex, const DiskAttachment& disk);
// Two separating disks in one chamber whose sides no disjoint placement realises.
bool disks_cross(const ChamberComplex& complex, const DiskAttachment& d, const DiskAttachment& e);

enum class AddDiskOutcome { Same, Reduces, BullseyeRight, BlankBullseyeLeft, Unclassified };

struct AddDiskReport {
  AddDiskOutcome outcome = AddDiskOutcome::Unclassified;
  int k = 0;
  bool blank = false;
  std::vector<std::string> case_labels;  // every reading of the case analysis
  bool case_consistent = false;          // outcome allowed by at least one reading
  bool simultaneous_blank_left = false;  // C_ED is C_{D+E} plus a blank bullseye
  FlaggedComplex c_d, c_e, c_de, c_ed, c_simultaneous;
};

AddDiskReport classify_added_disk(const FlaggedComplex& base, const DiskSet& disks, const DiskAttachment& extra);
bool outcome_allowed(const std::string& case_label, AddDiskOutcome outcome, int k);

struct DecompositionSequence {
  int id = 0;
  std::vector<FlaggedComplex> stages;
  std::vector<DiskSet> disk_sets;
  std::optional<int> guide;
  std::optional<GuideWitness> terminal_guide;
  int piece_bound = INT_MAX;

  std::vector<Certificate> stage_certificates(std::size_t stage) const;
  bool certifies() const;
};

struct InteractionWitness {
  int seq_a = 0;
  std::size_t stage_a = 0;
  int seq_b = 0;
  std::size_t stage_b = 0;
  std::string shared;  // key of the certificate both stages issue
  Certificate certificate_a;
  Certificate certificate_b;
};

class EquivalenceLedger {
 public:
  void register_sequence(const DecompositionSequence& seq);
  // Records the witness and merges the two classes; classes only merge this way.
  void add_witness(const InteractionWitness& w);
  bool registered(int id) const { return sequences_.contains(id); }
  const DecompositionSequence& sequence(int id) const;
  const std::vector<InteractionWitness>& witnesses() const { return witnesses_; }
  int find(int id) const;

 private:
  bool relate(int a, int b);

  std::map<int, DecompositionSequence> sequences_;
  mutable std::map<int, int> parent_;
  std::vector<InteractionWitness> witnesses_;
};

EquivalenceLedger relate_sequences(const DecompositionSequence& a, const DecompositionSequence& b,
                                   EquivalenceLedger ledger);

struct EquivalenceAnswer {
  bool equivalent = false;
  std::vector<InteractionWitness> chain;
};

EquivalenceAnswer are_equivalent(const EquivalenceLedger& ledger, int a, int b);
// Re-derives the certificates behind a witness chain.
bool replay_chain(const EquivalenceLedger& ledger, const std::vector<InteractionWitness>& chain, int a, int b);

}  // namespace chamber
