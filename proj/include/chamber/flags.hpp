#pragma once

#include <array>
#include <random>

#include "chamber/surgery.hpp"

namespace chamber {

struct FlaggedComplex {
  ChamberComplex complex;
  FlagMap flags;
  bool operator==(const FlaggedComplex&) const = default;
  Flag flag(ChamberId id) const { return flags.at(id); }
};

enum class Strategy { Default, Enumerate, Explicit };

struct Assignment {
  std::vector<ChamberId> goneballs;
  FlagMap flags;
  bool operator==(const Assignment&) const = default;
};

struct SuccessionPolicy {
  Strategy strategy = Strategy::Default;
  std::map<ChamberId, bool> stabilized;  // keyed by chamber before decomposition
  std::optional<Assignment> assignment;  // used by Strategy::Explicit
  bool operator==(const SuccessionPolicy&) const = default;
  bool is_stabilized(ChamberId c) const
  {
    auto it = stabilized.find(c);
    return it != stabilized.end() && it->second;
  }
};

// What the six rules need to know about one remnant.
struct RemnantView {
  ChamberId id;
  bool gone = false;
  bool disky = false;
  bool handlebody = false;      // known handlebody
  bool ball = false;            // known ball
  bool known_nonball = false;   // known not to be a ball
  std::optional<Flag> flag;     // survivors only

  bool disky_handlebody() const { return disky && handlebody; }
  bool disky_ball() const { return disky && ball; }
};

struct SplitView {
  ChamberId old;
  Flag old_flag = Flag::Occupied;
  bool stabilized = false;
  std::vector<RemnantView> remnants;
};

constexpr int kRuleCount = 6;

struct ConsistencyReport {
  // violations[i] lists the chambers breaking rule i+1; an old chamber is
  // listed for rules about its remnant set (3-6), a new chamber for 1-2.
  std::array<std::vector<ChamberId>, kRuleCount> violations;
  std::vector<ChamberId> invalid_empty;  // Empty chambers not known to be non-ball handlebodies
  bool rule_ok(int rule) const { return violations.at(rule - 1).empty(); }
  bool ok() const;
};

ConsistencyReport check_split(const SplitView& view);
ConsistencyReport check_succession(const FlaggedComplex& before, const RawComplex& raw, const FlaggedComplex& after);

// Default choice on one split: which remnants go and which flags survivors get.
struct SplitChoice {
  std::vector<ChamberId> gone;
  std::map<ChamberId, Flag> flags;
};
SplitChoice default_split_choice(const SplitView& view);

struct Decomposition {
  FlaggedComplex result;
  RawComplex raw;
};

Decomposition default_succession(const FlaggedComplex& before, const RawComplex& raw, const SuccessionPolicy& policy);
std::vector<Decomposition> enumerate_successions(const FlaggedComplex& before, const RawComplex& raw,
                                                 std::size_t limit = 4096);
// A uniformly drawn goneball subset with random consistent flags; falls back to
// the default succession when rejection sampling runs dry.
Decomposition random_succession(const FlaggedComplex& before, const RawComplex& raw, std::mt19937_64& rng);
Decomposition apply_assignment(const FlaggedComplex& before, const RawComplex& raw, const Assignment& assignment);

Decomposition decompose(const FlaggedComplex& flagged, const DiskSet& disks, const SuccessionPolicy& policy = {});

std::vector<SplitView> split_views(const FlaggedComplex& before, const RawComplex& raw,
                                   const std::optional<FlagMap>& after_flags, const SuccessionPolicy& policy = {});

enum class TinyVerdict { Tiny, NotTiny, Unknown };

TinyVerdict is_tiny(const FlaggedComplex& flagged);
TinyVerdict is_tiny_unflagged(const ChamberComplex& complex);

}  // namespace chamber
