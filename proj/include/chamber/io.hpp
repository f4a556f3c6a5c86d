#pragma once

#include <string>

#include "chamber/sweepout.hpp"

namespace chamber {

// Everything one command can read or write. Optional parts are omitted from
// the serialized form when absent.
struct Scenario {
  ChamberComplex complex;
  std::vector<DiskSet> disk_sets;
  std::optional<FlagMap> flags;
  std::optional<SuccessionPolicy> policy;
  std::optional<LevelProfile> profile;
  std::optional<GuideSphere> sphere;
  std::optional<Graphic> graphic;
  // A bullseye to insert before the disk sets apply; disks may refer to its surfaces.
  std::optional<Bullseye> bullseye;
  bool operator==(const Scenario&) const = default;
};

// Canonical text: sorted keys and ids, two-space indent, trailing newline.
std::string serialize_scenario(const Scenario& scenario);
// Throws InputError on malformed text, unknown keys or bad values. Does not
// run the validators.
Scenario parse_scenario(const std::string& text);

Scenario read_scenario_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

ValidationReport validate_full(const Scenario& scenario);

// The scenario's flagged complex; chambers without a flag are occupied.
FlaggedComplex flagged_of(const Scenario& scenario);

std::string flag_name(Flag flag);
std::string strategy_name(Strategy strategy);
std::optional<Strategy> parse_strategy(const std::string& name);
std::string mode_name(AmbientMode mode);
std::optional<AmbientMode> parse_mode(const std::string& name);

}  // namespace chamber
